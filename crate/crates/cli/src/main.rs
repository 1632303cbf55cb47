//! `duts`: solve, construct, verify, probe.
//!
//! Exit codes: 0 success, 1 invalid input or failed verification, 2 refusal
//! because the index sequence has a bounded ratio, 3 caps exhausted.

mod config;
mod selftest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use duts_core::certificate::{verify, ConstructionCertificate};
use duts_core::construct::construct;
use duts_core::error::Error;
use duts_core::probe::probe;
use duts_core::sequence::{check_ratio, Verdict, VERDICT_CAVEAT};
use duts_core::solver::{lp_oracle, solve_window};
use duts_core::text::fmt_f64;

const EXIT_FAIL: u8 = 1;
const EXIT_REFUSED: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(name = "duts", version, about = "Doubly universal Taylor series constructions")]
struct Cli {
    /// Worker threads; never changes any output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized self-tests only.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Degree-window minimax fit; writes approximation.txt.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Build a certificate; writes certificate.txt.
    Construct {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Re-check a certificate on denser grids.
    Verify {
        certificate: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        density_mult: f64,
    },
    /// Window error decay along a schedule; writes probe.csv.
    Probe {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Lawson against the LP reference on random instances.
    Selftest {
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("--threads must be at least 1");
            return ExitCode::from(EXIT_FAIL);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("thread pool: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    };
    ExitCode::from(pool.install(|| run(&cli)))
}

fn run(cli: &Cli) -> u8 {
    match &cli.command {
        Command::Solve { config, out } => cmd_solve(config, out),
        Command::Construct { config, out } => cmd_construct(config, out),
        Command::Verify {
            certificate,
            density_mult,
        } => cmd_verify(certificate, *density_mult),
        Command::Probe { config, out } => cmd_probe(config, out),
        Command::Selftest { count } => selftest::run(cli.seed, *count),
    }
}

fn fail(context: &str, e: impl std::fmt::Display) -> u8 {
    eprintln!("{context}: {e}");
    EXIT_FAIL
}

fn write_output(dir: &Path, name: &str, text: &str) -> Result<PathBuf, String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(path)
}

fn cmd_solve(config: &Path, out: &Path) -> u8 {
    let cfg = match config::load(config) {
        Ok(c) => c,
        Err(e) => return fail("config", e),
    };
    let (task, use_lp) = match cfg.solve_task() {
        Ok(t) => t,
        Err(e) => return fail("config", e),
    };
    let result = match cfg.solver_options() {
        Ok((opts, facets)) => {
            if use_lp {
                lp_oracle(&task, facets)
            } else {
                solve_window(&task, &opts)
            }
        }
        Err(e) => Err(e),
    };
    let r = match result {
        Ok(r) => r,
        Err(e) => return fail("solve", e),
    };
    let text = format!("format: 1\n{}", r.polynomial.to_coefficient_text());
    if let Err(e) = write_output(out, "approximation.txt", &text) {
        return fail("solve", e);
    }
    let errors: Vec<String> = task
        .grids()
        .iter()
        .zip(&r.errors)
        .map(|(g, e)| format!("{}={}", g.name, fmt_f64(*e)))
        .collect();
    println!(
        "objective {} lower_bound {} iterations {} converged {} errors {}",
        fmt_f64(r.objective),
        fmt_f64(r.lower_bound),
        r.iterations,
        r.converged,
        errors.join(",")
    );
    0
}

fn cmd_construct(config: &Path, out: &Path) -> u8 {
    let cfg = match config::load(config) {
        Ok(c) => c,
        Err(e) => return fail("config", e),
    };
    let (problem, caps) = match cfg.construct_problem() {
        Ok(p) => p,
        Err(e) => return fail("config", e),
    };
    let horizon = problem
        .sequence
        .max_index()
        .map_or(caps.horizon, |m| m.min(caps.horizon));
    if let Ok(check) = check_ratio(&problem.sequence, horizon) {
        let verdict = match check.verdict {
            Verdict::Diverging => "diverging",
            Verdict::BoundedSoFar => "bounded so far",
        };
        println!(
            "ratio check: sup lambda_n/n = {} at n = {} (n <= {}): {verdict} ({VERDICT_CAVEAT})",
            fmt_f64(check.sup_ratio),
            check.attained_at,
            check.horizon
        );
    }
    match construct(&problem, &caps) {
        Ok(cert) => {
            let path = match write_output(out, "certificate.txt", &cert.to_text()) {
                Ok(p) => p,
                Err(e) => return fail("construct", e),
            };
            println!(
                "n0 {} mu {} lambda_mu {} window_high {} deg_p {} deg_f {}",
                cert.n0,
                cert.mu,
                cert.lambda_mu,
                cert.window_high,
                cert.p.degree(),
                cert.f.degree()
            );
            println!(
                "residual_L {} residual_K1 {} residual_K2 {} window_error {}",
                fmt_f64(cert.residual_l),
                fmt_f64(cert.residual_k1),
                fmt_f64(cert.residual_k2),
                fmt_f64(cert.window_error)
            );
            println!("wrote {}", path.display());
            0
        }
        Err(e @ Error::BoundedRatio { .. }) => {
            eprintln!("construct: {e}");
            EXIT_REFUSED
        }
        Err(
            e @ (Error::CandidatesExhausted { .. }
            | Error::ApproximationFailure { .. }
            | Error::SubsequenceExhausted { .. }),
        ) => {
            eprintln!("construct: {e}");
            EXIT_EXHAUSTED
        }
        Err(e) => fail("construct", e),
    }
}

fn cmd_verify(path: &Path, density_mult: f64) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(&path.display().to_string(), e),
    };
    let cert = match ConstructionCertificate::from_text(&text) {
        Ok(c) => c,
        Err(e) => return fail(&path.display().to_string(), e),
    };
    let report = verify(&cert, density_mult);
    for (i, name) in ["L", "K1", "K2"].iter().enumerate() {
        let value = report.residuals[i].map_or("unavailable".to_string(), fmt_f64);
        println!("residual_{name} {value} limit {}", fmt_f64(report.limits[i]));
    }
    println!("identities {}", if report.identities_hold { "hold" } else { "fail" });
    for f in &report.failures {
        println!("failure: {f}");
    }
    if report.passed() {
        println!("verify: pass at density x{}", fmt_f64(density_mult));
        0
    } else {
        println!("verify: FAIL");
        EXIT_FAIL
    }
}

fn cmd_probe(config: &Path, out: &Path) -> u8 {
    let cfg = match config::load(config) {
        Ok(c) => c,
        Err(e) => return fail("config", e),
    };
    let inputs = cfg.probe_inputs().and_then(|i| Ok((i, cfg.solver_options()?.0)));
    let ((f, k, l, sched), opts) = match inputs {
        Ok(x) => x,
        Err(e) => return fail("config", e),
    };
    let report = match probe(&f, &k, &l, &sched, &opts) {
        Ok(r) => r,
        Err(e) => return fail("probe", e),
    };
    let path = match write_output(out, "probe.csv", &report.to_csv()) {
        Ok(p) => p,
        Err(e) => return fail("probe", e),
    };
    let flagged = report.rows.iter().filter(|r| !r.converged).count();
    println!(
        "theta_hat {} head_max {} rows {} not_converged {flagged}",
        fmt_f64(report.theta_hat),
        fmt_f64(report.head_max),
        report.rows.len()
    );
    println!("wrote {}", path.display());
    0
}
