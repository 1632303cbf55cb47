//! Random two-set window fits solved both by Lawson and by the LP reference.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use duts_core::poly::DegreeWindow;
use duts_core::sets::{sample, SetSpec};
use duts_core::solver::{lp_oracle, solve_window, FitGrid, FitTask, SolverOptions, DEFAULT_FACETS};
use duts_core::text::fmt_f64;
use duts_core::Result;

pub const RELATIVE: f64 = 0.05;
pub const ABSOLUTE: f64 = 1e-9;

fn random_task(rng: &mut ChaCha8Rng) -> Result<FitTask> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let l = sample(&SetSpec::disk(c(0.0, 0.0), rng.random_range(0.4..1.0)), 8.0)?;
    let k_spec = if rng.random_bool(0.5) {
        SetSpec::disk(c(rng.random_range(1.6..3.0), rng.random_range(-1.0..1.0)), rng.random_range(0.2..0.5))
    } else {
        let a = c(rng.random_range(1.5..2.5), rng.random_range(-1.5..1.5));
        SetSpec::segment(a, a + c(rng.random_range(0.0..1.0), rng.random_range(-1.0..1.0)))
    };
    let k = sample(&k_spec, 8.0)?;
    let pole = c(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
    let scale = rng.random_range(0.1..10.0);
    let targets = k.points().iter().map(|z| scale / (z - pole)).collect();
    let low = rng.random_range(0..4);
    let high = low + rng.random_range(2..10);
    FitTask::new(
        vec![FitGrid::from_set("K", &k, targets)?, FitGrid::small_on("L", &l)?],
        DegreeWindow::new(low, high)?,
        c(0.0, 0.0),
    )
}

/// Prints one line per instance and a summary; returns the exit code.
pub fn run(seed: u64, count: usize) -> u8 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for i in 0..count {
        let outcome = random_task(&mut rng).and_then(|task| {
            let lawson = solve_window(&task, &SolverOptions::default())?;
            let lp = lp_oracle(&task, DEFAULT_FACETS)?;
            Ok((task.window(), task.point_count(), lawson.objective, lp.objective))
        });
        match outcome {
            Ok((w, points, a, b)) => {
                let ok = (a - b).abs() <= RELATIVE * b + ABSOLUTE;
                failures += usize::from(!ok);
                println!(
                    "instance {i} window ({}, {}) points {points} lawson {} lp {} {}",
                    w.low(),
                    w.high(),
                    fmt_f64(a),
                    fmt_f64(b),
                    if ok { "agree" } else { "DISAGREE" }
                );
            }
            Err(e) => {
                failures += 1;
                println!("instance {i} error: {e}");
            }
        }
    }
    println!("selftest seed {seed}: {} of {count} agree", count - failures);
    u8::from(failures > 0)
}
