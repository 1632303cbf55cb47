//! Assembly of `f = P(z - zeta0) + p(z)` whose partial sums at two indices
//! approximate two targets.
//!
//! `p` comes from the joint Runge step. For each candidate `mu` of the
//! ratio-doubling subsequence (with `mu >= deg p`) the window problem
//! `f2 - p` on `K2`, `0` on `L`, over `span{(z - zeta0)^k}` is solved on
//! nested windows `(mu + 1, h)` with `h` growing towards `lambda_mu`. Every
//! such polynomial is admissible for the full window `(mu + 1, lambda_mu)`,
//! and the smallest adequate `h` keeps the monomial coefficients as tame as
//! possible. Window errors are always re-evaluated from the coefficients,
//! because that is the polynomial the certificate records.

use num_complex::Complex64;

use crate::certificate::{residual, ConstructionCertificate, GridRecord};
use crate::error::{Error, Result};
use crate::poly::{CenteredPolynomial, DegreeWindow, DEFAULT_MAX_DEGREE};
use crate::runge::{joint_approximate, Tolerances};
use crate::sequence::{check_ratio, refusal, SequenceSpec, Subsequence, Verdict};
use crate::sets::{check_separated, SampledSet, SetSpec};
use crate::solver::{solve_window, FitGrid, FitTask, SolverOptions};
use crate::target::TargetFunction;

/// Relative tolerance of the low truncation identity.
pub const IDENTITY_RELATIVE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Caps {
    pub max_candidates: usize,
    pub max_window_degree: usize,
    pub max_runge_degree: usize,
    /// Scan horizon for the ratio check and the subsequence.
    pub horizon: u64,
    pub solver: SolverOptions,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_candidates: 12,
            max_window_degree: DEFAULT_MAX_DEGREE,
            max_runge_degree: DEFAULT_MAX_DEGREE,
            horizon: 1 << 20,
            solver: SolverOptions::default(),
        }
    }
}

impl Caps {
    pub fn validate(&self) -> Result<()> {
        if self.max_candidates == 0 {
            return Err(Error::invalid("caps.max_candidates", "must be at least 1"));
        }
        if self.max_window_degree == 0 {
            return Err(Error::invalid("caps.max_window_degree", "must be at least 1"));
        }
        self.solver.validate()
    }
}

/// Everything the construction consumes.
#[derive(Clone, Debug)]
pub struct Problem {
    pub g: TargetFunction,
    pub l: SampledSet,
    pub f1: TargetFunction,
    pub k1: SampledSet,
    pub f2: TargetFunction,
    pub k2: SampledSet,
    pub zeta0: Complex64,
    pub sequence: SequenceSpec,
    pub tol: Tolerances,
    /// Only used to check that `K1` and `K2` avoid it.
    pub omega: Option<SetSpec>,
}

pub fn construct(problem: &Problem, caps: &Caps) -> Result<ConstructionCertificate> {
    caps.validate()?;
    let horizon = problem
        .sequence
        .max_index()
        .map_or(caps.horizon, |m| m.min(caps.horizon));
    let check = check_ratio(&problem.sequence, horizon)?;
    if check.verdict == Verdict::BoundedSoFar {
        return Err(refusal(&check));
    }
    let Problem {
        g,
        l,
        f1,
        k1,
        f2,
        k2,
        zeta0,
        sequence,
        tol,
        omega,
    } = problem;
    let zeta0 = *zeta0;
    if !l.spec().interior_contains(zeta0) {
        return Err(Error::invalid("zeta0", "must lie in the interior of L"));
    }
    check_separated(k1, "K1", l, "L")?;
    check_separated(k2, "K2", l, "L")?;
    if let Some(omega) = omega {
        for (name, set) in [("K1", k1), ("K2", k2)] {
            if let Some(z) = set.points().iter().find(|z| omega.contains(**z, 0.0)) {
                return Err(Error::invalid(name, format!("meets omega at {z}")));
            }
        }
    }

    let runge = joint_approximate(g, l, f1, k1, tol, zeta0, caps.max_runge_degree, &caps.solver)?;
    let p = runge.polynomial;
    let p_degree = p.degree();

    let p_on_k2 = p_values(&p, k2);
    let h_on_k2: Vec<Complex64> = f2
        .values_on(k2.points())?
        .iter()
        .zip(&p_on_k2)
        .map(|(y, v)| y - v)
        .collect();
    let grids = vec![
        FitGrid::from_set("K2", k2, h_on_k2)?,
        FitGrid::small_on("L", l)?,
    ];
    let points = k2.len() + l.len();
    let threshold = tol.window_threshold();

    let mut walk = Subsequence::new(sequence, horizon);
    let mut trace = Vec::new();
    let mut n0 = 0u64;
    let mut tried = 0;
    while tried < caps.max_candidates {
        let (mu, lambda_mu) = match walk.next_index() {
            Ok(x) => x,
            Err(Error::SubsequenceExhausted { .. }) => break,
            Err(e) => return Err(e),
        };
        n0 += 1;
        if (mu as i64) < p_degree {
            continue;
        }
        tried += 1;
        let low = mu as usize + 1;
        let top = (lambda_mu.min(caps.max_window_degree as u64) as usize).min(mu as usize + points);
        let mut best = f64::INFINITY;
        let mut high = low;
        while high <= top {
            let task = FitTask::new(grids.clone(), DegreeWindow::new(low, high)?, zeta0)?;
            let big_p = solve_window(&task, &caps.solver)?.polynomial;
            let window_error = task.errors_of(&big_p).into_iter().fold(0.0, f64::max);
            best = best.min(window_error);
            if window_error < threshold {
                let f = big_p.add(&p);
                let cert = assemble(problem, &p, f, runge.schedule_degree, (n0, mu, lambda_mu), high, window_error)?;
                if cert.residual_l < tol.epsilon()
                    && cert.residual_k1 < tol.inv_s()
                    && cert.residual_k2 < tol.inv_s()
                {
                    return Ok(cert);
                }
            }
            // wider windows only amplify coefficient rounding from here on
            if rounding_floor(&big_p, task.grids()) > threshold || high == top {
                break;
            }
            high = (high + ((high - low) / 8).max(1)).min(top);
        }
        trace.push((mu, lambda_mu, best));
    }
    Err(Error::CandidatesExhausted { threshold, trace })
}

fn p_values(p: &CenteredPolynomial, set: &SampledSet) -> Vec<Complex64> {
    set.points().iter().map(|z| p.evaluate(*z)).collect()
}

/// Size of the evaluation error that rounding the coefficients to doubles
/// can cause on the grids: `eps * max sum |a_k| |z - c|^k`.
fn rounding_floor(p: &CenteredPolynomial, grids: &[FitGrid]) -> f64 {
    let c = p.center();
    grids
        .iter()
        .flat_map(|g| g.points.iter())
        .map(|z| {
            let r = (z - c).norm();
            p.coeffs().iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
        })
        .fold(0.0, f64::max)
        * f64::EPSILON
}

fn assemble(
    problem: &Problem,
    p: &CenteredPolynomial,
    f: CenteredPolynomial,
    runge_degree: usize,
    (n0, mu, lambda_mu): (u64, u64, u64),
    window_high: usize,
    window_error: f64,
) -> Result<ConstructionCertificate> {
    let cert = ConstructionCertificate {
        zeta0: problem.zeta0,
        epsilon: problem.tol.epsilon(),
        s: problem.tol.s(),
        sequence: problem.sequence.clone(),
        n0,
        mu,
        lambda_mu,
        window_high: window_high as u64,
        runge_degree: runge_degree as u64,
        residual_l: residual(&f, &problem.g, &problem.l)?,
        residual_k1: residual(&f.partial_sum(mu as usize), &problem.f1, &problem.k1)?,
        residual_k2: residual(&f, &problem.f2, &problem.k2)?,
        window_error,
        l: GridRecord::of(&problem.l),
        k1: GridRecord::of(&problem.k1),
        k2: GridRecord::of(&problem.k2),
        g: problem.g.clone(),
        f1: problem.f1.clone(),
        f2: problem.f2.clone(),
        p: p.clone(),
        f,
    };
    if let Some(why) = cert.identity_failure() {
        return Err(Error::Internal(why));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::sample;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_problem(f2: TargetFunction, sequence: &str) -> Problem {
        let d = 12.0;
        Problem {
            g: TargetFunction::zero(),
            l: sample(&SetSpec::disk(c(0.0, 0.0), 0.5), d).unwrap(),
            f1: TargetFunction::zero(),
            k1: sample(&SetSpec::disk(c(3.0, 0.0), 0.5), d).unwrap(),
            f2,
            k2: sample(&SetSpec::segment(c(0.0, 2.0), c(0.0, 3.0)), d).unwrap(),
            zeta0: c(0.0, 0.0),
            sequence: SequenceSpec::formula(sequence).unwrap(),
            tol: Tolerances::new(1e-2, 100).unwrap(),
            omega: None,
        }
    }

    #[test]
    fn zero_targets_give_the_zero_certificate() {
        let cert = construct(&small_problem(TargetFunction::zero(), "n^2"), &Caps::default()).unwrap();
        assert!(cert.f.is_zero() && cert.p.is_zero());
        assert_eq!((cert.n0, cert.mu, cert.lambda_mu), (1, 2, 4));
        assert_eq!(
            (cert.residual_l, cert.residual_k1, cert.residual_k2),
            (0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn window_target_vanishes_when_f2_continues_p() {
        let mut prob = small_problem(TargetFunction::zero(), "n^2");
        prob.f1 = TargetFunction::constant(c(1.0, 0.0));
        let p = joint_approximate(
            &prob.g,
            &prob.l,
            &prob.f1,
            &prob.k1,
            &prob.tol,
            prob.zeta0,
            2048,
            &SolverOptions::default(),
        )
        .unwrap()
        .polynomial;
        prob.f2 = TargetFunction::Polynomial(p.clone());
        let cert = construct(&prob, &Caps::default()).unwrap();
        assert_eq!(cert.f, p);
        assert_eq!(cert.window_error, 0.0);
    }

    #[test]
    fn bounded_ratio_is_refused_before_any_solve() {
        // the geometry is invalid too; refusal must come first
        let mut prob = small_problem(TargetFunction::identity(), "2*n");
        prob.zeta0 = c(10.0, 0.0);
        assert!(matches!(
            construct(&prob, &Caps::default()),
            Err(Error::BoundedRatio { .. })
        ));
    }

    #[test]
    fn center_outside_l_is_rejected() {
        let mut prob = small_problem(TargetFunction::identity(), "n^2");
        prob.zeta0 = c(0.5, 0.0);
        assert!(matches!(construct(&prob, &Caps::default()), Err(Error::Invalid { .. })));
    }

    #[test]
    fn omega_overlap_is_rejected() {
        let mut prob = small_problem(TargetFunction::identity(), "n^2");
        prob.omega = Some(SetSpec::disk(c(0.0, 0.0), 2.2));
        match construct(&prob, &Caps::default()).unwrap_err() {
            Error::Invalid { field, .. } => assert_eq!(field, "K2"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn exhausted_candidates_carry_a_trace() {
        let mut prob = small_problem(TargetFunction::identity(), "n^2");
        prob.f1 = TargetFunction::constant(c(1.0, 0.0));
        let caps = Caps {
            max_candidates: 1,
            max_window_degree: 18,
            ..Caps::default()
        };
        match construct(&prob, &caps).unwrap_err() {
            Error::CandidatesExhausted { trace, .. } => {
                assert_eq!(trace.len(), 1);
                assert!(trace[0].2 > 5e-3);
            }
            e => panic!("{e}"),
        }
    }
}
