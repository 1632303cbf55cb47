//! Joint polynomial approximation: one polynomial close to `g` on `L` and to
//! `f1` on `K1`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{check_finite, CenteredPolynomial, DegreeWindow};
use crate::sets::{check_separated, SampledSet};
use crate::solver::{solve_window, FitGrid, FitTask, SolverOptions};
use crate::target::TargetFunction;

/// First degree of the doubling schedule.
pub const FIRST_DEGREE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    epsilon: f64,
    s: u64,
}

impl Tolerances {
    pub fn new(epsilon: f64, s: u64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::invalid("epsilon", "must be positive"));
        }
        if s == 0 {
            return Err(Error::invalid("s", "must be at least 1"));
        }
        Ok(Tolerances { epsilon, s })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    /// `1 / s`
    pub fn inv_s(&self) -> f64 {
        1.0 / self.s as f64
    }

    /// `min(epsilon / 2, 1 / (2 s))`
    pub fn window_threshold(&self) -> f64 {
        (self.epsilon / 2.0).min(self.inv_s() / 2.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RungeResult {
    pub polynomial: CenteredPolynomial,
    /// Schedule degree `n` of the accepted solve.
    pub schedule_degree: usize,
    /// Errors on `L` and on `K1`, evaluated from the coefficients.
    pub error_l: f64,
    pub error_k1: f64,
}

/// Solves the windows `(0, n)` about `center` for `n = 8, 16, 32, ..`
/// until the coefficient-evaluated errors drop below `epsilon / 2` on `L`
/// and `1 / (2 s)` on `K1`.
#[allow(clippy::too_many_arguments)]
pub fn joint_approximate(
    g: &TargetFunction,
    l: &SampledSet,
    f1: &TargetFunction,
    k1: &SampledSet,
    tol: &Tolerances,
    center: Complex64,
    max_degree: usize,
    opts: &SolverOptions,
) -> Result<RungeResult> {
    check_finite(center, "center")?;
    check_separated(k1, "K1", l, "L")?;
    let grids = vec![
        FitGrid::from_set("L", l, g.values_on(l.points())?)?,
        FitGrid::from_set("K1", k1, f1.values_on(k1.points())?)?,
    ];
    let bounds = [tol.epsilon() / 2.0, tol.inv_s() / 2.0];
    let mut last = vec![f64::INFINITY; 2];
    let mut n = FIRST_DEGREE.min(max_degree);
    loop {
        let task = FitTask::new(grids.clone(), DegreeWindow::new(0, n)?, center)?;
        let r = solve_window(&task, opts)?;
        // drop coefficients below the degree threshold so the stored support
        // matches deg p
        let polynomial = match r.polynomial.degree() {
            d if d < 0 => CenteredPolynomial::zero(center),
            d => r.polynomial.partial_sum(d as usize),
        };
        let errors = task.errors_of(&polynomial);
        if errors[0] < bounds[0] && errors[1] < bounds[1] {
            return Ok(RungeResult {
                polynomial,
                schedule_degree: n,
                error_l: errors[0],
                error_k1: errors[1],
            });
        }
        last = errors;
        if n >= max_degree {
            break;
        }
        n = (2 * n).min(max_degree);
    }
    Err(Error::ApproximationFailure {
        max_degree,
        best_errors: last,
        bounds: bounds.to_vec(),
    })
}
