//! Degree-window minimax fitting.
//!
//! Given grids with target values, finds `p` in
//! `span{(z - c)^k : low <= k <= high}` that approximately minimizes
//! `max_i |y_i - p(z_i)|` over all points of all grids. Grids whose role is
//! "stay small" simply carry zero targets, so the discrete version of
//! `d_{n,m}(f, K, L)` is a two-grid task.

mod basis;
mod lawson;
mod lp;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{check_finite, CenteredPolynomial, DegreeWindow};
use crate::sets::{check_separated, SampledSet};

use basis::WindowBasis;

pub use lawson::WEIGHT_FLOOR;

/// Largest instance the LP reference accepts.
pub const LP_MAX_BASIS: usize = 40;
pub const LP_MAX_POINTS: usize = 2000;
pub const DEFAULT_FACETS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Stop once the objective changes by less than this relative amount.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iters: 500,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::invalid("solver.tol", "must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("solver.max_iters", "must be at least 1"));
        }
        Ok(())
    }
}

/// One grid of a fit task with its target values.
#[derive(Clone, Debug, PartialEq)]
pub struct FitGrid {
    pub name: String,
    pub points: Vec<Complex64>,
    pub targets: Vec<Complex64>,
}

impl FitGrid {
    pub fn new(name: impl Into<String>, points: Vec<Complex64>, targets: Vec<Complex64>) -> Result<Self> {
        let name = name.into();
        if points.len() != targets.len() {
            return Err(Error::invalid(
                format!("{name}.targets"),
                format!("{} targets for {} points", targets.len(), points.len()),
            ));
        }
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        for (i, (z, y)) in points.iter().zip(&targets).enumerate() {
            check_finite(*z, &format!("{name}.points[{i}]"))?;
            check_finite(*y, &format!("{name}.targets[{i}]"))?;
        }
        Ok(FitGrid {
            name,
            points,
            targets,
        })
    }

    pub fn from_set(name: impl Into<String>, set: &SampledSet, targets: Vec<Complex64>) -> Result<Self> {
        FitGrid::new(name, set.points().to_vec(), targets)
    }

    /// Grid whose targets are all zero.
    pub fn small_on(name: impl Into<String>, set: &SampledSet) -> Result<Self> {
        FitGrid::new(name, set.points().to_vec(), vec![Complex64::new(0.0, 0.0); set.len()])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitTask {
    grids: Vec<FitGrid>,
    window: DegreeWindow,
    center: Complex64,
}

impl FitTask {
    pub fn new(grids: Vec<FitGrid>, window: DegreeWindow, center: Complex64) -> Result<Self> {
        check_finite(center, "center")?;
        if grids.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Ok(FitTask {
            grids,
            window,
            center,
        })
    }

    pub fn grids(&self) -> &[FitGrid] {
        &self.grids
    }

    pub fn window(&self) -> DegreeWindow {
        self.window
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn point_count(&self) -> usize {
        self.grids.iter().map(|g| g.points.len()).sum()
    }

    fn flatten(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let points = self.grids.iter().flat_map(|g| g.points.iter().copied()).collect();
        let targets = self.grids.iter().flat_map(|g| g.targets.iter().copied()).collect();
        (points, targets)
    }

    fn check_determined(&self) -> Result<()> {
        let points = self.point_count();
        let unknowns = self.window.width();
        if points < unknowns {
            return Err(Error::Underdetermined { points, unknowns });
        }
        Ok(())
    }

    /// Per-grid max modulus of `residuals`, which are laid out grid by grid.
    fn split_errors(&self, residuals: &[Complex64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.grids.len());
        let mut at = 0;
        for g in &self.grids {
            let n = g.points.len();
            out.push(residuals[at..at + n].iter().map(|r| r.norm()).fold(0.0, f64::max));
            at += n;
        }
        out
    }

    /// Per-grid errors of an explicit polynomial, evaluated from its
    /// coefficients.
    pub fn errors_of(&self, p: &CenteredPolynomial) -> Vec<f64> {
        self.grids
            .iter()
            .map(|g| {
                g.points
                    .iter()
                    .zip(&g.targets)
                    .map(|(z, y)| (y - p.evaluate(*z)).norm())
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproximationResult {
    pub polynomial: CenteredPolynomial,
    /// Discrete sup error on each grid, in task order.
    pub errors: Vec<f64>,
    /// Max of `errors`.
    pub objective: f64,
    /// Certified lower bound on the discrete minimax value (0 if unknown).
    pub lower_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl ApproximationResult {
    fn zero(task: &FitTask) -> Self {
        let errors = task.errors_of(&CenteredPolynomial::zero(task.center));
        ApproximationResult {
            polynomial: CenteredPolynomial::zero(task.center),
            objective: errors.iter().copied().fold(0.0, f64::max),
            lower_bound: 0.0,
            errors,
            iterations: 0,
            converged: true,
        }
    }
}

/// Lawson IRLS on the orthogonalized window basis.
///
/// The reported errors come from the solver's own basis representation;
/// [`FitTask::errors_of`] re-evaluates the returned monomial coefficients,
/// which can lose accuracy when the monomial expansion cancels heavily on
/// the grid.
pub fn solve_window(task: &FitTask, opts: &SolverOptions) -> Result<ApproximationResult> {
    let Some((basis, out)) = lawson_fit(task, opts)? else {
        return Ok(ApproximationResult::zero(task));
    };
    let polynomial = basis.to_polynomial(&out.coeffs)?;
    let errors = task.split_errors(&out.residuals);
    Ok(ApproximationResult {
        polynomial,
        objective: errors.iter().copied().fold(0.0, f64::max),
        errors,
        lower_bound: out.lower_bound.min(out.objective),
        iterations: out.iterations,
        converged: out.converged,
    })
}

/// `None` when the zero polynomial is the answer without solving.
fn lawson_fit(task: &FitTask, opts: &SolverOptions) -> Result<Option<(WindowBasis, lawson::LawsonOutcome)>> {
    opts.validate()?;
    task.check_determined()?;
    let (points, targets) = task.flatten();
    if targets.iter().all(|y| y.re == 0.0 && y.im == 0.0) {
        return Ok(None);
    }
    let basis = WindowBasis::build(&points, task.center, task.window);
    if basis.cols() == 0 {
        return Ok(None);
    }
    let out = lawson::run(&basis, &targets, opts);
    Ok(Some((basis, out)))
}

/// Polygonal LP reference solution. The reported objective is the true max
/// modulus of the LP polynomial, which exceeds the minimax value by at most
/// a factor `sec(pi / facets)`.
pub fn lp_oracle(task: &FitTask, facets: usize) -> Result<ApproximationResult> {
    task.check_determined()?;
    if facets < 3 {
        return Err(Error::invalid("facets", "need at least 3 half-planes"));
    }
    let points = task.point_count();
    if task.window.width() > LP_MAX_BASIS || points > LP_MAX_POINTS {
        return Err(Error::invalid(
            "task",
            format!(
                "too large for the LP reference ({} basis functions, {points} points)",
                task.window.width()
            ),
        ));
    }
    let (points, targets) = task.flatten();
    if targets.iter().all(|y| y.re == 0.0 && y.im == 0.0) {
        return Ok(ApproximationResult::zero(task));
    }
    let basis = WindowBasis::build(&points, task.center, task.window);
    let cols = basis.cols();
    let mut phi = Vec::with_capacity(points.len() * cols);
    for j in 0..cols {
        phi.extend_from_slice(basis.column(j));
    }
    let (coeffs, t) = lp::solve(&phi, points.len(), cols, &targets, facets)?;
    let fit = basis.combine(&coeffs);
    let residuals: Vec<Complex64> = targets.iter().zip(&fit).map(|(y, f)| y - f).collect();
    let errors = task.split_errors(&residuals);
    Ok(ApproximationResult {
        polynomial: basis.to_polynomial(&coeffs)?,
        objective: errors.iter().copied().fold(0.0, f64::max),
        errors,
        lower_bound: t.max(0.0),
        iterations: 0,
        converged: true,
    })
}

/// Value of a discrete `d_{n,m}` solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DEstimate {
    pub value: f64,
    pub lower_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Discrete `d_{n,m}(f, K, L)`: the window `(m, n)` objective with targets
/// `f` on `K` and zero on `L`, expanded about the origin. Only the value is
/// computed, so windows whose monomial coefficients would overflow still
/// have an estimate.
pub fn d_estimate(
    f_on_k: &[Complex64],
    k: &SampledSet,
    l: &SampledSet,
    n: usize,
    m: usize,
    opts: &SolverOptions,
) -> Result<DEstimate> {
    let task = d_task(f_on_k, k, l, n, m)?;
    Ok(match lawson_fit(&task, opts)? {
        None => DEstimate {
            value: 0.0,
            lower_bound: 0.0,
            iterations: 0,
            converged: true,
        },
        Some((_, out)) => DEstimate {
            value: out.objective,
            lower_bound: out.lower_bound.min(out.objective),
            iterations: out.iterations,
            converged: out.converged,
        },
    })
}

/// The two-grid task behind [`d_estimate`].
pub fn d_task(f_on_k: &[Complex64], k: &SampledSet, l: &SampledSet, n: usize, m: usize) -> Result<FitTask> {
    let window = DegreeWindow::new(m, n)?;
    check_separated(k, "K", l, "L")?;
    FitTask::new(
        vec![
            FitGrid::from_set("K", k, f_on_k.to_vec())?,
            FitGrid::small_on("L", l)?,
        ],
        window,
        Complex64::new(0.0, 0.0),
    )
}
