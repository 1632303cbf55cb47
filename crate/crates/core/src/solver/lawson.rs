//! Lawson's iteratively reweighted least squares for the discrete complex
//! Chebyshev problem.
//!
//! Each sweep solves a weighted least-squares fit by Householder QR and
//! multiplies every weight by its residual modulus. With weights summing to
//! one, the weighted residual norm of each sweep is a lower bound on the
//! minimax value while the max residual is an upper bound.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::basis::WindowBasis;
use super::SolverOptions;
use crate::numeric::pairwise_sum;

pub const WEIGHT_FLOOR: f64 = 1e-300;

/// Rows whose weight is below this fraction of the largest contribute
/// nothing at double precision and are left out of the factorization.
const ACTIVE_RATIO: f64 = 1e-32;

pub(crate) struct LawsonOutcome {
    pub coeffs: Vec<Complex64>,
    pub residuals: Vec<Complex64>,
    pub objective: f64,
    pub lower_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn run(basis: &WindowBasis, targets: &[Complex64], opts: &SolverOptions) -> LawsonOutcome {
    let n = basis.rows();
    let k = basis.cols();
    let mut weights = vec![1.0 / n as f64; n];
    let mut best: Option<(Vec<Complex64>, Vec<Complex64>, f64)> = None;
    let mut lower: f64 = 0.0;
    let mut prev = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iters {
        let Some(d) = weighted_lstsq(basis, targets, &weights) else {
            break;
        };
        iterations += 1;
        let fit = basis.combine(&d);
        let residuals: Vec<Complex64> = targets.iter().zip(&fit).map(|(y, f)| y - f).collect();
        let moduli: Vec<f64> = residuals.iter().map(|r| r.norm()).collect();
        let objective = moduli.iter().copied().fold(0.0, f64::max);
        let wsq: Vec<f64> = weights
            .iter()
            .zip(&moduli)
            .map(|(w, m)| w * m * m)
            .collect();
        lower = lower.max(pairwise_sum(&wsq).sqrt().min(objective));

        if best.as_ref().is_none_or(|b| objective < b.2) {
            best = Some((d, residuals, objective));
        }
        let best_obj = best.as_ref().map_or(objective, |b| b.2);
        if objective == 0.0
            || (prev - objective).abs() <= opts.tol * objective
            || best_obj - lower <= opts.tol * best_obj
        {
            converged = true;
            break;
        }
        prev = objective;

        for (w, m) in weights.iter_mut().zip(&moduli) {
            *w = (*w * m).max(WEIGHT_FLOOR);
        }
        let total = pairwise_sum(&weights);
        for w in weights.iter_mut() {
            *w = (*w / total).max(WEIGHT_FLOOR);
        }
    }

    match best {
        Some((coeffs, residuals, objective)) => LawsonOutcome {
            coeffs,
            residuals,
            objective,
            lower_bound: lower,
            iterations,
            converged,
        },
        None => LawsonOutcome {
            coeffs: vec![Complex64::new(0.0, 0.0); k],
            residuals: targets.to_vec(),
            objective: targets.iter().map(|y| y.norm()).fold(0.0, f64::max),
            lower_bound: 0.0,
            iterations,
            converged: false,
        },
    }
}

/// Least-squares coefficients for `min sum w_i |y_i - (Q d)_i|^2`.
fn weighted_lstsq(basis: &WindowBasis, targets: &[Complex64], weights: &[f64]) -> Option<Vec<Complex64>> {
    let k = basis.cols();
    let wmax = weights.iter().copied().fold(0.0, f64::max);
    let mut active: Vec<usize> = (0..weights.len())
        .filter(|&i| weights[i] >= ACTIVE_RATIO * wmax)
        .collect();
    if active.len() <= k {
        active = (0..weights.len()).collect();
    }
    let m = active.len();
    let sw: Vec<f64> = active.iter().map(|&i| weights[i].sqrt()).collect();
    let a = DMatrix::<Complex64>::from_fn(m, k, |r, c| basis.column(c)[active[r]] * sw[r]);
    let mut b = DVector::<Complex64>::from_fn(m, |r, _| targets[active[r]] * sw[r]);
    let qr = a.qr();
    qr.q_tr_mul(&mut b);
    let r = qr.r();
    let rhs = b.rows(0, k).into_owned();
    let x = r.solve_upper_triangular(&rhs)?;
    if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Some(x.iter().copied().collect())
    } else {
        None
    }
}
