//! Discretely orthonormal basis for the window span
//! `{(z - c)^k : low <= k <= high}` on a point set.
//!
//! Points are scaled to `u = (z - c) / rho` with `max |u| = 1`, the first
//! column is `u^low`, and every later column is `u * q_{j-1}` orthogonalized
//! against all previous columns (two Gram-Schmidt passes). Multiplying by
//! `u` never lowers the smallest power, so each column stays inside the
//! window span. The monomial coefficients of every column are tracked
//! alongside so solutions can be mapped back to `(z - c)^k` coefficients.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{cdot, cnorm};
use crate::poly::{CenteredPolynomial, DegreeWindow};

/// A new column whose orthogonal remainder is below this fraction of its
/// norm carries no resolvable information on the grid.
const RANK_DROP: f64 = 1e-12;

pub(crate) struct WindowBasis {
    rows: usize,
    cols: usize,
    low: usize,
    center: Complex64,
    /// Column-major `rows x cols` values at the points.
    q: Vec<Complex64>,
    /// Column-major `cols x cols`; entry `(i, j)` is the coefficient of
    /// `(z - c)^(low + i)` in column `j`.
    mono: Vec<Complex64>,
    /// Degree at which the coefficient map stopped being representable.
    overflow_at: Option<usize>,
}

impl WindowBasis {
    pub(crate) fn build(points: &[Complex64], center: Complex64, window: DegreeWindow) -> Self {
        let rows = points.len();
        let want = window.width();
        let low = window.low();
        let rho = points
            .iter()
            .map(|z| (z - center).norm())
            .fold(0.0, f64::max);
        let rho = if rho > 0.0 { rho } else { 1.0 };
        let u: Vec<Complex64> = points.iter().map(|z| (z - center) / rho).collect();
        let sqrt_n = (rows as f64).sqrt();

        let mut q: Vec<Complex64> = Vec::with_capacity(rows * want);
        let mut mono: Vec<Complex64> = Vec::with_capacity(want * want);

        let first: Vec<Complex64> = u.iter().map(|x| x.powi(low as i32)).collect();
        let s = cnorm(&first) / sqrt_n;
        if s == 0.0 {
            return WindowBasis {
                rows,
                cols: 0,
                low,
                center,
                q,
                mono,
                overflow_at: None,
            };
        }
        q.extend(first.iter().map(|x| x / s));
        let lead = scaled_power(rho, low) / s;
        let mut overflow_at = (!lead.is_finite()).then_some(low);
        let mut col0 = vec![Complex64::new(0.0, 0.0); want];
        col0[0] = Complex64::new(lead, 0.0);
        mono.extend(col0);

        let mut cols = 1;
        let mut h = vec![Complex64::new(0.0, 0.0); want];
        while cols < want {
            let prev = &q[(cols - 1) * rows..cols * rows];
            let mut v: Vec<Complex64> = prev.iter().zip(&u).map(|(a, b)| a * b).collect();
            let before = cnorm(&v);
            h[..cols].iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
            for _pass in 0..2 {
                for i in 0..cols {
                    let qi = &q[i * rows..(i + 1) * rows];
                    let hij = cdot(qi, &v) / (rows as f64);
                    for (vv, qq) in v.iter_mut().zip(qi) {
                        *vv -= hij * qq;
                    }
                    h[i] += hij;
                }
            }
            let after = cnorm(&v);
            if !(after > RANK_DROP * before) {
                break;
            }
            let hn = after / sqrt_n;
            q.extend(v.iter().map(|x| x / hn));

            // coefficients: (u * q_{j-1} - sum h_i q_i) / hn, with u = (z - c) / rho
            let mut col = vec![Complex64::new(0.0, 0.0); want];
            let prev_mono = &mono[(cols - 1) * want..cols * want];
            for i in 0..want - 1 {
                col[i + 1] = prev_mono[i] / rho;
            }
            for (i, hi) in h[..cols].iter().enumerate() {
                let ci = &mono[i * want..(i + 1) * want];
                for (a, b) in col.iter_mut().zip(ci) {
                    *a -= hi * b;
                }
            }
            for a in col.iter_mut() {
                *a /= hn;
            }
            if overflow_at.is_none() && col.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
                overflow_at = Some(low + cols);
            }
            mono.extend(col);
            cols += 1;
        }
        // compact the coefficient block to cols x cols
        let mono = (0..cols)
            .flat_map(|j| mono[j * want..j * want + cols].iter().copied())
            .collect();
        WindowBasis {
            rows,
            cols,
            low,
            center,
            q,
            mono,
            overflow_at,
        }
    }

    pub(crate) fn rows(&self) -> usize {
        self.rows
    }

    pub(crate) fn cols(&self) -> usize {
        self.cols
    }

    pub(crate) fn column(&self, j: usize) -> &[Complex64] {
        &self.q[j * self.rows..(j + 1) * self.rows]
    }

    /// Values of `sum d_j q_j` at the points.
    pub(crate) fn combine(&self, d: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for (j, dj) in d.iter().enumerate() {
            for (o, q) in out.iter_mut().zip(self.column(j)) {
                *o += dj * q;
            }
        }
        out
    }

    pub(crate) fn to_polynomial(&self, d: &[Complex64]) -> Result<CenteredPolynomial> {
        let zero = Complex64::new(0.0, 0.0);
        if self.cols == 0 || d.iter().all(|x| *x == zero) {
            return Ok(CenteredPolynomial::zero(self.center));
        }
        if let Some(k) = self.overflow_at {
            return Err(Error::invalid(
                "window",
                format!("monomial coefficients overflow at degree {k}; reduce the high bound"),
            ));
        }
        let mut coeffs = vec![zero; self.low + self.cols];
        for (j, dj) in d.iter().enumerate() {
            let col = &self.mono[j * self.cols..(j + 1) * self.cols];
            for (i, c) in col.iter().enumerate() {
                coeffs[self.low + i] += dj * c;
            }
        }
        CenteredPolynomial::new(self.center, coeffs)
    }
}

/// `rho^(-k)` without intermediate overflow where the result is finite.
fn scaled_power(rho: f64, k: usize) -> f64 {
    (-(k as f64) * rho.ln()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::cdot;

    fn circle(n: usize, r: f64, c: Complex64) -> Vec<Complex64> {
        (0..n)
            .map(|j| c + Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / n as f64))
            .collect()
    }

    #[test]
    fn columns_are_orthonormal() {
        let mut pts = circle(80, 0.5, Complex64::new(0.0, 0.0));
        pts.extend(circle(60, 0.5, Complex64::new(3.0, 0.0)));
        let b = WindowBasis::build(&pts, Complex64::new(0.0, 0.0), DegreeWindow::new(3, 30).unwrap());
        assert_eq!(b.cols(), 28);
        let n = b.rows() as f64;
        for i in 0..b.cols() {
            for j in 0..b.cols() {
                let g = cdot(b.column(i), b.column(j)) / n;
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).norm() < 1e-10, "({i},{j}) {g}");
            }
        }
    }

    #[test]
    fn monomial_map_reproduces_column_values() {
        let pts = circle(40, 1.0, Complex64::new(0.2, 0.1));
        let c = Complex64::new(0.2, 0.1);
        let b = WindowBasis::build(&pts, c, DegreeWindow::new(2, 9).unwrap());
        let d: Vec<Complex64> = (0..b.cols())
            .map(|k| Complex64::new(1.0 / (k + 1) as f64, -0.5))
            .collect();
        let p = b.to_polynomial(&d).unwrap();
        assert!(p.low_degree() >= 2 && p.degree() <= 9);
        let vals = b.combine(&d);
        for (z, v) in pts.iter().zip(&vals) {
            assert!((p.evaluate(*z) - v).norm() < 1e-12);
        }
    }

    #[test]
    fn rank_is_capped_by_distinct_points() {
        let pts = circle(5, 1.0, Complex64::new(0.0, 0.0));
        let b = WindowBasis::build(&pts, Complex64::new(0.0, 0.0), DegreeWindow::new(0, 9).unwrap());
        assert_eq!(b.cols(), 5);
    }
}
