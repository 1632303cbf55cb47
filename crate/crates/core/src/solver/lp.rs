//! Polygonal linear-programming reference for the window problem.
//!
//! Every modulus constraint `|r_i| <= t` is replaced by the `facets`
//! half-planes `Re(e^{-i theta_j} r_i) <= t`, giving
//!
//! ```text
//! minimize t  subject to  G_r . x + t >= beta_r   for every (point, facet) row r
//! ```
//!
//! over the real and imaginary parts `x` of the basis coefficients. That
//! program has few variables and many rows, so its dual
//!
//! ```text
//! maximize beta . lambda  subject to  G^T lambda = 0,  sum lambda = 1,  lambda >= 0
//! ```
//!
//! has only `2k + 1` equality rows and is solved here with a dense revised
//! simplex. The primal solution is read off the final simplex multipliers.

use num_complex::Complex64;

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const REFACTOR_EVERY: usize = 40;
const MAX_PIVOTS: usize = 200_000;

/// Solves the polygonal program for basis values `phi` (column-major,
/// `rows x cols`) and targets `y`. Returns the coefficients and `t`.
pub(crate) fn solve(
    phi: &[Complex64],
    rows: usize,
    cols: usize,
    y: &[Complex64],
    facets: usize,
) -> Result<(Vec<Complex64>, f64)> {
    let m = 2 * cols + 1;
    let ncol = rows * facets;
    // column r of the dual constraint matrix, and its cost
    let dirs: Vec<Complex64> = (0..facets)
        .map(|j| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * j as f64 / facets as f64))
        .collect();
    let mut a = vec![0.0; m * ncol];
    let mut cost = vec![0.0; ncol];
    for i in 0..rows {
        for (j, e) in dirs.iter().enumerate() {
            let r = i * facets + j;
            let col = &mut a[r * m..(r + 1) * m];
            for k in 0..cols {
                let v = e * phi[k * rows + i];
                col[k] = v.re;
                col[cols + k] = -v.im;
            }
            col[2 * cols] = 1.0;
            cost[r] = (e * y[i]).re;
        }
    }
    let mut b = vec![0.0; m];
    b[2 * cols] = 1.0;

    let mut lp = Simplex::new(m, ncol, a, cost, b);
    lp.phase_one()?;
    lp.phase_two()?;
    let mult = lp.multipliers();
    let coeffs = (0..cols)
        .map(|k| Complex64::new(mult[k], mult[cols + k]))
        .collect();
    Ok((coeffs, mult[2 * cols]))
}

/// Dense revised simplex for `max c.x, A x = b, x >= 0` with `b >= 0`.
/// Artificial variables `ncol..ncol+m` start as the basis.
struct Simplex {
    m: usize,
    n: usize,
    a: Vec<f64>,
    c: Vec<f64>,
    b: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// Row-major `m x m` inverse of the basis matrix.
    binv: Vec<f64>,
    xb: Vec<f64>,
    pivots: usize,
}

impl Simplex {
    fn new(m: usize, n: usize, a: Vec<f64>, c: Vec<f64>, b: Vec<f64>) -> Self {
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let mut in_basis = vec![false; n + m];
        in_basis[n..].iter_mut().for_each(|x| *x = true);
        Simplex {
            m,
            n,
            a,
            c,
            xb: b.clone(),
            b,
            basis: (n..n + m).collect(),
            in_basis,
            binv,
            pivots: 0,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n
    }

    fn column(&self, j: usize) -> Vec<f64> {
        if self.is_artificial(j) {
            let mut e = vec![0.0; self.m];
            e[j - self.n] = 1.0;
            e
        } else {
            self.a[j * self.m..(j + 1) * self.m].to_vec()
        }
    }

    /// `y . A_j` without materializing the column.
    fn col_dot(&self, j: usize, y: &[f64]) -> f64 {
        if self.is_artificial(j) {
            y[j - self.n]
        } else {
            self.a[j * self.m..(j + 1) * self.m]
                .iter()
                .zip(y)
                .map(|(a, b)| a * b)
                .sum()
        }
    }

    fn phase_cost(&self, j: usize, phase_one: bool) -> f64 {
        match (phase_one, self.is_artificial(j)) {
            (true, true) => -1.0,
            (true, false) => 0.0,
            (false, true) => 0.0,
            (false, false) => self.c[j],
        }
    }

    /// `y = c_B B^{-1}`.
    fn duals(&self, phase_one: bool) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &j) in self.basis.iter().enumerate() {
            let cb = self.phase_cost(j, phase_one);
            if cb != 0.0 {
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk += cb * self.binv[i * m + k];
                }
            }
        }
        y
    }

    fn multipliers(&self) -> Vec<f64> {
        self.duals(false)
    }

    fn phase_one(&mut self) -> Result<()> {
        self.iterate(true)?;
        let infeasibility: f64 = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter(|(j, _)| self.is_artificial(**j))
            .map(|(_, x)| x.abs())
            .sum();
        if infeasibility > 1e-9 {
            return Err(Error::Lp(format!(
                "dual program infeasible (residual {infeasibility:.3e})"
            )));
        }
        // pivot zero-level artificials out where a structural column allows it
        for row in 0..self.m {
            if !self.is_artificial(self.basis[row]) {
                continue;
            }
            let m = self.m;
            let pick = (0..self.n).find(|&j| {
                !self.in_basis[j] && {
                    let alpha = self.col_dot(j, &self.binv[row * m..(row + 1) * m]);
                    alpha.abs() > 1e-7
                }
            });
            if let Some(j) = pick {
                let alpha = self.ftran(j);
                self.pivot(row, j, &alpha);
            }
        }
        Ok(())
    }

    fn phase_two(&mut self) -> Result<()> {
        self.iterate(false)
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let col = self.column(j);
        (0..m)
            .map(|i| (0..m).map(|k| self.binv[i * m + k] * col[k]).sum())
            .collect()
    }

    fn iterate(&mut self, phase_one: bool) -> Result<()> {
        let mut degenerate_run = 0usize;
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(Error::Lp("pivot limit reached".into()));
            }
            let y = self.duals(phase_one);
            let bland = degenerate_run > 50;
            let mut enter = None;
            let mut best = COST_TOL;
            let candidates = if phase_one { self.n + self.m } else { self.n };
            for j in 0..candidates {
                if self.in_basis[j] {
                    continue;
                }
                let d = self.phase_cost(j, phase_one) - self.col_dot(j, &y);
                if d > best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(j) = enter else {
                return Ok(());
            };
            let alpha = self.ftran(j);
            // ratio test; zero-level artificials left in the basis must stay at zero
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let stuck = !phase_one && self.is_artificial(self.basis[i]);
                let ratio = if stuck && alpha[i].abs() > PIVOT_TOL {
                    0.0
                } else if alpha[i] > PIVOT_TOL {
                    self.xb[i].max(0.0) / alpha[i]
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - 1e-14
                            || (ratio <= lr + 1e-14
                                && if bland {
                                    self.basis[i] < self.basis[li]
                                } else {
                                    alpha[i].abs() > alpha[li].abs()
                                })
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, ratio)) = leave else {
                return Err(Error::Lp("dual program unbounded".into()));
            };
            degenerate_run = if ratio <= 1e-14 { degenerate_run + 1 } else { 0 };
            self.pivot(row, j, &alpha);
        }
    }

    fn pivot(&mut self, row: usize, enter: usize, alpha: &[f64]) {
        let m = self.m;
        let p = alpha[row];
        for k in 0..m {
            self.binv[row * m + k] /= p;
        }
        self.xb[row] /= p;
        for (i, &f) in alpha.iter().enumerate().take(m) {
            if i == row || f == 0.0 {
                continue;
            }
            for k in 0..m {
                self.binv[i * m + k] -= f * self.binv[row * m + k];
            }
            self.xb[i] -= f * self.xb[row];
        }
        self.in_basis[self.basis[row]] = false;
        self.in_basis[enter] = true;
        self.basis[row] = enter;
        self.pivots += 1;
        if self.pivots.is_multiple_of(REFACTOR_EVERY) {
            self.refactor();
        }
    }

    /// Recompute `B^{-1}` and `x_B` from scratch by Gauss-Jordan with
    /// partial pivoting to shed accumulated drift.
    fn refactor(&mut self) {
        let m = self.m;
        let mut bm = vec![0.0; m * m];
        for (i, &j) in self.basis.iter().enumerate() {
            let col = self.column(j);
            for k in 0..m {
                bm[k * m + i] = col[k];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let piv = (c..m)
                .max_by(|&r1, &r2| bm[r1 * m + c].abs().total_cmp(&bm[r2 * m + c].abs()))
                .unwrap_or(c);
            if bm[piv * m + c].abs() < 1e-300 {
                return; // keep the product-form inverse
            }
            for k in 0..m {
                bm.swap(c * m + k, piv * m + k);
                inv.swap(c * m + k, piv * m + k);
            }
            let d = bm[c * m + c];
            for k in 0..m {
                bm[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for r in 0..m {
                if r != c {
                    let f = bm[r * m + c];
                    if f != 0.0 {
                        for k in 0..m {
                            bm[r * m + k] -= f * bm[c * m + k];
                            inv[r * m + k] -= f * inv[c * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.xb = (0..m)
            .map(|i| (0..m).map(|k| self.binv[i * m + k] * self.b[k]).sum())
            .collect();
    }
}
