//! Decay of window approximation errors `d_{tau, sigma}(f, K, L)^(1/tau)`
//! along a schedule of windows.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sequence::Formula;
use crate::sets::{check_separated, SampledSet};
use crate::solver::{d_estimate, SolverOptions};
use crate::target::TargetFunction;
use crate::text::fmt_f64;

pub const CSV_HEADER: &str = "tau,sigma,d_value,d_root,converged";

/// Windows `(sigma, tau)` with `tau > sigma > 1` and `tau` strictly
/// increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pairs: Vec<(usize, usize)>,
}

impl Schedule {
    /// Pairs are `(tau, sigma)`.
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("schedule", "is empty"));
        }
        for (i, &(tau, sigma)) in pairs.iter().enumerate() {
            if sigma < 2 || tau <= sigma {
                return Err(Error::invalid(
                    format!("schedule[{i}]"),
                    format!("need tau > sigma > 1, got tau = {tau}, sigma = {sigma}"),
                ));
            }
            if i > 0 && tau <= pairs[i - 1].0 {
                return Err(Error::invalid(
                    format!("schedule[{i}].tau"),
                    "tau must be strictly increasing",
                ));
            }
        }
        Ok(Schedule { pairs })
    }

    /// `(tau(n), sigma(n))` for `n` in `first..=last`.
    pub fn from_formulas(tau: &Formula, sigma: &Formula, first: u64, last: u64) -> Result<Self> {
        if first == 0 || first > last {
            return Err(Error::invalid("schedule.n", "need 1 <= first <= last"));
        }
        let as_usize = |v: i128, what: &str, n: u64| {
            usize::try_from(v).map_err(|_| {
                Error::invalid(format!("schedule.{what}"), format!("value {v} at n = {n} out of range"))
            })
        };
        let pairs = (first..=last)
            .map(|n| Ok((as_usize(tau.eval(n)?, "tau", n)?, as_usize(sigma.eval(n)?, "sigma", n)?)))
            .collect::<Result<Vec<_>>>()?;
        Schedule::new(pairs)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeRow {
    pub tau: usize,
    pub sigma: usize,
    pub d_value: f64,
    pub d_root: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
    /// Max `d_root` over the second half of the rows.
    pub theta_hat: f64,
    /// Max `d_root` over the first half of the rows.
    pub head_max: f64,
}

impl ProbeReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("format: 1\n");
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.tau,
                r.sigma,
                fmt_f64(r.d_value),
                fmt_f64(r.d_root),
                r.converged
            );
        }
        out
    }
}

/// One discrete `d_{tau, sigma}` solve per schedule entry. Rows run on the
/// current rayon pool; each row is an independent deterministic solve, so
/// the table does not depend on the number of threads.
pub fn probe(
    f: &TargetFunction,
    k: &SampledSet,
    l: &SampledSet,
    sched: &Schedule,
    opts: &SolverOptions,
) -> Result<ProbeReport> {
    if !l.spec().interior_contains(Complex64::new(0.0, 0.0)) {
        return Err(Error::invalid("L", "must contain 0 in its interior"));
    }
    check_separated(k, "K", l, "L")?;
    let f_on_k = f.values_on(k.points())?;
    let rows = sched
        .pairs
        .par_iter()
        .map(|&(tau, sigma)| {
            let d = d_estimate(&f_on_k, k, l, tau, sigma, opts)?;
            Ok(ProbeRow {
                tau,
                sigma,
                d_value: d.value,
                d_root: d.value.powf(1.0 / tau as f64),
                converged: d.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let half = rows.len() / 2;
    let max_root = |rs: &[ProbeRow]| rs.iter().map(|r| r.d_root).fold(0.0, f64::max);
    Ok(ProbeReport {
        theta_hat: max_root(&rows[half..]),
        head_max: max_root(&rows[..half]),
        rows,
    })
}
