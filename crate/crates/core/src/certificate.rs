//! Construction certificates: what was built, on which grids, and the
//! checks that let anyone re-verify it without the construction code.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::construct::IDENTITY_RELATIVE;
use crate::error::{Error, Result};
use crate::poly::CenteredPolynomial;
use crate::sequence::SequenceSpec;
use crate::sets::{sample, SampledSet, SetSpec};
use crate::target::{read_poly_block, write_poly_block, TargetFunction};
use crate::text::{fmt_complex, fmt_f64, Lines, Tokens};

/// Verification accepts residuals up to this multiple of the bounds.
pub const VERIFY_SLACK: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub struct GridRecord {
    pub spec: SetSpec,
    pub density: f64,
}

impl GridRecord {
    pub fn of(set: &SampledSet) -> Self {
        GridRecord {
            spec: set.spec().clone(),
            density: set.density(),
        }
    }

    pub fn sample(&self, multiplier: f64) -> Result<SampledSet> {
        sample(&self.spec, self.density * multiplier)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionCertificate {
    pub zeta0: Complex64,
    pub epsilon: f64,
    pub s: u64,
    pub sequence: SequenceSpec,
    /// Position of `mu` in the ratio-doubling subsequence, from 1.
    pub n0: u64,
    pub mu: u64,
    pub lambda_mu: u64,
    /// Top degree of the window actually solved, at most `lambda_mu`.
    pub window_high: u64,
    /// Schedule degree of the Runge step.
    pub runge_degree: u64,
    /// `max |f - g|` on `L`.
    pub residual_l: f64,
    /// `max |S_mu f - f1|` on `K1`.
    pub residual_k1: f64,
    /// `max |S_lambda_mu f - f2|` on `K2`, where the partial sum is `f`.
    pub residual_k2: f64,
    pub window_error: f64,
    pub l: GridRecord,
    pub k1: GridRecord,
    pub k2: GridRecord,
    pub g: TargetFunction,
    pub f1: TargetFunction,
    pub f2: TargetFunction,
    pub p: CenteredPolynomial,
    pub f: CenteredPolynomial,
}

/// `max |f - target|` over a grid.
pub fn residual(f: &CenteredPolynomial, target: &TargetFunction, set: &SampledSet) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in set.points() {
        worst = worst.max((f.evaluate(*z) - target.evaluate(*z)?).norm());
    }
    Ok(worst)
}

impl ConstructionCertificate {
    /// Bounds `(epsilon, 1/s, 1/s)` for the residuals on `L`, `K1`, `K2`.
    pub fn bounds(&self) -> [f64; 3] {
        let inv_s = 1.0 / self.s as f64;
        [self.epsilon, inv_s, inv_s]
    }

    /// First violated algebraic invariant, if any. These hold exactly by
    /// construction and do not depend on solver accuracy.
    pub fn identity_failure(&self) -> Option<String> {
        if self.f.center() != self.zeta0 {
            return Some("f is not expanded about zeta0".into());
        }
        if self.mu >= self.lambda_mu {
            return Some(format!("mu = {} is not below lambda_mu = {}", self.mu, self.lambda_mu));
        }
        let p = self.p.recenter(self.zeta0);
        let low = self.f.partial_sum(self.mu as usize);
        let scale = p.coeffs().iter().chain(low.coeffs()).map(|c| c.norm()).fold(0.0, f64::max);
        let zero = Complex64::new(0.0, 0.0);
        let n = p.coeffs().len().max(low.coeffs().len());
        for k in 0..n {
            let a = low.coeffs().get(k).copied().unwrap_or(zero);
            let b = p.coeffs().get(k).copied().unwrap_or(zero);
            if (a - b).norm() > IDENTITY_RELATIVE * scale {
                return Some(format!(
                    "partial sum of f at mu = {} differs from p at coefficient {k}",
                    self.mu
                ));
            }
        }
        if self.f.partial_sum(self.lambda_mu as usize) != self.f {
            return Some(format!(
                "f has terms above lambda_mu = {}",
                self.lambda_mu
            ));
        }
        if self.p.degree() > self.mu as i64 {
            return Some(format!("deg p = {} exceeds mu = {}", self.p.degree(), self.mu));
        }
        let tail = self.f.add(&p.scale(Complex64::new(-1.0, 0.0)));
        if !tail.is_zero() && tail.low_degree() <= self.mu as i64 {
            return Some(format!(
                "f - p has a term of degree {} <= mu",
                tail.low_degree()
            ));
        }
        None
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "format: 1");
        let _ = writeln!(out, "certificate construction");
        let _ = writeln!(out, "zeta0 {}", fmt_complex(self.zeta0));
        let _ = writeln!(out, "epsilon {}", fmt_f64(self.epsilon));
        let _ = writeln!(out, "s {}", self.s);
        let _ = writeln!(out, "sequence {}", self.sequence.to_tokens());
        let _ = writeln!(out, "n0 {}", self.n0);
        let _ = writeln!(out, "mu {}", self.mu);
        let _ = writeln!(out, "lambda_mu {}", self.lambda_mu);
        let _ = writeln!(out, "window_high {}", self.window_high);
        let _ = writeln!(out, "runge_degree {}", self.runge_degree);
        let _ = writeln!(out, "residual_L {}", fmt_f64(self.residual_l));
        let _ = writeln!(out, "residual_K1 {}", fmt_f64(self.residual_k1));
        let _ = writeln!(out, "residual_K2 {}", fmt_f64(self.residual_k2));
        let _ = writeln!(out, "window_error {}", fmt_f64(self.window_error));
        for (name, grid) in [("L", &self.l), ("K1", &self.k1), ("K2", &self.k2)] {
            let _ = writeln!(out, "set {name} {} {}", fmt_f64(grid.density), grid.spec.to_tokens());
        }
        self.g.write_block("g", &mut out);
        self.f1.write_block("f1", &mut out);
        self.f2.write_block("f2", &mut out);
        write_poly_block("p", &self.p, &mut out);
        write_poly_block("f", &self.f, &mut out);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let (ln, first) = lines.next_line()?;
        if first != "format: 1" {
            return Err(Error::parse(ln, format!("expected \"format: 1\", got {first:?}")));
        }
        single(lines.record("certificate")?, |t| t.expect("construction"))?;
        let zeta0 = single(lines.record("zeta0")?, |t| t.next_complex())?;
        let epsilon = single(lines.record("epsilon")?, |t| t.next_f64())?;
        let s = single(lines.record("s")?, |t| t.next_u64())?;
        let sequence = single(lines.record("sequence")?, |t| SequenceSpec::read_tokens(t))?;
        let n0 = single(lines.record("n0")?, |t| t.next_u64())?;
        let mu = single(lines.record("mu")?, |t| t.next_u64())?;
        let lambda_mu = single(lines.record("lambda_mu")?, |t| t.next_u64())?;
        let window_high = single(lines.record("window_high")?, |t| t.next_u64())?;
        let runge_degree = single(lines.record("runge_degree")?, |t| t.next_u64())?;
        let residual_l = single(lines.record("residual_L")?, |t| t.next_f64())?;
        let residual_k1 = single(lines.record("residual_K1")?, |t| t.next_f64())?;
        let residual_k2 = single(lines.record("residual_K2")?, |t| t.next_f64())?;
        let window_error = single(lines.record("window_error")?, |t| t.next_f64())?;
        let mut grid = |name: &str| -> Result<GridRecord> {
            single(lines.record("set")?, |t| {
                t.expect(name)?;
                let line = t.line();
                let density = t.next_f64()?;
                if !(density > 0.0) {
                    return Err(Error::parse(line, "density must be positive"));
                }
                Ok(GridRecord {
                    density,
                    spec: SetSpec::read_tokens(t)?,
                })
            })
        };
        let l = grid("L")?;
        let k1 = grid("K1")?;
        let k2 = grid("K2")?;
        let g = TargetFunction::read_block("g", &mut lines)?;
        let f1 = TargetFunction::read_block("f1", &mut lines)?;
        let f2 = TargetFunction::read_block("f2", &mut lines)?;
        let p = read_poly_block("p", &mut lines)?;
        let f = read_poly_block("f", &mut lines)?;
        lines.finish()?;
        if !(epsilon > 0.0) || s == 0 {
            return Err(Error::parse(ln, "epsilon and s must be positive"));
        }
        Ok(ConstructionCertificate {
            zeta0,
            epsilon,
            s,
            sequence,
            n0,
            mu,
            lambda_mu,
            window_high,
            runge_degree,
            residual_l,
            residual_k1,
            residual_k2,
            window_error,
            l,
            k1,
            k2,
            g,
            f1,
            f2,
            p,
            f,
        })
    }
}

fn single<'a, T>(mut t: Tokens<'a>, read: impl FnOnce(&mut Tokens<'a>) -> Result<T>) -> Result<T> {
    let v = read(&mut t)?;
    t.finish()?;
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub density_multiplier: f64,
    /// Residuals on the resampled `L`, `K1`, `K2`; `None` where a target
    /// could not be evaluated.
    pub residuals: [Option<f64>; 3],
    /// `VERIFY_SLACK` times the certificate bounds.
    pub limits: [f64; 3],
    pub identities_hold: bool,
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-samples every set at `density_multiplier` times its recorded density
/// and re-checks residuals against twice the bounds, plus the exact
/// identities. Problems are reported, never raised.
pub fn verify(cert: &ConstructionCertificate, density_multiplier: f64) -> VerificationReport {
    let mut failures = Vec::new();
    let bounds = cert.bounds();
    let limits = bounds.map(|b| VERIFY_SLACK * b);
    let mut residuals = [None; 3];
    if !(density_multiplier >= 1.0 && density_multiplier.is_finite()) {
        failures.push(format!("density multiplier {density_multiplier} must be at least 1"));
    } else {
        let low = cert.f.partial_sum(cert.mu as usize);
        let top = cert.f.partial_sum(cert.lambda_mu as usize);
        let sets = [
            ("L", &cert.l, &cert.g, &cert.f),
            ("K1", &cert.k1, &cert.f1, &low),
            ("K2", &cert.k2, &cert.f2, &top),
        ];
        for (i, (name, grid, target, approx)) in sets.into_iter().enumerate() {
            match grid.sample(density_multiplier).and_then(|set| residual(approx, target, &set)) {
                Ok(r) => {
                    residuals[i] = Some(r);
                    if !(r < limits[i]) {
                        failures.push(format!("residual on {name} {} exceeds {}", fmt_f64(r), fmt_f64(limits[i])));
                    }
                }
                Err(e) => failures.push(format!("residual on {name}: {e}")),
            }
        }
    }
    let identity = cert.identity_failure();
    let identities_hold = identity.is_none();
    failures.extend(identity);
    match cert.sequence.value(cert.mu) {
        Ok(v) if v == cert.lambda_mu => {}
        Ok(v) => failures.push(format!("lambda_{} is {v}, certificate says {}", cert.mu, cert.lambda_mu)),
        Err(e) => failures.push(format!("sequence: {e}")),
    }
    if cert.window_high > cert.lambda_mu {
        failures.push("solved window extends past lambda_mu".into());
    }
    VerificationReport {
        density_multiplier,
        residuals,
        limits,
        identities_hold,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{construct, Caps, Problem};
    use crate::runge::Tolerances;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zero_certificate() -> ConstructionCertificate {
        let d = 12.0;
        let prob = Problem {
            g: TargetFunction::zero(),
            l: sample(&SetSpec::disk(c(0.0, 0.0), 0.5), d).unwrap(),
            f1: TargetFunction::zero(),
            k1: sample(&SetSpec::disk(c(3.0, 0.0), 0.5), d).unwrap(),
            f2: TargetFunction::zero(),
            k2: sample(&SetSpec::segment(c(0.0, 2.0), c(0.0, 3.0)), d).unwrap(),
            zeta0: c(0.0, 0.0),
            sequence: SequenceSpec::formula("n^2").unwrap(),
            tol: Tolerances::new(1e-2, 100).unwrap(),
            omega: None,
        };
        construct(&prob, &Caps::default()).unwrap()
    }

    #[test]
    fn zero_certificate_verifies_with_zero_residuals() {
        let report = verify(&zero_certificate(), 4.0);
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!(report.residuals, [Some(0.0); 3]);
    }

    #[test]
    fn text_round_trips() {
        let cert = zero_certificate();
        let text = cert.to_text();
        assert!(text.starts_with("format: 1\n"));
        assert_eq!(ConstructionCertificate::from_text(&text).unwrap(), cert);
    }

    #[test]
    fn perturbed_low_coefficient_breaks_the_identity() {
        let mut cert = zero_certificate();
        let mut coeffs = cert.f.coeffs().to_vec();
        coeffs.resize(1, c(0.0, 0.0));
        coeffs[0] += c(1.0, 0.0);
        cert.f = CenteredPolynomial::new(cert.zeta0, coeffs).unwrap();
        let report = verify(&cert, 4.0);
        assert!(!report.identities_hold);
        assert!(!report.passed());
    }

    #[test]
    fn terms_above_lambda_break_the_top_identity() {
        let mut cert = zero_certificate();
        let mut coeffs = vec![c(0.0, 0.0); cert.lambda_mu as usize + 2];
        coeffs[cert.lambda_mu as usize + 1] = c(1e-3, 0.0);
        cert.f = CenteredPolynomial::new(cert.zeta0, coeffs).unwrap();
        assert!(cert.identity_failure().unwrap().contains("above lambda_mu"));
    }

    #[test]
    fn truncated_text_is_a_parse_error() {
        let text = zero_certificate().to_text();
        let cut = &text[..text.len() / 2];
        assert!(matches!(
            ConstructionCertificate::from_text(cut),
            Err(Error::Parse { .. })
        ));
    }
}
