//! Target functions that can be evaluated on grids.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{check_finite, CenteredPolynomial};
use crate::text::{fmt_complex, Lines};

/// Smallest denominator modulus a rational target may be evaluated at.
pub const MIN_DENOMINATOR: f64 = 1e-8;

/// Table lookups match a query point within this distance.
pub const TABLE_MATCH: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum TargetFunction {
    Polynomial(CenteredPolynomial),
    Rational {
        numerator: CenteredPolynomial,
        denominator: CenteredPolynomial,
    },
    /// Values known only at listed points.
    Table(Vec<(Complex64, Complex64)>),
}

impl TargetFunction {
    pub fn zero() -> Self {
        TargetFunction::Polynomial(CenteredPolynomial::zero(Complex64::new(0.0, 0.0)))
    }

    pub fn constant(c: Complex64) -> Self {
        TargetFunction::Polynomial(CenteredPolynomial::constant(Complex64::new(0.0, 0.0), c))
    }

    /// The identity `z`.
    pub fn identity() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        TargetFunction::Polynomial(CenteredPolynomial::new(zero, vec![zero, Complex64::new(1.0, 0.0)]).unwrap())
    }

    pub fn rational(numerator: CenteredPolynomial, denominator: CenteredPolynomial) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::invalid("target.denominator", "is identically zero"));
        }
        Ok(TargetFunction::Rational {
            numerator,
            denominator,
        })
    }

    /// `1 / (z - a)`.
    pub fn simple_pole(a: Complex64) -> Result<Self> {
        check_finite(a, "target.pole")?;
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        TargetFunction::rational(
            CenteredPolynomial::constant(zero, one),
            CenteredPolynomial::new(zero, vec![-a, one])?,
        )
    }

    pub fn table(entries: Vec<(Complex64, Complex64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("target.table", "has no entries"));
        }
        for (i, (z, v)) in entries.iter().enumerate() {
            check_finite(*z, &format!("target.table[{i}].point"))?;
            check_finite(*v, &format!("target.table[{i}].value"))?;
        }
        Ok(TargetFunction::Table(entries))
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        match self {
            TargetFunction::Polynomial(p) => Ok(p.evaluate(z)),
            TargetFunction::Rational {
                numerator,
                denominator,
            } => {
                let d = denominator.evaluate(z);
                if !(d.norm() >= MIN_DENOMINATOR) {
                    return Err(Error::TargetNotEvaluable {
                        point: fmt_complex(z),
                        reason: format!("denominator modulus {:e} below {MIN_DENOMINATOR:e}", d.norm()),
                    });
                }
                Ok(numerator.evaluate(z) / d)
            }
            TargetFunction::Table(entries) => entries
                .iter()
                .find(|(p, _)| (p - z).norm() <= TABLE_MATCH)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::TargetNotEvaluable {
                    point: fmt_complex(z),
                    reason: "not a table point".into(),
                }),
        }
    }

    pub fn values_on(&self, points: &[Complex64]) -> Result<Vec<Complex64>> {
        points.iter().map(|z| self.evaluate(*z)).collect()
    }

    /// Identically zero targets short-circuit some work downstream.
    pub fn is_zero(&self) -> bool {
        match self {
            TargetFunction::Polynomial(p) => p.is_zero(),
            TargetFunction::Rational { numerator, .. } => numerator.is_zero(),
            TargetFunction::Table(entries) => entries.iter().all(|(_, v)| *v == Complex64::new(0.0, 0.0)),
        }
    }

    /// Certificate encoding: a `target NAME KIND` line followed by the
    /// kind's payload.
    pub fn write_block(&self, name: &str, out: &mut String) {
        match self {
            TargetFunction::Polynomial(p) => {
                let _ = writeln!(out, "target {name} polynomial");
                write_poly_block(name, p, out);
            }
            TargetFunction::Rational {
                numerator,
                denominator,
            } => {
                let _ = writeln!(out, "target {name} rational");
                write_poly_block(&format!("{name}.numerator"), numerator, out);
                write_poly_block(&format!("{name}.denominator"), denominator, out);
            }
            TargetFunction::Table(entries) => {
                let _ = writeln!(out, "target {name} table {}", entries.len());
                for (z, v) in entries {
                    let _ = writeln!(out, "{} {}", fmt_complex(*z), fmt_complex(*v));
                }
            }
        }
    }

    pub fn read_block(name: &str, lines: &mut Lines<'_>) -> Result<Self> {
        let mut t = lines.record("target")?;
        t.expect(name)?;
        let kind = t.next_str()?;
        match kind {
            "polynomial" => {
                t.finish()?;
                Ok(TargetFunction::Polynomial(read_poly_block(name, lines)?))
            }
            "rational" => {
                t.finish()?;
                let n = read_poly_block(&format!("{name}.numerator"), lines)?;
                let d = read_poly_block(&format!("{name}.denominator"), lines)?;
                TargetFunction::rational(n, d)
            }
            "table" => {
                let count = t.next_usize()?;
                t.finish()?;
                let mut entries = Vec::with_capacity(count);
                for _ in 0..count {
                    let (ln, l) = lines.next_line()?;
                    let mut t = crate::text::Tokens::new(l, ln);
                    let z = t.next_complex()?;
                    let v = t.next_complex()?;
                    t.finish()?;
                    entries.push((z, v));
                }
                TargetFunction::table(entries)
            }
            other => Err(Error::parse(t.line(), format!("unknown target kind {other:?}"))),
        }
    }
}

pub(crate) fn write_poly_block(name: &str, p: &CenteredPolynomial, out: &mut String) {
    let _ = writeln!(out, "begin {name}");
    out.push_str(&p.to_coefficient_text());
    let _ = writeln!(out, "end {name}");
}

pub(crate) fn read_poly_block(name: &str, lines: &mut Lines<'_>) -> Result<CenteredPolynomial> {
    let body = lines.block(name)?;
    CenteredPolynomial::from_coefficient_lines(&body)
}
