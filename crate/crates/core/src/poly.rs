//! Complex polynomials expanded about an explicit center.
//!
//! A [`CenteredPolynomial`] stores `a_0, .., a_d` and represents
//! `sum a_k (z - center)^k`. Truncating the coefficient list is exactly the
//! Taylor partial sum at the center, which is what the construction relies
//! on; moving between centers goes through [`CenteredPolynomial::recenter`].

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::text::{fmt_complex, Tokens};

/// Relative threshold for degree queries: coefficients with modulus at most
/// `TRIM_RELATIVE * max |a_k|` are treated as structural zeros.
pub const TRIM_RELATIVE: f64 = 1e-14;

/// Default degree cap for anything that grows a polynomial.
pub const DEFAULT_MAX_DEGREE: usize = 2048;

pub(crate) fn check_finite(z: Complex64, field: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("non-finite value {z}")))
    }
}

/// Degree constraint `low <= deg^- p` and `deg p <= high`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DegreeWindow {
    low: usize,
    high: usize,
}

impl DegreeWindow {
    pub fn new(low: usize, high: usize) -> Result<Self> {
        if low > high {
            return Err(Error::invalid(
                "window",
                format!("low bound {low} exceeds high bound {high}"),
            ));
        }
        Ok(DegreeWindow { low, high })
    }

    pub fn low(&self) -> usize {
        self.low
    }

    pub fn high(&self) -> usize {
        self.high
    }

    /// Number of free coefficients.
    pub fn width(&self) -> usize {
        self.high - self.low + 1
    }

    /// Zero is compliant with every window.
    pub fn admits(&self, p: &CenteredPolynomial) -> bool {
        let (lo, hi) = (p.low_degree(), p.degree());
        lo < 0 || (lo as usize >= self.low && hi as usize <= self.high)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CenteredPolynomial {
    center: Complex64,
    coeffs: Vec<Complex64>,
}

impl CenteredPolynomial {
    pub fn new(center: Complex64, coeffs: Vec<Complex64>) -> Result<Self> {
        check_finite(center, "center")?;
        for (k, c) in coeffs.iter().enumerate() {
            check_finite(*c, &format!("coeffs[{k}]"))?;
        }
        Ok(CenteredPolynomial { center, coeffs })
    }

    pub fn zero(center: Complex64) -> Self {
        CenteredPolynomial {
            center,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(center: Complex64, c: Complex64) -> Self {
        CenteredPolynomial {
            center,
            coeffs: vec![c],
        }
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Same coefficients read about a different center, i.e. the map
    /// `P(w) -> P(z - new_center)`. Not a change of representation.
    pub fn with_center(&self, new_center: Complex64) -> Self {
        CenteredPolynomial {
            center: new_center,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let w = z - self.center;
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * w + a)
    }

    /// Re-expand about `new_center` by repeated synthetic division.
    pub fn recenter(&self, new_center: Complex64) -> Self {
        let shift = new_center - self.center;
        let mut a = self.coeffs.clone();
        if shift != Complex64::new(0.0, 0.0) {
            let n = a.len();
            for i in 0..n.saturating_sub(1) {
                for j in (i..n - 1).rev() {
                    let carry = shift * a[j + 1];
                    a[j] += carry;
                }
            }
        }
        CenteredPolynomial {
            center: new_center,
            coeffs: a,
        }
    }

    /// Taylor partial sum `S_N` at the polynomial's own center.
    pub fn partial_sum(&self, n: usize) -> Self {
        let keep = self.coeffs.len().min(n.saturating_add(1));
        CenteredPolynomial {
            center: self.center,
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    pub fn trim_epsilon(&self) -> f64 {
        TRIM_RELATIVE * self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Highest index with modulus above `eps`, or -1 for zero.
    pub fn degree_with(&self, eps: f64) -> i64 {
        self.coeffs
            .iter()
            .rposition(|c| c.norm() > eps)
            .map_or(-1, |k| k as i64)
    }

    /// Lowest index with modulus above `eps`, or -1 for zero.
    pub fn low_degree_with(&self, eps: f64) -> i64 {
        self.coeffs
            .iter()
            .position(|c| c.norm() > eps)
            .map_or(-1, |k| k as i64)
    }

    /// `deg p`, with -1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.degree_with(self.trim_epsilon())
    }

    /// `deg^- p`, with -1 for the zero polynomial.
    pub fn low_degree(&self) -> i64 {
        self.low_degree_with(self.trim_epsilon())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Sum, with `other` re-expanded about `self`'s center first.
    pub fn add(&self, other: &Self) -> Self {
        let other = if other.center == self.center {
            std::borrow::Cow::Borrowed(other)
        } else {
            std::borrow::Cow::Owned(other.recenter(self.center))
        };
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or(zero);
                let b = other.coeffs.get(k).copied().unwrap_or(zero);
                a + b
            })
            .collect();
        CenteredPolynomial {
            center: self.center,
            coeffs,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return CenteredPolynomial::zero(self.center);
        }
        CenteredPolynomial {
            center: self.center,
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    /// Render in the coefficient text format: a `center re im` header and
    /// one `k re im` line per stored coefficient.
    pub fn to_coefficient_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "center {}", fmt_complex(self.center));
        for (k, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{k} {}", fmt_complex(*c));
        }
        out
    }

    /// Parse the coefficient text format. Indices must be strictly
    /// increasing; skipped indices are zero. A leading `format: 1` line is
    /// accepted.
    pub fn from_coefficient_text(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Self::from_coefficient_lines(&lines)
    }

    /// Same as [`Self::from_coefficient_text`] over pre-split, numbered,
    /// non-empty lines, so embedded blocks report file line numbers.
    pub fn from_coefficient_lines(lines: &[(usize, &str)]) -> Result<Self> {
        let mut lines = lines.iter().copied();
        let (mut ln, mut first) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty coefficient file"))?;
        if first.starts_with("format:") {
            if first != "format: 1" {
                return Err(Error::parse(ln, format!("unsupported version {first:?}")));
            }
            (ln, first) = lines
                .next()
                .ok_or_else(|| Error::parse(ln, "missing center line"))?;
        }
        let mut t = Tokens::new(first, ln);
        t.expect("center")?;
        let center = t.next_complex()?;
        t.finish()?;
        let mut coeffs = Vec::new();
        for (ln, l) in lines {
            let mut t = Tokens::new(l, ln);
            let k = t.next_usize()?;
            let c = t.next_complex()?;
            t.finish()?;
            if k < coeffs.len() {
                return Err(Error::parse(ln, format!("index {k} out of order")));
            }
            coeffs.resize(k, Complex64::new(0.0, 0.0));
            coeffs.push(c);
        }
        CenteredPolynomial::new(center, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    #[test]
    fn evaluate_examples() {
        let cube = CenteredPolynomial::new(c(0.0, 0.0), real(&[0.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(cube.evaluate(c(2.0, 0.0)), c(8.0, 0.0));
        let zero = CenteredPolynomial::zero(c(0.3, -1.0));
        assert_eq!(zero.evaluate(c(5.0, 1.0)), c(0.0, 0.0));
        let p = CenteredPolynomial::new(c(1.0, 0.0), real(&[1.0, 1.0])).unwrap();
        assert_eq!(p.evaluate(c(1.0, 0.0)), c(1.0, 0.0));
    }

    #[test]
    fn recenter_linear_shift() {
        let z = CenteredPolynomial::new(c(0.0, 0.0), real(&[0.0, 1.0])).unwrap();
        let r = z.recenter(c(1.0, 0.0));
        assert_eq!(r.center(), c(1.0, 0.0));
        assert_eq!(r.coeffs(), &real(&[1.0, 1.0])[..]);
    }

    #[test]
    fn recenter_to_own_center_is_identity() {
        let p = CenteredPolynomial::new(c(0.5, 2.0), vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.25, 7.0)])
            .unwrap();
        assert_eq!(p.recenter(p.center()), p);
    }

    #[test]
    fn recenter_square_to_minus_one() {
        let sq = CenteredPolynomial::new(c(0.0, 0.0), real(&[0.0, 0.0, 1.0])).unwrap();
        let r = sq.recenter(c(-1.0, 0.0));
        assert_eq!(r.coeffs(), &real(&[1.0, -2.0, 1.0])[..]);
        assert_eq!(r.evaluate(c(3.0, 0.0)), c(9.0, 0.0));
    }

    #[test]
    fn partial_sum_examples() {
        let cube = CenteredPolynomial::new(c(0.0, 0.0), real(&[0.0, 0.0, 0.0, 1.0])).unwrap();
        let s = cube.partial_sum(2);
        assert!(s.is_zero());
        assert_eq!(s.degree(), -1);

        let p = CenteredPolynomial::new(c(1.0, 1.0), real(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0])).unwrap();
        assert_eq!(p.partial_sum(7), p);
        assert_eq!(p.partial_sum(5), p);
    }

    #[test]
    fn degree_queries() {
        let p = CenteredPolynomial::new(c(0.0, 0.0), real(&[0.0, 0.0, 3.0, 0.0, 5.0])).unwrap();
        assert_eq!((p.degree(), p.low_degree()), (4, 2));
        let z = CenteredPolynomial::zero(c(0.0, 0.0));
        assert_eq!((z.degree(), z.low_degree()), (-1, -1));
        let tiny = CenteredPolynomial::new(c(0.0, 0.0), real(&[1e-300, 0.0, 1.0])).unwrap();
        assert_eq!(tiny.low_degree_with(1e-250), 2);
        assert_eq!(tiny.low_degree(), 2);
        assert_eq!(tiny.low_degree_with(0.0), 0);
    }

    #[test]
    fn degree_threshold_is_scale_invariant() {
        let p = CenteredPolynomial::new(c(0.0, 0.0), real(&[1e-20, 1.0, 0.0, 2.0])).unwrap();
        for s in [1e-200, 1e-5, 1.0, 1e150] {
            let q = p.scale(c(s, 0.0));
            assert_eq!((q.low_degree(), q.degree()), (1, 3), "scale {s}");
        }
    }

    #[test]
    fn add_and_scale() {
        let z = CenteredPolynomial::new(c(0.0, 0.0), real(&[0.0, 1.0])).unwrap();
        let one = CenteredPolynomial::constant(c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(z.add(&one).coeffs(), &real(&[1.0, 1.0])[..]);

        let p = CenteredPolynomial::new(c(0.0, 1.0), vec![c(1.0, 2.0), c(3.0, -4.0)]).unwrap();
        assert!(p.scale(c(0.0, 0.0)).is_zero());
        assert!(p.add(&p.scale(c(-1.0, 0.0))).is_zero());
    }

    #[test]
    fn add_recenters_other_operand() {
        let p = CenteredPolynomial::new(c(0.0, 0.0), real(&[1.0, 0.0, 1.0])).unwrap();
        let q = CenteredPolynomial::new(c(2.0, 0.0), real(&[0.0, 1.0])).unwrap();
        let s = p.add(&q);
        assert_eq!(s.center(), c(0.0, 0.0));
        let z = c(0.7, -0.3);
        assert!((s.evaluate(z) - (p.evaluate(z) + q.evaluate(z))).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_finite_coefficients() {
        assert!(CenteredPolynomial::new(c(0.0, 0.0), vec![c(f64::NAN, 0.0)]).is_err());
        assert!(CenteredPolynomial::new(c(f64::INFINITY, 0.0), vec![]).is_err());
    }

    #[test]
    fn window_validation_and_compliance() {
        assert!(DegreeWindow::new(3, 2).is_err());
        let w = DegreeWindow::new(2, 4).unwrap();
        assert_eq!(w.width(), 3);
        let ok = CenteredPolynomial::new(c(0.0, 0.0), real(&[0.0, 0.0, 1.0, 0.0, 2.0])).unwrap();
        let bad = CenteredPolynomial::new(c(0.0, 0.0), real(&[0.0, 1.0, 1.0])).unwrap();
        assert!(w.admits(&ok));
        assert!(!w.admits(&bad));
        assert!(w.admits(&CenteredPolynomial::zero(c(0.0, 0.0))));
    }

    #[test]
    fn coefficient_text_round_trip() {
        let p = CenteredPolynomial::new(
            c(0.2, 0.1),
            vec![c(0.1, -1e-300), c(0.0, 0.0), c(3.0_f64.sqrt(), 1e17)],
        )
        .unwrap();
        let text = p.to_coefficient_text();
        assert!(text.starts_with("center 0.2 0.1\n0 0.1 -1e-300\n"));
        assert_eq!(CenteredPolynomial::from_coefficient_text(&text).unwrap(), p);
        let versioned = format!("format: 1\n{text}");
        assert_eq!(CenteredPolynomial::from_coefficient_text(&versioned).unwrap(), p);
    }

    #[test]
    fn coefficient_text_sparse_and_errors() {
        let p = CenteredPolynomial::from_coefficient_text("center 0 0\n2 1 0\n").unwrap();
        assert_eq!(p.coeffs(), &real(&[0.0, 0.0, 1.0])[..]);
        assert!(CenteredPolynomial::from_coefficient_text("center 0 0\n2 1 0\n1 1 0\n").is_err());
        assert!(CenteredPolynomial::from_coefficient_text("centre 0 0\n").is_err());
        assert!(CenteredPolynomial::from_coefficient_text("center 0 0\n0 1 0 9\n").is_err());
        assert!(CenteredPolynomial::from_coefficient_text("format: 2\ncenter 0 0\n").is_err());
    }
}
