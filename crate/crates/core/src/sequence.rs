//! Index sequences `lambda_n` and the ratio tests the construction needs.
//!
//! Formulas use a small integer grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := power ('*' power)*
//! power  := atom ('^' power)?
//! atom   := INTEGER | 'n' | 'log(n)' | '(' expr ')'
//! ```
//!
//! `log(n)` is `floor(ln n)`. Arithmetic is checked; overflow is an error,
//! not a wrap.

use crate::error::{Error, Result};

/// Smallest horizon [`check_ratio`] accepts.
pub const MIN_HORIZON: u64 = 10;

#[derive(Clone, Debug, PartialEq)]
pub enum SequenceSpec {
    Formula(Formula),
    /// `lambda_1, lambda_2, ..` listed explicitly.
    Table(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Formula {
    source: String,
    expr: Expr,
}

#[derive(Clone, Debug, PartialEq)]
enum Expr {
    Const(i128),
    N,
    LogN,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Formula {
    pub fn parse(src: &str) -> Result<Self> {
        let compact: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::invalid("sequence.formula", "is empty"));
        }
        let mut p = Parser {
            s: compact.as_bytes(),
            at: 0,
        };
        let expr = p.expr()?;
        if p.at != p.s.len() {
            return Err(p.error("unexpected character"));
        }
        Ok(Formula {
            source: compact,
            expr,
        })
    }

    /// Whitespace-free source text.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, n: u64) -> Result<i128> {
        eval(&self.expr, n as i128, n)
    }
}

fn overflow(n: u64) -> Error {
    Error::invalid("sequence", format!("integer overflow evaluating lambda_{n}"))
}

fn eval(e: &Expr, n: i128, idx: u64) -> Result<i128> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::N => n,
        Expr::LogN => (n as f64).ln().floor() as i128,
        Expr::Add(a, b) => eval(a, n, idx)?.checked_add(eval(b, n, idx)?).ok_or_else(|| overflow(idx))?,
        Expr::Sub(a, b) => eval(a, n, idx)?.checked_sub(eval(b, n, idx)?).ok_or_else(|| overflow(idx))?,
        Expr::Mul(a, b) => eval(a, n, idx)?.checked_mul(eval(b, n, idx)?).ok_or_else(|| overflow(idx))?,
        Expr::Pow(a, b) => {
            let base = eval(a, n, idx)?;
            let exp = eval(b, n, idx)?;
            let exp = u32::try_from(exp).map_err(|_| {
                Error::invalid("sequence", format!("exponent {exp} out of range at n = {idx}"))
            })?;
            base.checked_pow(exp).ok_or_else(|| overflow(idx))?
        }
    })
}

struct Parser<'a> {
    s: &'a [u8],
    at: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::invalid(
            "sequence.formula",
            format!("{what} at offset {}", self.at),
        )
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.at).copied()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.s[self.at..].starts_with(lit.as_bytes()) {
            self.at += lit.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat("+") {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat("-") {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.power()?;
        while self.eat("*") {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
        }
        Ok(lhs)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat("^") {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.power()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        if self.eat("log(n)") {
            return Ok(Expr::LogN);
        }
        if self.eat("n") {
            return Ok(Expr::N);
        }
        if self.eat("(") {
            let e = self.expr()?;
            if !self.eat(")") {
                return Err(self.error("expected ')'"));
            }
            return Ok(e);
        }
        let start = self.at;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.at += 1;
        }
        if start == self.at {
            return Err(self.error("expected a number, 'n', 'log(n)' or '('"));
        }
        let digits = std::str::from_utf8(&self.s[start..self.at]).unwrap();
        digits
            .parse()
            .map(Expr::Const)
            .map_err(|_| self.error("number too large"))
    }
}

impl SequenceSpec {
    pub fn formula(src: &str) -> Result<Self> {
        Ok(SequenceSpec::Formula(Formula::parse(src)?))
    }

    pub fn table(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sequence.table", "is empty"));
        }
        Ok(SequenceSpec::Table(values))
    }

    /// Largest index the rule can answer for, if bounded.
    pub fn max_index(&self) -> Option<u64> {
        match self {
            SequenceSpec::Formula(_) => None,
            SequenceSpec::Table(v) => Some(v.len() as u64),
        }
    }

    /// `lambda_n` for `n >= 1`; must be a positive integer.
    pub fn value(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::invalid("sequence", "indices start at 1"));
        }
        let v = match self {
            SequenceSpec::Formula(f) => f.eval(n)?,
            SequenceSpec::Table(t) => match t.get(n as usize - 1) {
                Some(&v) => v as i128,
                None => {
                    return Err(Error::invalid(
                        "sequence.table",
                        format!("has {} entries, lambda_{n} requested", t.len()),
                    ))
                }
            },
        };
        if v < 1 {
            return Err(Error::invalid(
                format!("sequence[{n}]"),
                format!("lambda_{n} = {v} is not a positive integer"),
            ));
        }
        u64::try_from(v).map_err(|_| overflow(n))
    }

    /// One-line rendering used in certificates and by [`Self::from_tokens`].
    pub fn to_tokens(&self) -> String {
        match self {
            SequenceSpec::Formula(f) => format!("formula {}", f.source()),
            SequenceSpec::Table(t) => {
                let vals: Vec<String> = t.iter().map(u64::to_string).collect();
                format!("table {} {}", t.len(), vals.join(" "))
            }
        }
    }

    pub fn read_tokens(t: &mut crate::text::Tokens<'_>) -> Result<Self> {
        match t.next_str()? {
            "formula" => SequenceSpec::formula(t.next_str()?)
                .map_err(|e| Error::parse(t.line(), e.to_string())),
            "table" => {
                let n = t.next_usize()?;
                let vals = (0..n).map(|_| t.next_u64()).collect::<Result<Vec<_>>>()?;
                SequenceSpec::table(vals).map_err(|e| Error::parse(t.line(), e.to_string()))
            }
            other => Err(Error::parse(t.line(), format!("unknown sequence rule {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Diverging,
    BoundedSoFar,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioCheck {
    pub sup_ratio: f64,
    pub attained_at: u64,
    pub horizon: u64,
    pub verdict: Verdict,
}

/// Caveat printed next to every verdict.
pub const VERDICT_CAVEAT: &str =
    "heuristic: a limsup cannot be decided from finitely many terms";

/// Scans `lambda_n / n` for `n <= horizon`. The verdict is `Diverging` when
/// the max over `[horizon/2, horizon]` exceeds twice the max over
/// `[1, horizon/4]`.
pub fn check_ratio(seq: &SequenceSpec, horizon: u64) -> Result<RatioCheck> {
    if horizon < MIN_HORIZON {
        return Err(Error::invalid("horizon", format!("must be at least {MIN_HORIZON}")));
    }
    if let Some(max) = seq.max_index() {
        if horizon > max {
            return Err(Error::invalid(
                "horizon",
                format!("{horizon} exceeds the {max} table entries"),
            ));
        }
    }
    let mut sup = 0.0;
    let mut at = 0;
    let mut head = 0.0_f64;
    let mut tail = 0.0_f64;
    let mut prev = 0;
    for n in 1..=horizon {
        let v = seq.value(n)?;
        if v <= prev {
            return Err(Error::invalid(
                format!("sequence[{n}]"),
                format!("not strictly increasing: lambda_{n} = {v} after {prev}"),
            ));
        }
        prev = v;
        let r = v as f64 / n as f64;
        if r > sup {
            sup = r;
            at = n;
        }
        if n <= horizon / 4 {
            head = head.max(r);
        }
        if n >= horizon / 2 {
            tail = tail.max(r);
        }
    }
    let verdict = if tail > 2.0 * head {
        Verdict::Diverging
    } else {
        Verdict::BoundedSoFar
    };
    Ok(RatioCheck {
        sup_ratio: sup,
        attained_at: at,
        horizon,
        verdict,
    })
}

/// The refusal for a bounded verdict.
pub fn refusal(check: &RatioCheck) -> Error {
    Error::BoundedRatio {
        sup_ratio: check.sup_ratio,
        attained_at: check.attained_at,
        horizon: check.horizon,
    }
}

/// Lazily walks the ratio-doubling subsequence: the first index has
/// `lambda_mu > mu`, every later one has at least twice the previous ratio.
pub struct Subsequence<'a> {
    seq: &'a SequenceSpec,
    horizon: u64,
    next_n: u64,
    last_ratio: Option<f64>,
    found: usize,
}

impl<'a> Subsequence<'a> {
    pub fn new(seq: &'a SequenceSpec, horizon: u64) -> Self {
        Subsequence {
            seq,
            horizon: seq.max_index().map_or(horizon, |m| m.min(horizon)),
            next_n: 1,
            last_ratio: None,
            found: 0,
        }
    }

    /// Next `(mu, lambda_mu)`.
    pub fn next_index(&mut self) -> Result<(u64, u64)> {
        while self.next_n <= self.horizon {
            let n = self.next_n;
            self.next_n += 1;
            let v = self.seq.value(n)?;
            let r = v as f64 / n as f64;
            let take = match self.last_ratio {
                None => v > n,
                Some(prev) => r >= 2.0 * prev,
            };
            if take {
                self.last_ratio = Some(r);
                self.found += 1;
                return Ok((n, v));
            }
        }
        Err(Error::SubsequenceExhausted {
            found: self.found,
            horizon: self.horizon,
        })
    }
}

/// First `count` indices of the ratio-doubling subsequence, after refusing
/// sequences whose ratio looks bounded.
pub fn choose_subsequence(seq: &SequenceSpec, count: usize, horizon: u64) -> Result<Vec<u64>> {
    let check = check_ratio(seq, horizon)?;
    if check.verdict == Verdict::BoundedSoFar {
        return Err(refusal(&check));
    }
    let mut walk = Subsequence::new(seq, horizon);
    (0..count).map(|_| walk.next_index().map(|(mu, _)| mu)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(src: &str) -> SequenceSpec {
        SequenceSpec::formula(src).unwrap()
    }

    #[test]
    fn grammar_covers_the_documented_forms() {
        assert_eq!(f("n^2").value(7).unwrap(), 49);
        assert_eq!(f("3*n").value(5).unwrap(), 15);
        assert_eq!(f("n + 7").value(1).unwrap(), 8);
        assert_eq!(f("n*log(n)").value(10).unwrap(), 20);
        assert_eq!(f("2*(n+1)^2 - n").value(3).unwrap(), 29);
        assert_eq!(f("n*2^n").value(3).unwrap(), 24);
        assert_eq!(f("2^3^2").value(1).unwrap(), 512);
        for bad in ["", "n^", "(n", "x", "n**2", "2n"] {
            assert!(SequenceSpec::formula(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn overflow_and_non_positive_values_are_errors() {
        assert!(f("n^n").value(100).is_err());
        assert!(f("n-1").value(1).is_err());
    }

    #[test]
    fn ratio_examples() {
        let c = check_ratio(&f("n^2"), 1000).unwrap();
        assert_eq!((c.sup_ratio, c.attained_at, c.verdict), (1000.0, 1000, Verdict::Diverging));
        let c = check_ratio(&f("2*n"), 1000).unwrap();
        assert_eq!((c.sup_ratio, c.verdict), (2.0, Verdict::BoundedSoFar));
        let c = check_ratio(&f("n+1"), 10).unwrap();
        assert_eq!((c.sup_ratio, c.attained_at, c.verdict), (2.0, 1, Verdict::BoundedSoFar));
        assert!(check_ratio(&f("n^2"), 9).is_err());
    }

    #[test]
    fn non_monotone_sequence_names_the_index() {
        let s = SequenceSpec::table(vec![1, 2, 3, 3, 5, 6, 7, 8, 9, 10]).unwrap();
        match check_ratio(&s, 10).unwrap_err() {
            Error::Invalid { field, .. } => assert_eq!(field, "sequence[4]"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn subsequence_examples() {
        assert_eq!(choose_subsequence(&f("n^2"), 5, 1000).unwrap(), vec![2, 4, 8, 16, 32]);
        let table: Vec<u64> = (1..=12u64).map(|n| n << n).collect();
        let s = SequenceSpec::table(table).unwrap();
        assert_eq!(choose_subsequence(&s, 3, 12).unwrap(), vec![1, 2, 3]);
        assert!(matches!(
            choose_subsequence(&f("2*n"), 3, 1000),
            Err(Error::BoundedRatio { .. })
        ));
        assert!(matches!(
            choose_subsequence(&f("n^2"), 20, 1000),
            Err(Error::SubsequenceExhausted { found: 9, horizon: 1000 })
        ));
    }

    #[test]
    fn tokens_round_trip() {
        for s in [f("n * log(n)"), SequenceSpec::table(vec![2, 5, 9]).unwrap()] {
            let text = s.to_tokens();
            let mut t = crate::text::Tokens::new(&text, 1);
            assert_eq!(SequenceSpec::read_tokens(&mut t).unwrap(), s);
            t.finish().unwrap();
        }
    }
}
