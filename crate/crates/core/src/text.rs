//! Plain-text rendering helpers shared by the coefficient, certificate and
//! CSV writers. All reals are written as shortest round-trip decimals.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Shortest decimal string that parses back to the identical `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        let mut buf = ryu::Buffer::new();
        buf.format_finite(x).to_string()
    } else {
        // Never produced by validated values; kept total for diagnostics.
        format!("{x}")
    }
}

pub fn fmt_complex(z: Complex64) -> String {
    format!("{} {}", fmt_f64(z.re), fmt_f64(z.im))
}

pub fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let x: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("expected a real number, got {tok:?}")))?;
    if !x.is_finite() {
        return Err(Error::parse(line, format!("non-finite number {tok:?}")));
    }
    Ok(x)
}

/// Whitespace token cursor over one logical record.
pub struct Tokens<'a> {
    iter: std::str::SplitWhitespace<'a>,
    line: usize,
}

impl<'a> Tokens<'a> {
    pub fn new(s: &'a str, line: usize) -> Self {
        Tokens {
            iter: s.split_whitespace(),
            line,
        }
    }

    pub fn line(&self) -> usize {
        self.line
    }

    pub fn next_str(&mut self) -> Result<&'a str> {
        self.iter
            .next()
            .ok_or_else(|| Error::parse(self.line, "unexpected end of record"))
    }

    pub fn next_f64(&mut self) -> Result<f64> {
        let t = self.next_str()?;
        parse_f64(t, self.line)
    }

    pub fn next_complex(&mut self) -> Result<Complex64> {
        let re = self.next_f64()?;
        let im = self.next_f64()?;
        Ok(Complex64::new(re, im))
    }

    pub fn next_usize(&mut self) -> Result<usize> {
        let t = self.next_str()?;
        t.parse()
            .map_err(|_| Error::parse(self.line, format!("expected a count, got {t:?}")))
    }

    pub fn next_u64(&mut self) -> Result<u64> {
        let t = self.next_str()?;
        t.parse()
            .map_err(|_| Error::parse(self.line, format!("expected an integer, got {t:?}")))
    }

    pub fn expect(&mut self, word: &str) -> Result<()> {
        let t = self.next_str()?;
        if t == word {
            Ok(())
        } else {
            Err(Error::parse(
                self.line,
                format!("expected {word:?}, got {t:?}"),
            ))
        }
    }

    pub fn finish(mut self) -> Result<()> {
        match self.iter.next() {
            None => Ok(()),
            Some(t) => Err(Error::parse(self.line, format!("trailing token {t:?}"))),
        }
    }
}

/// Numbered, trimmed, non-empty lines of a text file with one-line
/// lookahead and `begin NAME` / `end NAME` block extraction.
pub struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    at: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Lines { lines, at: 0 }
    }

    pub fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.at).copied()
    }

    pub fn next_line(&mut self) -> Result<(usize, &'a str)> {
        let l = self.lines.get(self.at).copied().ok_or_else(|| {
            let last = self.lines.last().map_or(1, |l| l.0);
            Error::parse(last, "unexpected end of file")
        })?;
        self.at += 1;
        Ok(l)
    }

    /// Tokens of the next line after checking its leading keyword.
    pub fn record(&mut self, key: &str) -> Result<Tokens<'a>> {
        let (ln, l) = self.next_line()?;
        let mut t = Tokens::new(l, ln);
        t.expect(key)?;
        Ok(t)
    }

    /// Lines strictly between `begin NAME` and the matching `end NAME`.
    pub fn block(&mut self, name: &str) -> Result<Vec<(usize, &'a str)>> {
        let mut t = self.record("begin")?;
        t.expect(name)?;
        t.finish()?;
        let end = format!("end {name}");
        let mut body = Vec::new();
        loop {
            let (ln, l) = self.next_line()?;
            if l == end {
                return Ok(body);
            }
            if l.starts_with("begin ") {
                return Err(Error::parse(ln, format!("block {name:?} is not closed")));
            }
            body.push((ln, l));
        }
    }

    pub fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some((ln, l)) => Err(Error::parse(ln, format!("unexpected line {l:?}"))),
        }
    }
}
