//! Series descriptions and their compact text form.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! spec    := prefix '/' base '^n' [ '*' weight ] [ '/' denom ] 'from' 'n' '=' int
//! prefix  := 'binom2' | 'binom'
//! base    := int | '(' ['-'] int [ '/' int ] ')'
//! weight  := '1' | 'O' | 'O^2' | 'H' | 'H_{2n+1}' | 'Z'
//! denom   := unit | '(' unit ( '*' unit )+ ')'
//! unit    := atom [ '^' int ]
//! atom    := 'n' | '(' [int] 'n' [ ('+'|'-') int ] ')'
//! ```
//!
//! `Z` stands for `O_n - H_n/2 - ln 2`.

use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prefactor {
    /// `C(2n,n)^2`
    CentralBinomSquared,
    /// `C(2n,n)`
    CentralBinom,
}

impl Prefactor {
    /// Exponential growth rate of the prefactor.
    pub fn growth(self) -> u32 {
        match self {
            Prefactor::CentralBinomSquared => 16,
            Prefactor::CentralBinom => 4,
        }
    }

    /// Power-law decay of `prefactor / growth^n`, doubled (so that it is an
    /// integer).
    pub(crate) fn twice_decay(self) -> u32 {
        match self {
            Prefactor::CentralBinomSquared => 2,
            Prefactor::CentralBinom => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Weight {
    One,
    /// `O_n = 1 + 1/3 + ... + 1/(2n-1)`
    O,
    OSquared,
    /// `H_n`
    H,
    /// `H_{2n+1}`
    HOdd,
    /// `O_n - H_n/2 - ln 2`
    Z,
}

/// The factor `(a n + b)^power` with `a >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinearFactor {
    pub a: i64,
    pub b: i64,
    pub power: u32,
}

impl LinearFactor {
    pub fn new(a: i64, b: i64, power: u32) -> Self {
        Self { a, b, power }
    }

    /// `(2n + 1 - 2 lambda)^power`
    pub fn two_n_plus_1_minus_2lambda(lambda: i64, power: u32) -> Self {
        Self::new(2, 1 - 2 * lambda, power)
    }

    /// `n^power`
    pub fn k(power: u32) -> Self {
        Self::new(1, 0, power)
    }

    /// `(n + 1)^power`
    pub fn k_plus_1(power: u32) -> Self {
        Self::new(1, 1, power)
    }

    /// `(2n + 1)^power`
    pub fn two_n_plus_1(power: u32) -> Self {
        Self::new(2, 1, power)
    }

    pub fn at(&self, n: u64) -> i128 {
        self.a as i128 * n as i128 + self.b as i128
    }
}

/// `sum_{n >= start} prefactor(n) / base^n * weight(n) / prod factors(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeriesSpec {
    prefactor: Prefactor,
    base: Rational,
    weight: Weight,
    denominator: Vec<LinearFactor>,
    start: u64,
}

/// How the terms behave for large `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Regime {
    /// `|ratio| < 1`
    Geometric,
    /// Ratio tends to 1, positive terms with power-law decay.
    PowerLaw,
    /// Ratio tends to -1.
    Alternating,
}

impl SeriesSpec {
    pub fn new(
        prefactor: Prefactor,
        base: Rational,
        weight: Weight,
        mut denominator: Vec<LinearFactor>,
        start: u64,
    ) -> Result<Self> {
        if base.is_zero() {
            return Err(Error::InvalidSeries("base must be nonzero".into()));
        }
        for f in &denominator {
            if f.a < 1 {
                return Err(Error::InvalidSeries(format!(
                    "denominator factor needs a positive coefficient of n, got {}",
                    fmt_linear(f.a, f.b)
                )));
            }
            if f.power == 0 {
                return Err(Error::InvalidSeries("denominator powers must be positive".into()));
            }
            if f.b % f.a == 0 {
                let root = -f.b / f.a;
                if root >= start as i64 {
                    return Err(Error::InvalidSeries(format!(
                        "factor {} vanishes at n = {root}",
                        fmt_linear(f.a, f.b)
                    )));
                }
            }
        }
        denominator.sort_by_key(|f| (f.a, f.b));
        // merge repeated factors
        let mut merged: Vec<LinearFactor> = Vec::new();
        for f in denominator {
            match merged.last_mut() {
                Some(last) if last.a == f.a && last.b == f.b => last.power += f.power,
                _ => merged.push(f),
            }
        }
        let spec = Self {
            prefactor,
            base,
            weight,
            denominator: merged,
            start,
        };
        spec.regime()?;
        Ok(spec)
    }

    pub fn prefactor(&self) -> Prefactor {
        self.prefactor
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn denominator(&self) -> &[LinearFactor] {
        &self.denominator
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    /// Same series with another weight.
    pub fn with_weight(&self, weight: Weight) -> Result<Self> {
        Self::new(self.prefactor, self.base.clone(), weight, self.denominator.clone(), self.start)
    }

    /// Same series with one more denominator factor.
    pub fn with_factor(&self, factor: LinearFactor) -> Result<Self> {
        let mut d = self.denominator.clone();
        d.push(factor);
        Self::new(self.prefactor, self.base.clone(), self.weight, d, self.start)
    }

    /// Same series starting at another index.
    pub fn with_start(&self, start: u64) -> Result<Self> {
        Self::new(self.prefactor, self.base.clone(), self.weight, self.denominator.clone(), start)
    }

    /// Total power of `n` in the denominator.
    pub fn denominator_degree(&self) -> u32 {
        self.denominator.iter().map(|f| f.power).sum()
    }

    /// Limit of `|term(n+1) / term(n)|`.
    pub fn ratio_limit(&self) -> Rational {
        Rational::from(self.prefactor.growth()) / Rational::from(self.base.clone().abs())
    }

    pub(crate) fn regime(&self) -> Result<Regime> {
        let r = self.ratio_limit();
        if r > 1 {
            return Err(Error::InvalidSeries(format!(
                "terms grow geometrically (ratio {r}) and the series diverges"
            )));
        }
        if r < 1 {
            return Ok(Regime::Geometric);
        }
        let twice_alpha = self.prefactor.twice_decay() + 2 * self.denominator_degree();
        if self.base > 0 {
            if twice_alpha <= 2 {
                return Err(Error::InvalidSeries(format!(
                    "terms decay like n^-{}, too slowly to converge",
                    fmt_half(twice_alpha)
                )));
            }
            Ok(Regime::PowerLaw)
        } else {
            Ok(Regime::Alternating)
        }
    }

    /// Leading power-law decay `alpha` (terms ~ n^-alpha up to logarithms).
    pub fn decay_exponent(&self) -> Rational {
        Rational::from((self.prefactor.twice_decay() + 2 * self.denominator_degree(), 2))
    }
}

fn fmt_half(twice: u32) -> String {
    if twice % 2 == 0 {
        format!("{}", twice / 2)
    } else {
        format!("{}/2", twice)
    }
}

fn fmt_linear(a: i64, b: i64) -> String {
    let mut s = if a == 1 { "n".to_string() } else { format!("{a}n") };
    if b > 0 {
        s.push_str(&format!("+{b}"));
    } else if b < 0 {
        s.push_str(&format!("-{}", -b));
    }
    s
}

fn fmt_unit(f: &LinearFactor) -> String {
    let atom = if f.a == 1 && f.b == 0 {
        "n".to_string()
    } else {
        format!("({})", fmt_linear(f.a, f.b))
    };
    if f.power == 1 {
        atom
    } else {
        format!("{atom}^{}", f.power)
    }
}

fn fmt_base(b: &Rational) -> String {
    if *b.denom() == 1 && *b > 0 {
        b.numer().to_string()
    } else {
        format!("({b})")
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weight::One => "1",
            Weight::O => "O",
            Weight::OSquared => "O^2",
            Weight::H => "H",
            Weight::HOdd => "H_{2n+1}",
            Weight::Z => "Z",
        })
    }
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.prefactor {
            Prefactor::CentralBinomSquared => "binom2",
            Prefactor::CentralBinom => "binom",
        };
        write!(f, "{prefix}/{}^n * {}", fmt_base(&self.base), self.weight)?;
        match self.denominator.len() {
            0 => {}
            1 => write!(f, " / {}", fmt_unit(&self.denominator[0]))?,
            _ => {
                let parts: Vec<String> = self.denominator.iter().map(fmt_unit).collect();
                write!(f, " / ({})", parts.join("*"))?;
            }
        }
        write!(f, " from n={}", self.start)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    /// byte offsets into the original text, one per kept character
    offsets: Vec<usize>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> (Vec<u8>, Vec<usize>) {
        let mut chars = Vec::new();
        let mut offsets = Vec::new();
        for (i, c) in text.char_indices() {
            if !c.is_whitespace() {
                // non-ASCII characters are kept as a marker that never matches
                chars.push(if c.is_ascii() { c as u8 } else { 0 });
                offsets.push(i);
            }
        }
        (chars, offsets)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let pos = self
            .offsets
            .get(self.pos)
            .copied()
            .unwrap_or_else(|| self.offsets.last().map(|p| p + 1).unwrap_or(0));
        Err(Error::SeriesSyntax {
            pos,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn int(&mut self) -> Result<u64> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        match s.parse() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("integer out of range")
            }
        }
    }

    fn base(&mut self) -> Result<Rational> {
        if self.eat("(") {
            let neg = self.eat("-");
            let num = self.int()?;
            let den = if self.eat("/") { self.int()? } else { 1 };
            if den == 0 {
                return self.err("zero denominator in base");
            }
            self.expect(")")?;
            let r = Rational::from((Integer::from(num), Integer::from(den)));
            Ok(if neg { -r } else { r })
        } else {
            Ok(Rational::from(self.int()?))
        }
    }

    fn weight(&mut self) -> Result<Weight> {
        if self.eat("H_{2n+1}") {
            Ok(Weight::HOdd)
        } else if self.eat("O^2") {
            Ok(Weight::OSquared)
        } else if self.eat("O") {
            Ok(Weight::O)
        } else if self.eat("H") {
            Ok(Weight::H)
        } else if self.eat("Z") {
            Ok(Weight::Z)
        } else if self.eat("1") {
            Ok(Weight::One)
        } else {
            self.err("expected a weight (1, O, O^2, H, H_{2n+1}, Z)")
        }
    }

    /// `[int] 'n' [('+'|'-') int]`
    fn linear(&mut self) -> Result<(i64, i64)> {
        let a = if matches!(self.peek(), Some(b'0'..=b'9')) {
            self.int()? as i64
        } else {
            1
        };
        self.expect("n")?;
        let b = if self.eat("+") {
            self.int()? as i64
        } else if self.eat("-") {
            -(self.int()? as i64)
        } else {
            0
        };
        Ok((a, b))
    }

    fn power(&mut self) -> Result<u32> {
        if self.eat("^") {
            let p = self.int()?;
            if p == 0 || p > 64 {
                return self.err("power must be between 1 and 64");
            }
            Ok(p as u32)
        } else {
            Ok(1)
        }
    }

    fn unit(&mut self) -> Result<LinearFactor> {
        if self.eat("n") {
            return Ok(LinearFactor::new(1, 0, self.power()?));
        }
        self.expect("(")?;
        let (a, b) = self.linear()?;
        self.expect(")")?;
        Ok(LinearFactor::new(a, b, self.power()?))
    }

    fn denominator(&mut self) -> Result<Vec<LinearFactor>> {
        let save = self.pos;
        if let Ok(u) = self.unit() {
            if self.peek() != Some(b'*') {
                return Ok(vec![u]);
            }
        }
        self.pos = save;
        self.expect("(")?;
        let mut out = vec![self.unit()?];
        while self.eat("*") {
            out.push(self.unit()?);
        }
        self.expect(")")?;
        Ok(out)
    }

    fn spec(&mut self) -> Result<SeriesSpec> {
        let prefactor = if self.eat("binom2") {
            Prefactor::CentralBinomSquared
        } else if self.eat("binom") {
            Prefactor::CentralBinom
        } else {
            return self.err("expected `binom2` or `binom`");
        };
        self.expect("/")?;
        let base = self.base()?;
        self.expect("^n")?;
        let weight = if self.eat("*") { self.weight()? } else { Weight::One };
        let denominator = if self.eat("/") { self.denominator()? } else { Vec::new() };
        self.expect("from")?;
        self.expect("n=")?;
        let start = self.int()?;
        if self.pos != self.src.len() {
            return self.err("unexpected trailing input");
        }
        SeriesSpec::new(prefactor, base, weight, denominator, start)
    }
}

impl FromStr for SeriesSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (chars, offsets) = Parser::new(s);
        let mut p = Parser {
            src: &chars,
            offsets,
            pos: 0,
        };
        p.spec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_examples() {
        let s: SeriesSpec = "binom2/16^n * O^2 / (2n-1)^2 from n=1".parse().unwrap();
        assert_eq!(s.weight(), Weight::OSquared);
        assert_eq!(s.denominator(), &[LinearFactor::new(2, -1, 2)]);
        assert_eq!(s.start(), 1);
        let t: SeriesSpec = "binom2/16^n * 1/(2n+1) from n=0".parse().unwrap();
        assert_eq!(t.denominator(), &[LinearFactor::two_n_plus_1(1)]);
        assert_eq!(t.to_string(), "binom2/16^n * 1 / (2n+1) from n=0");
    }

    #[test]
    fn round_trips() {
        for text in [
            "binom2/16^n * Z / (2n+1) from n=0",
            "binom/(-16)^n * H_{2n+1} / (2n+1)^2 from n=0",
            "binom2/16^n * 1 / (n*(2n-1)^3) from n=1",
            "binom2/16^n * 1 / n^3 from n=1",
            "binom2/(100/3)^n * H from n=0",
            "binom/4^n * 1 / (2n+1)^4 from n=0",
            "binom2/16^n * O / (n+1)^2 from n=0",
        ] {
            let s: SeriesSpec = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
            let again: SeriesSpec = s.to_string().parse().unwrap();
            assert_eq!(again, s);
        }
    }

    #[test]
    fn whitespace_insensitive() {
        let a: SeriesSpec = "binom2 / 16 ^ n * O ^ 2 / ( 2 n - 1 ) ^ 2 from n = 1".parse().unwrap();
        let b: SeriesSpec = "binom2/16^n*O^2/(2n-1)^2fromn=1".parse().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_specs() {
        // vanishing factor
        assert!(matches!(
            "binom2/16^n * 1 / (2n-4) from n=1".parse::<SeriesSpec>(),
            Err(Error::InvalidSeries(_))
        ));
        assert!("binom2/16^n * 1 / n from n=0".parse::<SeriesSpec>().is_err());
        // divergent
        assert!("binom2/16^n * O from n=1".parse::<SeriesSpec>().is_err());
        assert!("binom2/8^n * 1 / n^2 from n=1".parse::<SeriesSpec>().is_err());
        assert!("binom/4^n * 1 / n^0 from n=1".parse::<SeriesSpec>().is_err());
        // syntax
        match "binom2/16^n * Q from n=1".parse::<SeriesSpec>() {
            Err(Error::SeriesSyntax { pos, .. }) => assert_eq!(pos, 14),
            other => panic!("{other:?}"),
        }
        assert!("binom2/16^n from n=1 extra".parse::<SeriesSpec>().is_err());
    }

    #[test]
    fn regimes() {
        let s: SeriesSpec = "binom/(-16)^n * H_{2n+1} / (2n+1)^2 from n=0".parse().unwrap();
        assert_eq!(s.regime().unwrap(), Regime::Geometric);
        let s: SeriesSpec = "binom2/(-16)^n * O from n=1".parse().unwrap();
        assert_eq!(s.regime().unwrap(), Regime::Alternating);
        let s: SeriesSpec = "binom/4^n * 1 / (2n+1)^2 from n=0".parse().unwrap();
        assert_eq!(s.regime().unwrap(), Regime::PowerLaw);
        assert_eq!(s.decay_exponent(), Rational::from((5, 2)));
    }
}
