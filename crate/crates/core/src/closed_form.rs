//! Exact rational combinations of constant monomials.
//!
//! Text grammar (whitespace is ignored):
//!
//! ```text
//! sum     := ['+'|'-'] product (('+'|'-') product)*
//! product := power (('*'|'/') power)*
//! power   := primary ['^' int]
//! primary := int | atom | '(' sum ')'
//! atom    := pi | ln2 | G | Gs | zeta3 | beta4 | ImLi4half | ImLi4omi
//! ```
//!
//! Division is only allowed by a nonzero rational or by a power of `pi`.
//! Rendering is canonical: terms are sorted by monomial, each written as
//! `coefficient*atoms` with a trailing `/pi` for a negative `pi` exponent.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{fundamental, ConstantName, PrecisionContext, Real};
use crate::polylog;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Pi,
    Ln2,
    CatalanG,
    /// Im Li3((1+i)/2)
    ScriptG,
    Zeta3,
    Beta4,
    /// Im Li4((1+i)/2)
    ImLi4Half,
    /// Im Li4(1-i)
    ImLi4OneMinusI,
}

/// Atoms other than `pi`, in canonical order.
pub const NON_PI_ATOMS: [Atom; 7] = [
    Atom::Ln2,
    Atom::CatalanG,
    Atom::ScriptG,
    Atom::Zeta3,
    Atom::Beta4,
    Atom::ImLi4Half,
    Atom::ImLi4OneMinusI,
];

impl Atom {
    pub const ALL: [Atom; 8] = [
        Atom::Pi,
        Atom::Ln2,
        Atom::CatalanG,
        Atom::ScriptG,
        Atom::Zeta3,
        Atom::Beta4,
        Atom::ImLi4Half,
        Atom::ImLi4OneMinusI,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Atom::Pi => "pi",
            Atom::Ln2 => "ln2",
            Atom::CatalanG => "G",
            Atom::ScriptG => "Gs",
            Atom::Zeta3 => "zeta3",
            Atom::Beta4 => "beta4",
            Atom::ImLi4Half => "ImLi4half",
            Atom::ImLi4OneMinusI => "ImLi4omi",
        }
    }

    pub fn from_name(name: &str) -> Option<Atom> {
        Atom::ALL.into_iter().find(|a| a.name() == name)
    }

    fn slot(self) -> Option<usize> {
        NON_PI_ATOMS.iter().position(|&a| a == self)
    }

    fn max_exponent(self) -> u32 {
        match self {
            Atom::Pi => 3,
            Atom::Ln2 => 3,
            _ => 2,
        }
    }

    /// Numeric value at the precision of `ctx`, cached per precision.
    pub fn value(self, ctx: &PrecisionContext) -> Real {
        type Cache = Mutex<HashMap<(Atom, u32), Real>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (self, ctx.bits());
        if let Some(v) = cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = match self {
            Atom::Pi => fundamental(ConstantName::Pi, ctx),
            Atom::Ln2 => fundamental(ConstantName::Ln2, ctx),
            Atom::CatalanG => fundamental(ConstantName::CatalanG, ctx),
            Atom::Zeta3 => fundamental(ConstantName::Zeta3, ctx),
            Atom::Beta4 => fundamental(ConstantName::Beta4, ctx),
            Atom::ScriptG => polylog::script_g(ctx),
            Atom::ImLi4Half => polylog::im_li4_half(ctx),
            Atom::ImLi4OneMinusI => polylog::im_li4_one_minus_i(ctx),
        };
        cache.lock().unwrap().insert(key, v.clone());
        v
    }
}

pub const MIN_PI_EXPONENT: i32 = -1;
pub const MAX_PI_EXPONENT: i32 = 3;
pub const MAX_DEGREE: u32 = 4;

/// `pi^pi_exponent * prod atom^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    pi_exponent: i32,
    exponents: [u32; 7],
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn new(pi_exponent: i32, factors: &[(Atom, u32)]) -> Result<Self> {
        let mut m = Monomial {
            pi_exponent,
            exponents: [0; 7],
        };
        for &(a, e) in factors {
            match a.slot() {
                Some(i) => m.exponents[i] += e,
                None => m.pi_exponent += e as i32,
            }
        }
        m.check()?;
        Ok(m)
    }

    pub fn atom(a: Atom) -> Self {
        Self::new(0, &[(a, 1)]).expect("single atom is in bounds")
    }

    pub fn pi_exponent(&self) -> i32 {
        self.pi_exponent
    }

    pub fn exponent(&self, a: Atom) -> i32 {
        match a.slot() {
            Some(i) => self.exponents[i] as i32,
            None => self.pi_exponent,
        }
    }

    /// `max(pi exponent, 0)` plus the other exponents.
    pub fn degree(&self) -> u32 {
        self.pi_exponent.max(0) as u32 + self.exponents.iter().sum::<u32>()
    }

    fn check(&self) -> Result<()> {
        if !(MIN_PI_EXPONENT..=MAX_PI_EXPONENT).contains(&self.pi_exponent) {
            return Err(Error::ExponentOutOfBounds(format!(
                "pi^{} in {self}",
                self.pi_exponent
            )));
        }
        for (a, &e) in NON_PI_ATOMS.iter().zip(&self.exponents) {
            if e > a.max_exponent() {
                return Err(Error::ExponentOutOfBounds(format!("{}^{e} in {self}", a.name())));
            }
        }
        if self.degree() > MAX_DEGREE {
            return Err(Error::ExponentOutOfBounds(format!(
                "total degree {} of {self}",
                self.degree()
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        let mut m = *self;
        m.pi_exponent += other.pi_exponent;
        for i in 0..7 {
            m.exponents[i] += other.exponents[i];
        }
        m.check()?;
        Ok(m)
    }

    pub fn shift_pi(&self, by: i32) -> Result<Monomial> {
        let mut m = *self;
        m.pi_exponent += by;
        m.check()?;
        Ok(m)
    }

    pub fn is_one(&self) -> bool {
        *self == Monomial::one()
    }

    /// Value from precomputed atom values.
    pub fn eval_with(&self, atoms: &AtomValues) -> Real {
        let bits = atoms.pi.prec();
        let mut v = Float::with_val(bits, 1);
        match self.pi_exponent {
            0 => {}
            e if e > 0 => v *= Float::with_val(bits, (&atoms.pi).pow(e)),
            e => v /= Float::with_val(bits, (&atoms.pi).pow(-e)),
        }
        for (x, &e) in atoms.others.iter().zip(&self.exponents) {
            if e > 0 {
                v *= Float::with_val(bits, x.pow(e));
            }
        }
        v
    }

    pub fn eval(&self, ctx: &PrecisionContext) -> Real {
        self.eval_with(&AtomValues::new(ctx, self.atoms()))
    }

    fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        NON_PI_ATOMS
            .iter()
            .zip(&self.exponents)
            .filter(|(_, &e)| e > 0)
            .map(|(&a, _)| a)
    }

    fn sort_key(&self) -> (u32, [i64; 8]) {
        let mut k = [0i64; 8];
        k[0] = -(self.pi_exponent as i64);
        for i in 0..7 {
            k[i + 1] = -(self.exponents[i] as i64);
        }
        (self.degree(), k)
    }

    /// Numerator atoms as text, without the `/pi` part.
    fn numerator_text(&self) -> String {
        let mut parts = Vec::new();
        if self.pi_exponent == 1 {
            parts.push("pi".to_string());
        } else if self.pi_exponent > 1 {
            parts.push(format!("pi^{}", self.pi_exponent));
        }
        for (a, &e) in NON_PI_ATOMS.iter().zip(&self.exponents) {
            match e {
                0 => {}
                1 => parts.push(a.name().to_string()),
                _ => parts.push(format!("{}^{e}", a.name())),
            }
        }
        parts.join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.numerator_text();
        let num = if num.is_empty() { "1".to_string() } else { num };
        if self.pi_exponent < 0 {
            write!(f, "{num}/pi")?;
            if self.pi_exponent < -1 {
                write!(f, "^{}", -self.pi_exponent)?;
            }
            Ok(())
        } else {
            f.write_str(&num)
        }
    }
}

/// Atom values at one precision.
pub struct AtomValues {
    pi: Real,
    others: Vec<Real>,
}

impl AtomValues {
    /// Fetches `pi` plus the listed atoms; unused slots stay zero.
    pub fn new(ctx: &PrecisionContext, needed: impl IntoIterator<Item = Atom>) -> Self {
        let mut others = vec![ctx.zero(); 7];
        for a in needed {
            if let Some(i) = a.slot() {
                if others[i].is_zero() {
                    others[i] = a.value(ctx);
                }
            }
        }
        AtomValues {
            pi: Atom::Pi.value(ctx),
            others,
        }
    }

    pub fn all(ctx: &PrecisionContext) -> Self {
        Self::new(ctx, Atom::ALL)
    }
}

/// Sum of rational multiples of monomials with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClosedForm {
    terms: BTreeMap<Monomial, Rational>,
}

impl ClosedForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(q: impl Into<Rational>) -> Self {
        Self::term(q, Monomial::one())
    }

    pub fn term(q: impl Into<Rational>, m: Monomial) -> Self {
        let mut cf = Self::zero();
        cf.add_term(q.into(), m);
        cf
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut cf = Self::zero();
        for (m, q) in terms {
            cf.add_term(q, m);
        }
        cf
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, q: Rational, m: Monomial) {
        if q == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_default();
        *entry += q;
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        combine(self, q, &ClosedForm::zero(), &Rational::new())
    }

    pub fn add(&self, other: &ClosedForm) -> Self {
        combine(self, &Rational::from(1), other, &Rational::from(1))
    }

    pub fn sub(&self, other: &ClosedForm) -> Self {
        combine(self, &Rational::from(1), other, &Rational::from(-1))
    }

    /// Product of two forms; fails if a monomial leaves the basis.
    pub fn mul(&self, other: &ClosedForm) -> Result<Self> {
        let mut out = ClosedForm::zero();
        for (ma, qa) in &self.terms {
            for (mb, qb) in &other.terms {
                out.add_term(Rational::from(qa * qb), ma.mul(mb)?);
            }
        }
        Ok(out)
    }

    /// Multiplies every monomial by `pi^by`.
    pub fn shift_pi(&self, by: i32) -> Result<Self> {
        let mut out = ClosedForm::zero();
        for (m, q) in &self.terms {
            out.add_term(q.clone(), m.shift_pi(by)?);
        }
        Ok(out)
    }

    /// The monomials appearing with nonzero coefficient.
    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms.keys().copied().collect()
    }

    pub fn atoms(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = Vec::new();
        for m in self.terms.keys() {
            for a in m.atoms() {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }

    pub fn eval(&self, ctx: &PrecisionContext) -> Real {
        cf_eval(self, ctx)
    }
}

/// `ca*a + cb*b`, exactly.
pub fn cf_combine(a: &ClosedForm, ca: &Rational, b: &ClosedForm, cb: &Rational) -> ClosedForm {
    combine(a, ca, b, cb)
}

fn combine(a: &ClosedForm, ca: &Rational, b: &ClosedForm, cb: &Rational) -> ClosedForm {
    let mut out = ClosedForm::zero();
    if *ca != 0 {
        for (m, q) in &a.terms {
            out.add_term(Rational::from(q * ca), *m);
        }
    }
    if *cb != 0 {
        for (m, q) in &b.terms {
            out.add_term(Rational::from(q * cb), *m);
        }
    }
    out
}

/// Numeric value; atoms are fetched once.
pub fn cf_eval(cf: &ClosedForm, ctx: &PrecisionContext) -> Real {
    let atoms = AtomValues::new(ctx, cf.atoms());
    let bits = ctx.bits();
    let mut acc = Float::new(bits);
    for (m, q) in &cf.terms {
        let v = m.eval_with(&atoms);
        acc += Float::with_val(bits, &v * q);
    }
    acc
}

pub fn cf_parse(text: &str) -> Result<ClosedForm> {
    text.parse()
}

pub fn cf_render(cf: &ClosedForm) -> String {
    cf.to_string()
}

fn fmt_coefficient_term(q: &Rational, m: &Monomial) -> String {
    let num = m.numerator_text();
    let one = *q.numer() == 1 && *q.denom() == 1;
    let mut s = if num.is_empty() {
        q.to_string()
    } else if one {
        num
    } else {
        format!("{q}*{num}")
    };
    if m.pi_exponent < 0 {
        s.push_str("/pi");
        if m.pi_exponent < -1 {
            s.push_str(&format!("^{}", -m.pi_exponent));
        }
    }
    s
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, q)) in self.terms.iter().enumerate() {
            let neg = *q < 0;
            let abs = Rational::from(q.abs_ref());
            let body = fmt_coefficient_term(&abs, m);
            match (i, neg) {
                (0, false) => f.write_str(&body)?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for ClosedForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ClosedForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    offsets: Vec<usize>,
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let pos = self
            .offsets
            .get(self.pos)
            .copied()
            .unwrap_or_else(|| self.offsets.last().map_or(0, |p| p + 1));
        Err(Error::ClosedFormSyntax {
            pos,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<ClosedForm> {
        let mut neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let mut acc = ClosedForm::zero();
        loop {
            let t = self.product()?;
            acc = if neg { acc.sub(&t) } else { acc.add(&t) };
            if self.eat(b'+') {
                neg = false;
            } else if self.eat(b'-') {
                neg = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<ClosedForm> {
        let mut acc = self.power()?;
        loop {
            if self.eat(b'*') {
                let at = self.pos;
                let rhs = self.power()?;
                acc = acc.mul(&rhs).or_else(|e| {
                    self.pos = at;
                    self.err(e.to_string())
                })?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let rhs = self.power()?;
                acc = self.divide(acc, &rhs, at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn divide(&mut self, acc: ClosedForm, rhs: &ClosedForm, at: usize) -> Result<ClosedForm> {
        if rhs.len() == 1 {
            let (m, q) = rhs.terms().next().expect("one term");
            if m.is_one() {
                return Ok(acc.scale(&Rational::from(q.recip_ref())));
            }
            let mut only_pi = *m;
            only_pi.pi_exponent = 0;
            if only_pi.is_one() {
                return match acc.shift_pi(-m.pi_exponent) {
                    Ok(v) => Ok(v.scale(&Rational::from(q.recip_ref()))),
                    Err(e) => {
                        self.pos = at;
                        self.err(e.to_string())
                    }
                };
            }
        }
        self.pos = at;
        if rhs.is_zero() {
            self.err("division by zero")
        } else {
            self.err("can only divide by a rational number or a power of pi")
        }
    }

    fn power(&mut self) -> Result<ClosedForm> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let at = self.pos;
            let e = self.int()?;
            if e > 8 {
                self.pos = at;
                return self.err("exponent too large");
            }
            let e = e.to_u32().expect("small");
            let mut acc = ClosedForm::rational(1);
            for _ in 0..e {
                acc = acc.mul(&base).or_else(|err| {
                    self.pos = at;
                    self.err(err.to_string())
                })?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn int(&mut self) -> Result<Integer> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits"))
    }

    fn primary(&mut self) -> Result<ClosedForm> {
        match self.peek() {
            Some(b'0'..=b'9') => Ok(ClosedForm::rational(self.int()?)),
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match Atom::from_name(name) {
                    Some(a) => Ok(ClosedForm::term(1, Monomial::atom(a))),
                    None => {
                        self.pos = start;
                        self.err(format!("unknown atom `{name}`"))
                    }
                }
            }
            _ => self.err("expected a number, an atom or `(`"),
        }
    }
}

impl FromStr for ClosedForm {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut src = Vec::new();
        let mut offsets = Vec::new();
        for (i, b) in text.bytes().enumerate() {
            if !b.is_ascii_whitespace() {
                src.push(b);
                offsets.push(i);
            }
        }
        let mut p = Parser {
            src: &src,
            offsets,
            pos: 0,
        };
        if src.is_empty() {
            return p.err("empty expression");
        }
        let v = p.sum()?;
        if p.pos != src.len() {
            return p.err("unexpected trailing input");
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{context, pow10};

    fn cf(s: &str) -> ClosedForm {
        s.parse().unwrap()
    }

    const THM21: &str =
        "-8*G/pi - 8*G*ln2/pi - 48*Gs/pi + 9/8*pi^2 + 1/6*pi + 4*ln2^2/pi + 3/2*ln2^2";

    #[test]
    fn parses_simple_forms() {
        let f = cf("4*G/pi");
        let m = Monomial::new(-1, &[(Atom::CatalanG, 1)]).unwrap();
        assert_eq!(f, ClosedForm::term(4, m));
        assert_eq!(f.to_string(), "4*G/pi");
        assert_eq!(cf("1/pi").to_string(), "1/pi");
        assert_eq!(cf("-pi/12").to_string(), "-1/12*pi");
        assert_eq!(cf("0").to_string(), "0");
        assert!(cf("G - G").is_zero());
    }

    #[test]
    fn long_form_round_trips() {
        let f = cf(THM21);
        assert_eq!(f.len(), 7);
        let again = cf(&f.to_string());
        assert_eq!(again, f);
        assert_eq!(
            f.coefficient(&Monomial::new(-1, &[(Atom::ScriptG, 1)]).unwrap()),
            -48
        );
    }

    #[test]
    fn parentheses_and_division() {
        let a = cf("(2/pi)*(pi/2 + 2*G - 3)");
        assert_eq!(a, cf("1 + 4*G/pi - 6/pi"));
        let b = cf("pi^3/pi");
        assert_eq!(b, cf("pi^2"));
        assert_eq!(cf("-(4*ln2*2+3)/(2*9*pi)"), cf("-8/18*ln2/pi - 3/18/pi"));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            "4*Q/pi".parse::<ClosedForm>(),
            Err(Error::ClosedFormSyntax { pos: 2, .. })
        ));
        assert!(matches!(
            "1/pi^2".parse::<ClosedForm>(),
            Err(Error::ClosedFormSyntax { .. })
        ));
        assert!("G^3".parse::<ClosedForm>().is_err());
        assert!("ln2^4".parse::<ClosedForm>().is_err());
        assert!("pi^4".parse::<ClosedForm>().is_err());
        assert!("1/G".parse::<ClosedForm>().is_err());
        assert!("1/0".parse::<ClosedForm>().is_err());
        assert!("".parse::<ClosedForm>().is_err());
        assert!("4*G/pi)".parse::<ClosedForm>().is_err());
        assert!(Monomial::new(-2, &[]).is_err());
        assert!(Monomial::new(2, &[(Atom::Ln2, 3)]).is_err());
    }

    #[test]
    fn combine_and_scale() {
        let x = cf(THM21);
        assert!(cf_combine(&x, &Rational::from(1), &x, &Rational::from(-1)).is_zero());
        let y = cf_combine(&x, &Rational::from(4), &ClosedForm::zero(), &Rational::new());
        for (m, q) in y.terms() {
            assert_eq!(*q, Rational::from(x.coefficient(m) * 4u32));
        }
    }

    #[test]
    fn evaluation() {
        let ctx = context(30).unwrap();
        assert!(cf_eval(&ClosedForm::zero(), &ctx).is_zero());
        let v = cf_eval(&cf("4*G/pi"), &ctx);
        let expect = Atom::CatalanG.value(&ctx) * 4u32 / Atom::Pi.value(&ctx);
        assert!(Float::with_val(ctx.bits(), &v - &expect).abs() < pow10(-40, ctx.bits()));
        let t = cf_eval(&cf(THM21), &ctx);
        let spec = "binom2/16^n * O^2 / (2n-1)^2 from n=1".parse().unwrap();
        let (lhs, _) = crate::series::sum_accelerated(&spec, &ctx).unwrap();
        assert!(Float::with_val(ctx.bits(), &t - &lhs).abs() < pow10(-28, ctx.bits()));
    }
}
