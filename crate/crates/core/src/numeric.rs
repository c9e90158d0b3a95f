//! Precision management and the scalar fundamental constants.
//!
//! Every numeric routine in the crate takes a [`PrecisionContext`]. The
//! context records the number of decimal digits the caller wants back and a
//! number of guard digits that are carried internally; the binary working
//! precision is `ceil((digits + guard) * log2(10))` bits with MPFR's default
//! round-to-nearest.

use std::sync::OnceLock;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Working real type.
pub type Real = Float;

/// Default number of guard digits.
pub const DEFAULT_GUARD_DIGITS: u32 = 15;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Immutable precision settings shared by all evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    decimal_digits: u32,
    guard_digits: u32,
}

impl PrecisionContext {
    pub fn new(decimal_digits: u32) -> Result<Self> {
        Self::with_guard(decimal_digits, DEFAULT_GUARD_DIGITS)
    }

    pub fn with_guard(decimal_digits: u32, guard_digits: u32) -> Result<Self> {
        if decimal_digits == 0 || guard_digits == 0 {
            return Err(Error::InvalidPrecision);
        }
        Ok(Self {
            decimal_digits,
            guard_digits,
        })
    }

    pub fn decimal_digits(&self) -> u32 {
        self.decimal_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    /// Output digits plus guard digits.
    pub fn working_digits(&self) -> u32 {
        self.decimal_digits + self.guard_digits
    }

    /// Binary working precision.
    pub fn bits(&self) -> u32 {
        (self.working_digits() as f64 * LOG2_10).ceil() as u32
    }

    /// A context asking for `extra` more output digits, same guard.
    pub fn widened(&self, extra: u32) -> Self {
        Self {
            decimal_digits: self.decimal_digits + extra,
            guard_digits: self.guard_digits,
        }
    }

    pub fn real<T>(&self, value: T) -> Real
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits(), value)
    }

    pub fn zero(&self) -> Real {
        Float::new(self.bits())
    }

    /// `10^-working_digits`, the scale of rounding noise.
    pub fn epsilon(&self) -> Real {
        pow10(-(self.working_digits() as i32), self.bits())
    }

    /// `10^-decimal_digits`.
    pub fn tolerance(&self) -> Real {
        pow10(-(self.decimal_digits as i32), self.bits())
    }
}

/// Builds a context; rejects zero digits.
pub fn context(decimal_digits: u32) -> Result<PrecisionContext> {
    PrecisionContext::new(decimal_digits)
}

pub(crate) fn pow10(exp: i32, bits: u32) -> Real {
    let ten = Float::with_val(bits, 10);
    ten.pow(exp)
}

/// The scalar constants with dedicated evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstantName {
    Pi,
    Ln2,
    CatalanG,
    Zeta3,
    Beta4,
}

impl ConstantName {
    pub const ALL: [ConstantName; 5] = [
        ConstantName::Pi,
        ConstantName::Ln2,
        ConstantName::CatalanG,
        ConstantName::Zeta3,
        ConstantName::Beta4,
    ];
}

/// Evaluates a fundamental constant at the context's working precision.
pub fn fundamental(name: ConstantName, ctx: &PrecisionContext) -> Real {
    let bits = ctx.bits();
    match name {
        ConstantName::Pi => Float::with_val(bits, Constant::Pi),
        ConstantName::Ln2 => Float::with_val(bits, Constant::Log2),
        ConstantName::CatalanG => dirichlet_beta(2, bits),
        ConstantName::Beta4 => dirichlet_beta(4, bits),
        ConstantName::Zeta3 => apery_zeta3(bits),
    }
}

/// `beta(s) = sum (-1)^n / (2n+1)^s`, accelerated.
fn dirichlet_beta(s: u32, bits: u32) -> Real {
    let wp = bits + 16;
    alternating_sum(wp, |k| {
        let d = Float::with_val(wp, 2 * k + 1);
        d.pow(s).recip()
    })
    .round_to(bits)
}

/// `zeta(3) = 5/2 sum_{n>=1} (-1)^{n+1} / (n^3 binom(2n, n))`.
fn apery_zeta3(bits: u32) -> Real {
    let wp = bits + 16;
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    // binom(2n,n) grows like 4^n, so terms shrink by a factor four.
    let mut binom = Float::with_val(wp, 2);
    let mut sum = Float::new(wp);
    let mut n: u64 = 1;
    loop {
        let cube = Float::with_val(wp, n).pow(3u32);
        let term = Float::with_val(wp, &cube * &binom).recip();
        if n % 2 == 1 {
            sum += &term;
        } else {
            sum -= &term;
        }
        if term < eps {
            break;
        }
        n += 1;
        binom *= 2 * (2 * n - 1);
        binom /= n;
    }
    sum *= 5;
    sum /= 2;
    sum.round_to(bits)
}

trait RoundTo {
    fn round_to(self, bits: u32) -> Real;
}

impl RoundTo for Real {
    fn round_to(mut self, bits: u32) -> Real {
        self.set_prec(bits);
        self
    }
}

/// Cohen-Rodriguez Villegas-Zagier acceleration of `sum_{k>=0} (-1)^k a_k`
/// for totally monotone `a_k`. The error is below `2 (3+sqrt 8)^-n` times
/// the first term.
pub(crate) fn alternating_sum(bits: u32, mut term: impl FnMut(u64) -> Real) -> Real {
    // log2(3 + sqrt 8) = 2.5431...
    let n = (bits as f64 / 2.543).ceil() as u64 + 4;
    let wp = bits + 32;
    let root8 = Float::with_val(wp, 8).sqrt();
    let base = Float::with_val(wp, root8 + 3);
    let mut d = base.pow(n as u32);
    let inv = Float::with_val(wp, d.recip_ref());
    d += inv;
    d /= 2;
    let mut b = Float::with_val(wp, -1);
    let mut c = Float::with_val(wp, -&d);
    let mut s = Float::new(wp);
    for k in 0..n {
        c = Float::with_val(wp, &b - &c);
        let a = term(k);
        s += Float::with_val(wp, &c * &a);
        let (ki, ni) = (k as i64, n as i64);
        b *= (ki + ni) * (ki - ni);
        b *= 2;
        b /= (2 * ki + 1) * (ki + 1);
    }
    s / d
}

const BERNOULLI_TABLE_LEN: usize = 130;

/// Exact Bernoulli numbers `B_0 .. B_129` with `B_1 = -1/2`.
pub(crate) fn bernoulli_table() -> &'static [Rational] {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut b: Vec<Rational> = Vec::with_capacity(BERNOULLI_TABLE_LEN);
        b.push(Rational::from(1));
        for m in 1..BERNOULLI_TABLE_LEN as u32 {
            if m > 1 && m % 2 == 1 {
                b.push(Rational::new());
                continue;
            }
            let mut acc = Rational::new();
            for (k, bk) in b.iter().enumerate() {
                if bk.is_zero() {
                    continue;
                }
                let c = Integer::from(Integer::binomial_u(m + 1, k as u32));
                acc += Rational::from(bk * c);
            }
            acc /= m + 1;
            b.push(-acc);
        }
        b
    })
}

/// Exact `B_n`, or `None` past the cached table.
pub(crate) fn bernoulli(n: usize) -> Option<&'static Rational> {
    bernoulli_table().get(n)
}

/// `zeta(n)` for integer `n >= 2`.
pub fn zeta_int(n: u32, ctx: &PrecisionContext) -> Result<Real> {
    if n < 2 {
        return Err(Error::Domain(format!("zeta({n}) is not finite")));
    }
    let bits = ctx.bits();
    if n == 3 {
        return Ok(fundamental(ConstantName::Zeta3, ctx));
    }
    if n % 2 == 0 && (n as usize) < BERNOULLI_TABLE_LEN {
        // zeta(2m) = |B_2m| (2 pi)^(2m) / (2 (2m)!)
        let b = bernoulli(n as usize).expect("table").clone().abs();
        let pi = Float::with_val(bits + 16, Constant::Pi);
        let two_pi = Float::with_val(bits + 16, pi * 2);
        let mut v = two_pi.pow(n);
        v *= &b;
        v /= Float::with_val(bits + 16, Integer::from(Integer::factorial(n)));
        v /= 2;
        return Ok(v.round_to(bits));
    }
    let wp = bits + 16;
    let eta = alternating_sum(wp, |k| Float::with_val(wp, k + 1).pow(n).recip());
    let factor = Float::with_val(wp, 1) - Float::with_val(wp, Float::i_exp(1, 1 - n as i32));
    Ok((eta / factor).round_to(bits))
}

/// Fixed-notation decimal string with `digits` significant digits.
pub fn to_decimal(x: &Real, digits: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let (neg, mantissa, exp) = x.to_sign_string_exp(10, Some(digits as usize));
    let exp = exp.unwrap_or(0);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    // value = 0.mantissa * 10^exp
    if exp <= 0 {
        out.push_str("0.");
        for _ in 0..(-exp) {
            out.push('0');
        }
        out.push_str(&mantissa);
    } else {
        let e = exp as usize;
        if e >= mantissa.len() {
            out.push_str(&mantissa);
            for _ in mantissa.len()..e {
                out.push('0');
            }
        } else {
            out.push_str(&mantissa[..e]);
            out.push('.');
            out.push_str(&mantissa[e..]);
        }
    }
    out
}

/// Short scientific rendering, e.g. `1.23e-40`.
pub fn to_scientific(x: &Real, digits: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let (neg, mantissa, exp) = x.to_sign_string_exp(10, Some(digits.max(1) as usize));
    let exp = exp.unwrap_or(0) - 1;
    let sign = if neg { "-" } else { "" };
    let (head, tail) = mantissa.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{exp}")
    } else {
        format!("{sign}{head}.{tail}e{exp}")
    }
}

/// Number of decimal digits to which `|a - b|` is small, i.e.
/// `floor(-log10 |a - b|)`, clamped to `[0, cap]`.
pub fn digits_agreed(diff: &Real, cap: u32) -> u32 {
    if diff.is_zero() {
        return cap;
    }
    let d = Float::with_val(64, diff.abs_ref());
    let l = -d.log10().to_f64();
    if l.is_nan() || l <= 0.0 {
        0
    } else {
        (l.floor() as u32).min(cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_defaults_and_boundaries() {
        let c = context(50).unwrap();
        assert_eq!(c.decimal_digits(), 50);
        assert_eq!(c.working_digits(), 65);
        assert_eq!(c.bits(), 216);
        let one = context(1).unwrap();
        assert_eq!(one.working_digits(), 16);
        assert_eq!(context(0), Err(Error::InvalidPrecision));
        assert_eq!(Error::InvalidPrecision.to_string(), "precision must be positive");
    }

    #[test]
    fn equal_contexts_are_interchangeable() {
        let a = context(40).unwrap();
        let b = context(40).unwrap();
        assert_eq!(a, b);
        for name in ConstantName::ALL {
            assert_eq!(fundamental(name, &a), fundamental(name, &b));
        }
    }

    #[test]
    fn bernoulli_small_values() {
        let b = bernoulli_table();
        assert_eq!(b[1], Rational::from((-1, 2)));
        assert_eq!(b[2], Rational::from((1, 6)));
        assert_eq!(b[4], Rational::from((-1, 30)));
        assert_eq!(b[12], Rational::from((-691, 2730)));
        assert!(b[13].is_zero());
    }

    #[test]
    fn alternating_sum_recovers_ln2() {
        let bits = 300;
        let s = alternating_sum(bits, |k| Float::with_val(bits, k + 1).recip());
        let ln2 = Float::with_val(bits, Constant::Log2);
        let err = Float::with_val(bits, s - ln2).abs();
        assert!(err < Float::with_val(bits, Float::i_exp(1, -290)));
    }

    #[test]
    fn zeta_even_and_odd() {
        let ctx = context(40).unwrap();
        let pi = fundamental(ConstantName::Pi, &ctx);
        let z2 = zeta_int(2, &ctx).unwrap();
        let expect = Float::with_val(ctx.bits(), pi.square_ref()) / 6;
        assert!(Float::with_val(ctx.bits(), &z2 - &expect).abs() < ctx.epsilon());
        // zeta(5) frozen from an independent 60-digit evaluation.
        let z5 = zeta_int(5, &ctx).unwrap();
        assert_eq!(to_decimal(&z5, 30), "1.03692775514336992633136548646");
        assert!(zeta_int(1, &ctx).is_err());
    }

    #[test]
    fn decimal_rendering() {
        let ctx = context(20).unwrap();
        assert_eq!(to_decimal(&ctx.real(0.5), 5), "0.50000");
        assert_eq!(to_decimal(&ctx.real(-123.25), 6), "-123.250");
        assert_eq!(to_decimal(&ctx.real(0.00125), 3), "0.00125");
        assert_eq!(to_scientific(&ctx.real(0.00125), 3), "1.25e-3");
        assert_eq!(to_decimal(&ctx.real(1200), 2), "1200");
    }
}
