use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Constant;
use rug::Float;

use crate::numeric::Real;

/// Complex number with high-precision real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexValue {
    pub re: Real,
    pub im: Real,
}

impl ComplexValue {
    pub fn new(re: Real, im: Real) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: Real) -> Self {
        let im = Float::new(re.prec());
        Self { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        Self::new(Float::new(bits), Float::new(bits))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> Real {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn arg(&self) -> Real {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn scale(&self, k: &Real) -> Self {
        let p = self.prec();
        Self::new(
            Float::with_val(p, &self.re * k),
            Float::with_val(p, &self.im * k),
        )
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self::new(-self.im.clone(), self.re.clone())
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Self::new(
            Float::with_val(self.prec(), &self.re / &n),
            Float::with_val(self.prec(), -Float::with_val(self.prec(), &self.im / &n)),
        )
    }

    pub fn div(&self, other: &Self) -> Self {
        self * &other.recip()
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        let modulus = self.norm_sqr().ln() / 2;
        Self::new(Float::with_val(p, modulus), self.arg())
    }

    pub fn powu(&self, n: u32) -> Self {
        let mut acc = Self::from_real(Float::with_val(self.prec(), 1));
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `2 pi i`.
    pub fn two_pi_i(bits: u32) -> Self {
        let pi = Float::with_val(bits, Constant::Pi);
        Self::new(Float::new(bits), pi * 2)
    }
}

impl Add for &ComplexValue {
    type Output = ComplexValue;
    fn add(self, o: &ComplexValue) -> ComplexValue {
        let p = self.prec();
        ComplexValue::new(
            Float::with_val(p, &self.re + &o.re),
            Float::with_val(p, &self.im + &o.im),
        )
    }
}

impl Sub for &ComplexValue {
    type Output = ComplexValue;
    fn sub(self, o: &ComplexValue) -> ComplexValue {
        let p = self.prec();
        ComplexValue::new(
            Float::with_val(p, &self.re - &o.re),
            Float::with_val(p, &self.im - &o.im),
        )
    }
}

impl Mul for &ComplexValue {
    type Output = ComplexValue;
    fn mul(self, o: &ComplexValue) -> ComplexValue {
        let p = self.prec();
        let rr = Float::with_val(p, &self.re * &o.re);
        let ii = Float::with_val(p, &self.im * &o.im);
        let ri = Float::with_val(p, &self.re * &o.im);
        let ir = Float::with_val(p, &self.im * &o.re);
        ComplexValue::new(rr - ii, ri + ir)
    }
}

impl Neg for &ComplexValue {
    type Output = ComplexValue;
    fn neg(self) -> ComplexValue {
        ComplexValue::new(-self.re.clone(), -self.im.clone())
    }
}
