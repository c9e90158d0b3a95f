//! Large-`n` expansions of series terms and the Euler-Maclaurin tail.
//!
//! A term is expanded as `sum_{k,l} c[k][l] x^-(alpha+k) (ln x)^l`.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::spec::{LinearFactor, Prefactor, SeriesSpec, Weight};
use crate::numeric::{bernoulli, Real};

#[derive(Debug, Clone)]
pub(crate) struct Expansion {
    alpha: Rational,
    /// `c[k][l]`
    c: Vec<Vec<Real>>,
    wp: u32,
}

impl Expansion {
    fn zero(alpha: Rational, order: usize, wp: u32) -> Self {
        Self {
            alpha,
            c: vec![Vec::new(); order + 1],
            wp,
        }
    }

    fn order(&self) -> usize {
        self.c.len() - 1
    }

    fn add_at(&mut self, k: usize, l: usize, v: &Real) {
        if k >= self.c.len() {
            return;
        }
        let row = &mut self.c[k];
        if row.len() <= l {
            row.resize(l + 1, Float::new(self.wp));
        }
        row[l] += v;
    }

    fn from_series(alpha: Rational, coeffs: &[Real], wp: u32) -> Self {
        let mut e = Self::zero(alpha, coeffs.len() - 1, wp);
        for (k, v) in coeffs.iter().enumerate() {
            e.add_at(k, 0, v);
        }
        e
    }

    fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(Rational::from(&self.alpha + &other.alpha), order, self.wp);
        for (k1, row1) in self.c.iter().enumerate() {
            for (k2, row2) in other.c.iter().enumerate() {
                if k1 + k2 > order {
                    break;
                }
                for (l1, a) in row1.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (l2, b) in row2.iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        let p = Float::with_val(self.wp, a * b);
                        out.add_at(k1 + k2, l1 + l2, &p);
                    }
                }
            }
        }
        out
    }

    fn add_scaled(&mut self, other: &Self, s: &Real) {
        debug_assert_eq!(self.alpha, other.alpha);
        for (k, row) in other.c.iter().enumerate() {
            for (l, v) in row.iter().enumerate() {
                let t = Float::with_val(self.wp, v * s);
                self.add_at(k, l, &t);
            }
        }
    }
}

/// Coefficients of `ln(Gamma(x+1/2)/Gamma(x+1)) + ln(x)/2` in powers of
/// `1/x`, index 0 being the constant term.
fn gamma_ratio_log(order: usize) -> Vec<Rational> {
    let mut a = vec![Rational::new(); order + 1];
    // sum_{k>=2} (-1)^k (B_k(1/2) - B_k(1)) / (k (k-1)) x^-(k-1)
    for (m, slot) in a.iter_mut().enumerate().skip(1) {
        let k = m + 1;
        if k % 2 == 1 {
            continue;
        }
        let b = bernoulli(k).expect("order within Bernoulli table").clone();
        let two_pow = Rational::from((Integer::from(1), Integer::from(1) << (k as u32 - 1)));
        let factor = two_pow - 2u32;
        *slot = factor * b / Rational::from(k * (k - 1));
    }
    a
}

/// Exact coefficients of `exp(scale * A)` for a series `A` with `A[0] = 0`.
fn exp_series(a: &[Rational], scale: u32) -> Vec<Rational> {
    let n = a.len();
    let mut e = vec![Rational::new(); n];
    e[0] = Rational::from(1);
    for m in 1..n {
        let mut acc = Rational::new();
        for i in 1..=m {
            if a[i].is_zero() {
                continue;
            }
            acc += Rational::from(&a[i] * &e[m - i]) * (i as u32 * scale);
        }
        e[m] = acc / m as u32;
    }
    e
}

/// `C(2x,x)^e / growth^x` for `e = 2` (binom2) or `e = 1` (binom).
pub(crate) fn prefactor_expansion(p: Prefactor, order: usize, wp: u32) -> Expansion {
    let a = gamma_ratio_log(order);
    let pi = Float::with_val(wp, Constant::Pi);
    let (series, scale, alpha) = match p {
        Prefactor::CentralBinomSquared => (exp_series(&a, 2), pi.recip(), Rational::from(1)),
        Prefactor::CentralBinom => (exp_series(&a, 1), pi.sqrt().recip(), Rational::from((1, 2))),
    };
    let coeffs: Vec<Real> = series
        .iter()
        .map(|r| Float::with_val(wp, r) * &scale)
        .collect();
    Expansion::from_series(alpha, &coeffs, wp)
}

/// `(a x + b)^-p`
fn factor_expansion(f: &LinearFactor, order: usize, wp: u32) -> Expansion {
    let ratio = Rational::from((f.b, f.a));
    let mut coeffs = Vec::with_capacity(order + 1);
    let lead = Float::with_val(wp, f.a).pow(-(f.power as i32));
    // C(-p, j) = (-1)^j C(p+j-1, j)
    let mut binom = Rational::from(1);
    let mut rpow = Rational::from(1);
    for j in 0..=order as u32 {
        if j > 0 {
            binom *= Rational::from((-((f.power + j - 1) as i64), j as i64));
            rpow *= &ratio;
        }
        let c = Rational::from(&binom * &rpow);
        coeffs.push(Float::with_val(wp, &c) * &lead);
    }
    Expansion::from_series(Rational::from(f.power), &coeffs, wp)
}

fn bernoulli_f(n: usize, wp: u32) -> Real {
    Float::with_val(wp, bernoulli(n).expect("order within Bernoulli table"))
}

/// Weight expansions (alpha = 0).
fn weight_expansion(w: Weight, order: usize, wp: u32) -> Expansion {
    let gamma = Float::with_val(wp, Constant::Euler);
    let ln2 = Float::with_val(wp, Constant::Log2);
    let mut e = Expansion::zero(Rational::new(), order, wp);
    let one = Float::with_val(wp, 1);
    let h = || {
        // ln x + gamma + 1/(2x) - sum B_2j/(2j) x^-2j
        let mut h = Expansion::zero(Rational::new(), order, wp);
        h.add_at(0, 1, &one);
        h.add_at(0, 0, &gamma);
        h.add_at(1, 0, &Float::with_val(wp, 0.5));
        let mut j = 1;
        while 2 * j <= order {
            let v = -bernoulli_f(2 * j, wp) / (2 * j) as u32;
            h.add_at(2 * j, 0, &v);
            j += 1;
        }
        h
    };
    let o = || {
        // ln x / 2 + ln2 + gamma/2 + sum B_2j/(2j) (1/2 - 2^-2j) x^-2j
        let mut o = Expansion::zero(Rational::new(), order, wp);
        o.add_at(0, 1, &Float::with_val(wp, 0.5));
        let c0 = Float::with_val(wp, &gamma / 2u32) + &ln2;
        o.add_at(0, 0, &c0);
        let mut j = 1;
        while 2 * j <= order {
            let f = Float::with_val(wp, 0.5) - Float::with_val(wp, Float::i_exp(1, -(2 * j as i32)));
            let v = bernoulli_f(2 * j, wp) / (2 * j) as u32 * f;
            o.add_at(2 * j, 0, &v);
            j += 1;
        }
        o
    };
    match w {
        Weight::One => e.add_at(0, 0, &one),
        Weight::O => e = o(),
        Weight::OSquared => {
            let o = o();
            e = o.mul(&o);
        }
        Weight::H => e = h(),
        Weight::HOdd => {
            // H(2x) + 1/(2x+1)
            let ln2x = ln2.clone();
            e.add_at(0, 1, &one);
            let c0 = Float::with_val(wp, &gamma + &ln2x);
            e.add_at(0, 0, &c0);
            e.add_at(1, 0, &Float::with_val(wp, 0.25));
            let mut j = 1;
            while 2 * j <= order {
                let scale = Float::with_val(wp, Float::i_exp(1, -(2 * j as i32)));
                let v = -bernoulli_f(2 * j, wp) / (2 * j) as u32 * scale;
                e.add_at(2 * j, 0, &v);
                j += 1;
            }
            for m in 1..=order {
                let mut v = Float::with_val(wp, Float::i_exp(1, -(m as i32)));
                if m % 2 == 0 {
                    v = -v;
                }
                e.add_at(m, 0, &v);
            }
        }
        Weight::Z => {
            e = o();
            e.add_scaled(&h(), &Float::with_val(wp, -0.5));
            e.add_at(0, 0, &(-ln2));
        }
    }
    e
}

/// Full expansion of the terms of `spec`.
pub(crate) fn term_expansion(spec: &SeriesSpec, order: usize, wp: u32) -> Expansion {
    let mut e = prefactor_expansion(spec.prefactor(), order, wp);
    e = e.mul(&weight_expansion(spec.weight(), order, wp));
    for f in spec.denominator() {
        e = e.mul(&factor_expansion(f, order, wp));
    }
    e
}

/// `x^-sigma P(ln x)` with `P` a polynomial.
#[derive(Clone)]
struct Piece {
    sigma: Real,
    poly: Vec<Real>,
}

impl Piece {
    fn eval(&self, ln_x: &Real, x_pow: &Real) -> Real {
        let wp = ln_x.prec();
        let mut acc = Float::new(wp);
        for c in self.poly.iter().rev() {
            acc *= ln_x;
            acc += c;
        }
        acc * x_pow
    }

    fn differentiate(&mut self) {
        let wp = self.sigma.prec();
        let mut next: Vec<Real> = self
            .poly
            .iter()
            .map(|c| -Float::with_val(wp, c * &self.sigma))
            .collect();
        for l in 1..self.poly.len() {
            let d = Float::with_val(wp, &self.poly[l] * l as u32);
            next[l - 1] += d;
        }
        self.poly = next;
        self.sigma += 1u32;
    }
}

/// `sum_{n >= N} f(n)` by Euler-Maclaurin on the expansion. Returns `None`
/// if the correction terms stop decreasing before reaching `eps`.
pub(crate) fn em_tail(e: &Expansion, n: u64, eps: &Real) -> Option<Real> {
    let wp = e.wp;
    let x = Float::with_val(wp, n);
    let lx = Float::with_val(wp, x.ln_ref());
    let alpha = Float::with_val(wp, &e.alpha);
    let mut pieces = Vec::new();
    for (k, row) in e.c.iter().enumerate() {
        if row.iter().all(|v| v.is_zero()) {
            continue;
        }
        pieces.push(Piece {
            sigma: Float::with_val(wp, &alpha + k as u32),
            poly: row.clone(),
        });
    }
    let x_pow = |sigma: &Real| -> Real {
        let s = Float::with_val(wp, -sigma);
        Float::with_val(wp, &s * &lx).exp()
    };

    // integral from N to infinity
    let mut integral = Float::new(wp);
    for p in &pieces {
        let s1 = Float::with_val(wp, &p.sigma - 1u32);
        let base = Float::with_val(wp, x_pow(&s1));
        for (l, c) in p.poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // sum_i l!/(l-i)! L^(l-i) N^(1-s) / (s-1)^(i+1)
            let mut acc = Float::new(wp);
            let mut falling = Float::with_val(wp, 1);
            for i in 0..=l {
                if i > 0 {
                    falling *= (l - i + 1) as u32;
                }
                let lpow = Float::with_val(wp, (&lx).pow((l - i) as u32));
                let denom = Float::with_val(wp, (&s1).pow((i + 1) as u32));
                acc += Float::with_val(wp, &falling * &lpow) / denom;
            }
            integral += acc * c * &base;
        }
    }

    let value_at = |ps: &[Piece]| -> Real {
        let mut v = Float::new(wp);
        for p in ps {
            v += p.eval(&lx, &x_pow(&p.sigma));
        }
        v
    };

    let mut tail = integral;
    tail += value_at(&pieces) / 2u32;

    let mut derivs = pieces;
    let mut order = 0u32;
    let mut fact = Float::with_val(wp, 1);
    let mut last = Float::with_val(wp, f64::INFINITY);
    for j in 1..=60usize {
        // derivative of order 2j-1
        while order < 2 * j as u32 - 1 {
            for p in derivs.iter_mut() {
                p.differentiate();
            }
            order += 1;
        }
        fact *= ((2 * j - 1) * 2 * j) as u32;
        let b = match bernoulli(2 * j) {
            Some(b) => Float::with_val(wp, b),
            None => return None,
        };
        let d = value_at(&derivs);
        let corr = Float::with_val(wp, &b * &d) / &fact;
        let mag = Float::with_val(wp, corr.abs_ref());
        tail -= &corr;
        if mag < *eps {
            return Some(tail);
        }
        if mag > last {
            return None;
        }
        last = mag;
    }
    None
}
