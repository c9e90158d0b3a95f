//! Central-binomial series: direct summation, tail acceleration, and exact
//! multiple t-sums.

mod asymptotic;
mod levin;
pub mod spec;
pub mod tsum;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::float::Constant;
use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{PrecisionContext, Real};

pub use spec::{LinearFactor, Prefactor, SeriesSpec, Weight};
pub use tsum::{t_sum, TSumComposition};

use spec::Regime;

/// Summation method actually used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    EulerMaclaurin,
    LevinU,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::EulerMaclaurin => "euler-maclaurin",
            Method::LevinU => "levin-u",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Summation {
    pub value: Real,
    pub error: Real,
    pub method: Method,
}

/// Terms summed directly before the Euler-Maclaurin tail takes over.
pub const TAIL_START: u64 = 10_000;

const EXTRA_BITS: u32 = 32;
const CHUNK: u64 = 1 << 13;

#[derive(Clone)]
struct State {
    n: u64,
    /// prefactor / base^n
    c: Real,
    o: Real,
    h: Real,
    /// H_{2n+1}
    h_odd: Real,
}

struct Delta {
    ratio: Real,
    o: Real,
    h: Real,
    h_odd: Real,
    steps: u64,
}

fn initial_state(wp: u32) -> State {
    State {
        n: 0,
        c: Float::with_val(wp, 1),
        o: Float::new(wp),
        h: Float::new(wp),
        h_odd: Float::with_val(wp, 1),
    }
}

fn multiply_ratio(c: &mut Real, spec: &SeriesSpec, n: u64) {
    // C(2n,n) / C(2n-2,n-1) = 2(2n-1)/n
    let reps = match spec.prefactor() {
        Prefactor::CentralBinomSquared => 2,
        Prefactor::CentralBinom => 1,
    };
    for _ in 0..reps {
        *c *= 2 * (2 * n - 1);
        *c /= n;
    }
    let b = spec.base();
    if *b.denom() != 1 {
        *c *= b.denom();
    }
    *c /= b.numer();
}

fn increments(n: u64, wp: u32) -> (Real, Real, Real) {
    let o = Float::with_val(wp, 2 * n - 1).recip();
    let h = Float::with_val(wp, n).recip();
    let h_odd = Float::with_val(wp, 2 * n).recip() + Float::with_val(wp, 2 * n + 1).recip();
    (o, h, h_odd)
}

impl State {
    fn advance(&mut self, spec: &SeriesSpec) {
        let wp = self.c.prec();
        self.n += 1;
        multiply_ratio(&mut self.c, spec, self.n);
        let (o, h, h_odd) = increments(self.n, wp);
        self.o += o;
        self.h += h;
        self.h_odd += h_odd;
    }

    fn apply(&self, d: &Delta) -> State {
        State {
            n: self.n + d.steps,
            c: Float::with_val(self.c.prec(), &self.c * &d.ratio),
            o: Float::with_val(self.c.prec(), &self.o + &d.o),
            h: Float::with_val(self.c.prec(), &self.h + &d.h),
            h_odd: Float::with_val(self.c.prec(), &self.h_odd + &d.h_odd),
        }
    }

    fn term(&self, spec: &SeriesSpec, ln2: &Real) -> Real {
        let wp = self.c.prec();
        let w = match spec.weight() {
            Weight::One => None,
            Weight::O => Some(self.o.clone()),
            Weight::OSquared => Some(Float::with_val(wp, self.o.square_ref())),
            Weight::H => Some(self.h.clone()),
            Weight::HOdd => Some(self.h_odd.clone()),
            Weight::Z => {
                let half_h = Float::with_val(wp, &self.h / 2u32);
                Some(Float::with_val(wp, &self.o - &half_h) - ln2)
            }
        };
        let mut t = match w {
            Some(w) => Float::with_val(wp, &self.c * &w),
            None => self.c.clone(),
        };
        for f in spec.denominator() {
            let v = Float::with_val(wp, f.at(self.n));
            if f.power == 1 {
                t /= v;
            } else {
                t /= v.pow(f.power);
            }
        }
        t
    }
}

fn delta(spec: &SeriesSpec, from: u64, to: u64, wp: u32) -> Delta {
    let mut d = Delta {
        ratio: Float::with_val(wp, 1),
        o: Float::new(wp),
        h: Float::new(wp),
        h_odd: Float::new(wp),
        steps: to - from,
    };
    for n in from + 1..=to {
        multiply_ratio(&mut d.ratio, spec, n);
        let (o, h, h_odd) = increments(n, wp);
        d.o += o;
        d.h += h;
        d.h_odd += h_odd;
    }
    d
}

fn state_at(spec: &SeriesSpec, n: u64, wp: u32) -> State {
    let mut s = initial_state(wp);
    while s.n < n {
        s.advance(spec);
    }
    s
}

/// Sum of terms `from..=to` starting from the state at `from`.
fn sum_block(spec: &SeriesSpec, mut s: State, to: u64, ln2: &Real) -> (Real, State) {
    let wp = s.c.prec();
    let mut acc = Float::new(wp);
    loop {
        acc += s.term(spec, ln2);
        if s.n >= to {
            break;
        }
        s.advance(spec);
    }
    (acc, s)
}

/// Sum of terms `from..=to`, chunked. The chunk layout depends only on the
/// range, so the result does not depend on the number of worker threads.
fn sum_range(spec: &SeriesSpec, from_state: State, to: u64, ln2: &Real) -> (Real, State) {
    let wp = from_state.c.prec();
    let from = from_state.n;
    if to < from {
        return (Float::new(wp), from_state);
    }
    let count = to - from + 1;
    if count <= 2 * CHUNK {
        return sum_block(spec, from_state, to, ln2);
    }
    let nchunks = count.div_ceil(CHUNK);
    let starts: Vec<u64> = (0..nchunks).map(|i| from + i * CHUNK).collect();
    let deltas: Vec<Delta> = (0..nchunks as usize - 1)
        .into_par_iter()
        .map(|i| delta(spec, starts[i], starts[i + 1], wp))
        .collect();
    let mut states = Vec::with_capacity(nchunks as usize);
    states.push(from_state);
    for d in &deltas {
        let next = states.last().expect("nonempty").apply(d);
        states.push(next);
    }
    let results: Vec<(Real, State)> = states
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| {
            let end = (starts[i] + CHUNK - 1).min(to);
            sum_block(spec, s, end, ln2)
        })
        .collect();
    let mut total = Float::new(wp);
    let mut last = None;
    for (v, s) in results {
        total += v;
        last = Some(s);
    }
    (total, last.expect("at least one chunk"))
}

fn working_bits(ctx: &PrecisionContext) -> u32 {
    ctx.bits() + EXTRA_BITS
}

/// Terms `n = start ..= N` summed in index order at working precision.
pub fn partial_sum(spec: &SeriesSpec, n: u64, ctx: &PrecisionContext) -> Result<Real> {
    let wp = working_bits(ctx);
    if n < spec.start() {
        return Ok(ctx.zero());
    }
    let ln2 = Float::with_val(wp, Constant::Log2);
    let s0 = state_at(spec, spec.start(), wp);
    let (v, _) = sum_range(spec, s0, n, &ln2);
    Ok(Float::with_val(ctx.bits(), v))
}

/// `partial_sum` together with the terms at `N` and `N + 1`.
pub fn partial_sum_with_edge(
    spec: &SeriesSpec,
    n: u64,
    ctx: &PrecisionContext,
) -> Result<(Real, Real, Real)> {
    let wp = working_bits(ctx);
    if n < spec.start() {
        return Err(Error::InvalidSeries(format!("N = {n} is below the first index")));
    }
    let ln2 = Float::with_val(wp, Constant::Log2);
    let s0 = state_at(spec, spec.start(), wp);
    let (v, mut last) = sum_range(spec, s0, n, &ln2);
    let at_n = last.term(spec, &ln2);
    last.advance(spec);
    let next = last.term(spec, &ln2);
    let bits = ctx.bits();
    Ok((Float::with_val(bits, v), Float::with_val(bits, at_n), Float::with_val(bits, next)))
}

/// The individual terms `n = start ..= N`.
pub fn terms(spec: &SeriesSpec, n: u64, ctx: &PrecisionContext) -> Vec<Real> {
    let wp = working_bits(ctx);
    let ln2 = Float::with_val(wp, Constant::Log2);
    let mut s = state_at(spec, spec.start(), wp);
    let mut out = Vec::new();
    while s.n <= n {
        out.push(Float::with_val(ctx.bits(), s.term(spec, &ln2)));
        s.advance(spec);
    }
    out
}

/// Accelerated value of the full series and an error estimate.
pub fn sum_accelerated(spec: &SeriesSpec, ctx: &PrecisionContext) -> Result<(Real, Real)> {
    let s = summation(spec, ctx)?;
    Ok((s.value, s.error))
}

/// Like [`sum_accelerated`], also reporting the method.
pub fn summation(spec: &SeriesSpec, ctx: &PrecisionContext) -> Result<Summation> {
    let wp = working_bits(ctx);
    let s = match spec.regime()? {
        Regime::Geometric => geometric(spec, wp)?,
        Regime::PowerLaw => euler_maclaurin(spec, ctx, wp)?,
        Regime::Alternating => levin(spec, ctx, wp)?,
    };
    Ok(Summation {
        value: Float::with_val(ctx.bits(), s.value),
        error: Float::with_val(ctx.bits(), s.error),
        method: s.method,
    })
}

fn geometric(spec: &SeriesSpec, wp: u32) -> Result<Summation> {
    let ln2 = Float::with_val(wp, Constant::Log2);
    let r = spec.ratio_limit();
    // tail ratio bound used once observed ratios settle below it
    let rho = Float::with_val(wp, (r.to_f64() + 1.0) / 2.0);
    let one_minus = Float::with_val(wp, 1 - &rho);
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let mut s = state_at(spec, spec.start(), wp);
    let mut acc = Float::new(wp);
    let mut prev = Float::new(wp);
    loop {
        let t = s.term(spec, &ln2);
        let abs_t = Float::with_val(wp, t.abs_ref());
        acc += &t;
        if !prev.is_zero() && s.n > spec.start() + 4 {
            let observed = Float::with_val(wp, &abs_t / &prev);
            if observed < rho {
                let bound = Float::with_val(wp, &abs_t * &rho) / &one_minus;
                let scale = Float::with_val(wp, acc.abs_ref()).max(&Float::with_val(wp, 1));
                if bound < Float::with_val(wp, &eps * &scale) {
                    return Ok(Summation {
                        value: acc,
                        error: bound.max(&Float::with_val(wp, &eps * &scale)),
                        method: Method::Direct,
                    });
                }
            }
        }
        prev = abs_t;
        s.advance(spec);
        if s.n > 100 * wp as u64 + 10_000 {
            return Err(Error::Acceleration("geometric series did not settle".into()));
        }
    }
}

fn euler_maclaurin(spec: &SeriesSpec, ctx: &PrecisionContext, wp: u32) -> Result<Summation> {
    let ln2 = Float::with_val(wp, Constant::Log2);
    let digits = wp as f64 * std::f64::consts::LOG10_2;
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let mut n0 = TAIL_START.max(spec.start() + 1);
    for f in spec.denominator() {
        // keep well clear of the factor's root
        n0 = n0.max(10 * (f.b.unsigned_abs() / f.a as u64 + 1));
    }
    let mut s = state_at(spec, spec.start(), wp);
    let mut head = Float::new(wp);
    let mut estimates: Vec<Real> = Vec::new();
    let mut n = n0;
    for _ in 0..6 {
        let order = ((digits + 5.0) / (n as f64).log10()).ceil() as usize + 2;
        let e = asymptotic::term_expansion(spec, order, wp);
        // head = sum_{start <= k < n}
        if n > s.n {
            let (v, st) = sum_range(spec, s, n - 1, &ln2);
            head += v;
            s = st;
            s.advance(spec);
        }
        match asymptotic::em_tail(&e, n, &eps) {
            Some(t) => estimates.push(Float::with_val(wp, &head + &t)),
            None => {
                estimates.clear();
            }
        }
        if estimates.len() >= 2 {
            let a = &estimates[estimates.len() - 1];
            let b = &estimates[estimates.len() - 2];
            let diff = Float::with_val(wp, a - b).abs();
            let tol = ctx.epsilon();
            let scale = Float::with_val(wp, a.abs_ref()).max(&Float::with_val(wp, 1));
            if diff <= Float::with_val(wp, &tol * &scale) {
                let floor = Float::with_val(wp, &eps * &scale);
                return Ok(Summation {
                    value: a.clone(),
                    error: diff.max(&floor),
                    method: Method::EulerMaclaurin,
                });
            }
        }
        n *= 2;
    }
    Err(Error::Acceleration(format!(
        "Euler-Maclaurin tails for `{spec}` did not agree to {} digits",
        ctx.working_digits()
    )))
}

fn levin(spec: &SeriesSpec, ctx: &PrecisionContext, wp: u32) -> Result<Summation> {
    let lp = 2 * wp + 64;
    let ln2 = Float::with_val(lp, Constant::Log2);
    let kmax = (3 * ctx.working_digits() as usize) / 2 + 40;
    let mut st = state_at(spec, spec.start(), lp);
    let mut partial = Vec::with_capacity(kmax + 1);
    let mut terms = Vec::with_capacity(kmax + 1);
    let mut acc = Float::new(lp);
    for _ in 0..=kmax {
        let t = st.term(spec, &ln2);
        acc += &t;
        partial.push(acc.clone());
        terms.push(t);
        st.advance(spec);
    }
    let tol = ctx.epsilon();
    let mut prev: Option<Real> = None;
    let mut k = 8;
    while k <= kmax {
        let v = levin::levin_u(&partial, &terms, k)
            .ok_or_else(|| Error::Acceleration("Levin transform broke down".into()))?;
        if let Some(p) = &prev {
            let diff = Float::with_val(lp, &v - p).abs();
            let scale = Float::with_val(lp, v.abs_ref()).max(&Float::with_val(lp, 1));
            if diff <= Float::with_val(lp, &tol * &scale) {
                return Ok(Summation {
                    value: Float::with_val(wp, &v),
                    error: Float::with_val(wp, &diff),
                    method: Method::LevinU,
                });
            }
        }
        prev = Some(v);
        k += 4;
    }
    Err(Error::Acceleration(format!(
        "Levin transform for `{spec}` is not stable to {} digits",
        ctx.working_digits()
    )))
}

/// Inner sums supported by [`inner_weighted_sum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSum {
    /// `sum_{0 < m < k} 1/(2m)`
    SumOverEvenReciprocal,
}

/// `sum_k term(k) sum_{0<m<k} 1/(2m)`, reduced through
/// `sum_{0<m<k} 1/(2m) = (H_k - 1/k)/2`.
pub fn inner_weighted_sum(
    spec: &SeriesSpec,
    inner: InnerSum,
    ctx: &PrecisionContext,
) -> Result<(Real, Real)> {
    let InnerSum::SumOverEvenReciprocal = inner;
    if spec.prefactor() != Prefactor::CentralBinomSquared || spec.weight() != Weight::One {
        return Err(Error::InvalidSeries(
            "inner sums need a binom2 series with weight 1".into(),
        ));
    }
    // the k = 0 term has an empty inner sum
    let start = spec.start().max(1);
    let with_h = spec.with_start(start)?.with_weight(Weight::H)?;
    let over_k = spec.with_start(start)?.with_factor(LinearFactor::k(1))?;
    let (a, ea) = sum_accelerated(&with_h, ctx)?;
    let (b, eb) = sum_accelerated(&over_k, ctx)?;
    Ok(((a - b) / 2u32, (ea + eb) / 2u32))
}
