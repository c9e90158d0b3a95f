//! Integer relation detection (PSLQ) over constant monomials.
//!
//! Given a target `x` and basis values `b_1..b_k`, looks for integers with
//! `c_0 x + c_1 b_1 + ... + c_k b_k = 0`. A relation is only reported after
//! the basis has been re-evaluated 20 digits higher and the residual is
//! consistent with the precision of the target.

use rug::{Float, Integer};
use serde::{Serialize, Serializer};

use crate::closed_form::{cf_parse, Atom, ClosedForm, Monomial};
use crate::error::{Error, Result};
use crate::numeric::{context, pow10, PrecisionContext, Real};

pub const DEFAULT_COEFFICIENT_BITS: u32 = 64;
pub const DEFAULT_CONFIDENCE_DIGITS: u32 = 20;
const MAX_STEPS: usize = 100_000;
const EXTRA_BITS: u32 = 60;
const RECHECK_DIGITS: u32 = 20;

#[derive(Debug, Clone)]
pub struct RelationQuery {
    pub target: Real,
    pub basis: Vec<Monomial>,
    pub max_coefficient_bits: u32,
    pub confidence_digits: u32,
}

impl RelationQuery {
    pub fn new(target: Real, basis: Vec<Monomial>) -> Self {
        Self {
            target,
            basis,
            max_coefficient_bits: DEFAULT_COEFFICIENT_BITS,
            confidence_digits: DEFAULT_CONFIDENCE_DIGITS,
        }
    }

    /// Decimal digits carried by the target.
    pub fn target_digits(&self) -> u32 {
        (self.target.prec() as f64 * std::f64::consts::LOG10_2).floor() as u32
    }

    fn validate(&self) -> Result<()> {
        if self.basis.is_empty() {
            return Err(Error::InvalidQuery("basis is empty".into()));
        }
        for (i, m) in self.basis.iter().enumerate() {
            if self.basis[..i].contains(m) {
                return Err(Error::InvalidQuery(format!("monomial `{m}` appears twice")));
            }
        }
        if self.max_coefficient_bits == 0 || self.confidence_digits == 0 {
            return Err(Error::InvalidQuery("bounds must be positive".into()));
        }
        if !self.target.is_finite() {
            return Err(Error::InvalidQuery("target is not finite".into()));
        }
        if self.target_digits() < 2 * self.confidence_digits {
            return Err(Error::InvalidQuery(format!(
                "target carries {} digits, need at least {}",
                self.target_digits(),
                2 * self.confidence_digits
            )));
        }
        Ok(())
    }
}

fn ser_integers<S: Serializer>(v: &[Integer], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|i| i.to_string()))
}

fn ser_monomials<S: Serializer>(v: &[Monomial], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|m| m.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationResult {
    pub found: bool,
    /// Aligned with `[target] ++ basis`; empty when nothing was found.
    #[serde(serialize_with = "ser_integers")]
    pub coefficients: Vec<Integer>,
    pub residual_digits: i64,
    #[serde(serialize_with = "ser_monomials")]
    pub basis: Vec<Monomial>,
    /// Every relation with Euclidean norm below `10^norm_bound_digits` was excluded.
    pub norm_bound_digits: u32,
}

impl RelationResult {
    /// The target as a combination of the basis.
    pub fn closed_form(&self) -> Option<ClosedForm> {
        if !self.found {
            return None;
        }
        let c0 = rug::Rational::from(self.coefficients[0].clone());
        Some(ClosedForm::from_terms(
            self.basis
                .iter()
                .zip(&self.coefficients[1..])
                .map(|(m, c)| (m.clone(), -rug::Rational::from(c.clone()) / &c0)),
        ))
    }
}

enum Outcome {
    Candidate(Vec<Integer>),
    NormExceeded(Float),
    Exhausted(String),
    StepLimit(Float),
}

fn round_int(x: &Float) -> Float {
    let mut r = x.clone();
    r.round_mut();
    r
}

fn pslq(x: &[Float], tol: &Float, bound: &Float, wp: u32) -> Outcome {
    let n = x.len();
    let zero = || Float::new(wp);
    let mut a: Vec<Vec<Float>> = (0..n)
        .map(|i| (0..n).map(|j| Float::with_val(wp, (i == j) as u32)).collect())
        .collect();
    let mut b = a.clone();
    let mut h: Vec<Vec<Float>> = vec![vec![zero(); n - 1]; n];

    let mut s = vec![zero(); n];
    for k in 0..n {
        let mut t = zero();
        for xj in &x[k..] {
            t += Float::with_val(wp, xj.square_ref());
        }
        s[k] = t.sqrt();
    }
    let t = s[0].clone();
    let mut y: Vec<Float> = x.iter().map(|v| Float::with_val(wp, v / &t)).collect();
    for sk in s.iter_mut() {
        *sk /= &t;
    }
    for i in 0..n {
        if i < n - 1 {
            h[i][i] = if s[i].is_zero() {
                zero()
            } else {
                Float::with_val(wp, &s[i + 1] / &s[i])
            };
        }
        for j in 0..i.min(n - 1) {
            let sjj = Float::with_val(wp, &s[j] * &s[j + 1]);
            h[i][j] = if sjj.is_zero() {
                zero()
            } else {
                -Float::with_val(wp, &y[i] * &y[j]) / sjj
            };
        }
    }

    // Hermite reduction of rows `i` against the pivots `j <= jmax`.
    let reduce = |i: usize,
                  jmax: usize,
                  y: &mut Vec<Float>,
                  h: &mut Vec<Vec<Float>>,
                  a: &mut Vec<Vec<Float>>,
                  b: &mut Vec<Vec<Float>>|
     -> bool {
        for j in (0..=jmax).rev() {
            if h[j][j].is_zero() {
                return false;
            }
            let t = round_int(&Float::with_val(wp, &h[i][j] / &h[j][j]));
            if t.is_zero() {
                continue;
            }
            let d = Float::with_val(wp, &t * &y[i]);
            y[j] += d;
            for k in 0..=j {
                let d = Float::with_val(wp, &t * &h[j][k]);
                h[i][k] -= d;
            }
            for k in 0..n {
                let d = Float::with_val(wp, &t * &a[j][k]);
                a[i][k] -= d;
                let d = Float::with_val(wp, &t * &b[k][i]);
                b[k][j] += d;
            }
        }
        true
    };

    for i in 1..n {
        if !reduce(i, i - 1, &mut y, &mut h, &mut a, &mut b) {
            return Outcome::Exhausted("zero pivot during setup".into());
        }
    }

    let gamma = Float::with_val(wp, Float::with_val(wp, 4) / 3u32).sqrt();
    let mut norm = zero();
    let limit = Float::with_val(wp, Float::i_exp(1, wp as i32 - 20));
    for _ in 0..MAX_STEPS {
        let mut m = 0;
        let mut best = Float::with_val(wp, -1);
        let mut g = gamma.clone();
        for (i, row) in h.iter().enumerate().take(n - 1) {
            let sz = Float::with_val(wp, row[i].abs_ref()) * &g;
            if sz > best {
                best = sz;
                m = i;
            }
            g *= &gamma;
        }
        y.swap(m, m + 1);
        h.swap(m, m + 1);
        a.swap(m, m + 1);
        for row in b.iter_mut() {
            row.swap(m, m + 1);
        }
        if m + 2 < n {
            let t0 = Float::with_val(
                wp,
                Float::with_val(wp, h[m][m].square_ref()) + Float::with_val(wp, h[m][m + 1].square_ref()),
            )
            .sqrt();
            if t0.is_zero() {
                return Outcome::Exhausted("vanishing rotation".into());
            }
            let t1 = Float::with_val(wp, &h[m][m] / &t0);
            let t2 = Float::with_val(wp, &h[m][m + 1] / &t0);
            for row in h.iter_mut().skip(m) {
                let (t3, t4) = (row[m].clone(), row[m + 1].clone());
                row[m] = Float::with_val(wp, &t1 * &t3) + Float::with_val(wp, &t2 * &t4);
                row[m + 1] = Float::with_val(wp, &t1 * &t4) - Float::with_val(wp, &t2 * &t3);
            }
        }
        for i in m + 1..n {
            if !reduce(i, (i - 1).min(m + 1), &mut y, &mut h, &mut a, &mut b) {
                return Outcome::Exhausted("zero pivot".into());
            }
        }
        for i in 0..n {
            if y[i].clone().abs() < *tol {
                let col: Vec<Integer> = (0..n)
                    .map(|j| round_int(&b[j][i]).to_integer().expect("finite"))
                    .collect();
                return Outcome::Candidate(col);
            }
        }
        if a.iter().flatten().any(|v| v.clone().abs() > limit) {
            return Outcome::Exhausted("reduction matrix outgrew the working precision".into());
        }
        let mut recnorm = zero();
        for row in &h {
            for v in row {
                let av = v.clone().abs();
                if av > recnorm {
                    recnorm = av;
                }
            }
        }
        if recnorm.is_zero() {
            return Outcome::Exhausted("reduced basis collapsed".into());
        }
        norm = Float::with_val(wp, recnorm.recip_ref());
        if norm >= *bound {
            return Outcome::NormExceeded(norm);
        }
    }
    Outcome::StepLimit(norm)
}

fn log10_floor(x: &Float) -> i64 {
    if x.is_zero() {
        return i64::MIN / 2;
    }
    let l = Float::with_val(64, x.abs_ref()).log10();
    l.to_f64().floor() as i64
}

fn norm_digits(norm: &Float) -> u32 {
    if *norm < 1 {
        0
    } else {
        log10_floor(norm).max(0) as u32
    }
}

fn normalize(mut c: Vec<Integer>) -> Vec<Integer> {
    let g = c.iter().fold(Integer::new(), |g, v| g.gcd(v));
    if g > 1 {
        for v in c.iter_mut() {
            *v /= &g;
        }
    }
    if c[0] < 0 {
        for v in c.iter_mut() {
            *v = -v.clone();
        }
    }
    c
}

/// Runs PSLQ on `[target] ++ basis`.
pub fn find_relation(q: &RelationQuery, _ctx: &PrecisionContext) -> Result<RelationResult> {
    q.validate()?;
    let p = q.target.prec();
    let digits = q.target_digits();
    let wp = p + EXTRA_BITS;
    let n = q.basis.len() + 1;

    let ctx_basis = context(digits)?;
    let mut x = vec![Float::with_val(wp, &q.target)];
    for m in &q.basis {
        x.push(Float::with_val(wp, m.eval(&ctx_basis)));
    }
    if x.iter().any(|v| v.is_zero()) {
        return Err(Error::InvalidQuery("PSLQ needs nonzero inputs".into()));
    }

    let tol_bits = (p as f64 * 0.75) as i32;
    let tol = Float::with_val(wp, Float::i_exp(1, -tol_bits));
    // Relations much larger than this cannot be told apart from noise.
    let detectable_bits = (tol_bits as u32 / n as u32).max(1);
    let bound_bits = detectable_bits.min(q.max_coefficient_bits);
    let bound = Float::with_val(wp, Float::i_exp(1, bound_bits as i32));
    let bound_digits = (bound_bits as f64 * std::f64::consts::LOG10_2).floor() as u32;

    let not_found = |norm: &Float| RelationResult {
        found: false,
        coefficients: Vec::new(),
        residual_digits: 0,
        basis: q.basis.clone(),
        norm_bound_digits: norm_digits(norm).min(bound_digits),
    };

    let coeffs = match pslq(&x, &tol, &bound, wp) {
        Outcome::Candidate(c) => normalize(c),
        Outcome::NormExceeded(norm) | Outcome::StepLimit(norm) => return Ok(not_found(&norm)),
        Outcome::Exhausted(why) => {
            return Err(Error::InsufficientPrecision(format!(
                "{why} after {digits} digits; supply a more precise target"
            )))
        }
    };

    let max_c = coeffs.iter().map(|c| c.clone().abs()).max().unwrap_or_default();
    let too_big = max_c.significant_bits() > bound_bits;
    if coeffs[0] == 0 {
        return Err(Error::InvalidQuery(
            "basis values satisfy a relation among themselves".into(),
        ));
    }

    // Re-evaluate the basis further out; the target keeps its own precision.
    let check = context(digits + RECHECK_DIGITS)?;
    let cb = check.bits();
    let mut r = Float::with_val(cb, &q.target) * &coeffs[0];
    for (m, c) in q.basis.iter().zip(&coeffs[1..]) {
        r += m.eval(&check) * c;
    }
    let r = r.abs();
    let residual_digits = if r.is_zero() {
        (digits + RECHECK_DIGITS) as i64
    } else {
        -(log10_floor(&r) + 1)
    };
    let allowed = pow10(-(digits as i32 - 5), cb) * Float::with_val(cb, &max_c);
    let consistent = r <= allowed && residual_digits >= q.confidence_digits as i64;
    if consistent && !too_big {
        return Ok(RelationResult {
            found: true,
            coefficients: coeffs,
            residual_digits,
            basis: q.basis.clone(),
            norm_bound_digits: bound_digits,
        });
    }
    // A candidate at the noise level is an artefact of the tolerance.
    if too_big || max_c.significant_bits() * n as u32 > tol_bits as u32 {
        return Ok(not_found(&bound));
    }
    Err(Error::InsufficientPrecision(format!(
        "candidate relation has residual 1e-{residual_digits} at {digits} digits"
    )))
}

/// Parses a single monomial such as `G*ln2/pi`.
pub fn parse_monomial(text: &str) -> Result<Monomial> {
    let cf = cf_parse(text)?;
    let mut terms = cf.terms();
    match (terms.next(), terms.next()) {
        (Some((m, c)), None) if *c == 1 => Ok(m.clone()),
        _ => Err(Error::InvalidQuery(format!("`{text}` is not a single monomial"))),
    }
}

fn monomials(texts: &[&str]) -> Vec<Monomial> {
    texts
        .iter()
        .map(|t| parse_monomial(t).expect("preset monomial"))
        .collect()
}

pub const PRESETS: [&str; 4] = ["default", "small", "aux", "full"];

/// A named basis, or a comma separated list of monomials.
pub fn basis_preset(name: &str) -> Result<Vec<Monomial>> {
    match name {
        "default" => Ok(monomials(&[
            "1/pi", "ln2/pi", "G/pi", "G*ln2/pi", "Gs/pi", "ln2^2/pi", "pi", "pi^2", "ln2^2", "1",
            "ln2",
        ])),
        "small" => Ok(monomials(&["1/pi", "ln2/pi", "G/pi"])),
        "aux" => Ok(monomials(&["1/pi", "ln2/pi"])),
        "full" => Ok(full_basis()),
        list => {
            let out = list
                .split(',')
                .map(|t| parse_monomial(t.trim()))
                .collect::<Result<Vec<_>>>()
                .map_err(|_| {
                    Error::InvalidQuery(format!(
                        "`{list}` is neither a preset ({}) nor a list of monomials",
                        PRESETS.join(", ")
                    ))
                })?;
            Ok(out)
        }
    }
}

/// Degree <= 3 in `pi, ln2, G, Gs` with `pi` exponent in [-1, 2], plus the
/// other atoms to the first power times `pi^-1, 1, pi`.
fn full_basis() -> Vec<Monomial> {
    let mut out = Vec::new();
    for pi in -1..=2 {
        for l in 0..=3u32 {
            for g in 0..=3u32 {
                for gs in 0..=3u32 {
                    if pi.max(0) as u32 + l + g + gs > 3 {
                        continue;
                    }
                    let f = [(Atom::Ln2, l), (Atom::CatalanG, g), (Atom::ScriptG, gs)];
                    if let Ok(m) = Monomial::new(pi, &f) {
                        out.push(m);
                    }
                }
            }
        }
    }
    for a in [Atom::Zeta3, Atom::Beta4, Atom::ImLi4Half, Atom::ImLi4OneMinusI] {
        for pi in -1..=1 {
            if let Ok(m) = Monomial::new(pi, &[(a, 1)]) {
                out.push(m);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Rounds `x` to `digits` significant decimal digits of binary precision.
pub fn truncate_to_digits(x: &Real, digits: u32) -> Real {
    let bits = (digits as f64 / std::f64::consts::LOG10_2).ceil() as u32;
    Float::with_val(bits, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn target(text: &str, digits: u32) -> Real {
        let ctx = context(digits).unwrap();
        truncate_to_digits(&cf_parse(text).unwrap().eval(&ctx), digits)
    }

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&i| Integer::from(i)).collect()
    }

    #[test]
    fn recovers_catalan_over_pi() {
        let ctx = context(50).unwrap();
        let basis = monomials(&["1", "G/pi", "ln2/pi"]);
        let q = RelationQuery::new(target("4*G/pi", 50), basis);
        let r = find_relation(&q, &ctx).unwrap();
        assert!(r.found);
        assert_eq!(r.coefficients, ints(&[1, 0, -4, 0]));
        assert_eq!(r.closed_form().unwrap(), cf_parse("4*G/pi").unwrap());
        assert!(r.residual_digits >= 45);
    }

    #[test]
    fn recovers_pi() {
        let ctx = context(50).unwrap();
        let q = RelationQuery::new(target("pi", 50), monomials(&["1", "pi"]));
        let r = find_relation(&q, &ctx).unwrap();
        assert_eq!(r.coefficients, ints(&[1, 0, -1]));
    }

    #[test]
    fn random_value_has_no_relation() {
        let ctx = context(50).unwrap();
        let x: Real = Float::with_val(
            167,
            Float::parse("0.31415926271828182845904523536028747135266249775724709").unwrap(),
        );
        let q = RelationQuery::new(x, basis_preset("default").unwrap());
        let r = find_relation(&q, &ctx).unwrap();
        assert!(!r.found);
        assert!(r.coefficients.is_empty());
    }

    #[test]
    fn recovers_mixed_default_basis_value() {
        let ctx = context(50).unwrap();
        let text = "-4*G*ln2/pi - 16*Gs/pi + 3/8*pi^2 + 1/2*ln2^2";
        let q = RelationQuery::new(target(text, 50), basis_preset("default").unwrap());
        let r = find_relation(&q, &ctx).unwrap();
        assert!(r.found);
        assert_eq!(r.closed_form().unwrap(), cf_parse(text).unwrap());
    }

    #[test]
    fn invalid_queries() {
        let ctx = context(50).unwrap();
        let t = target("pi", 50);
        assert!(matches!(
            find_relation(&RelationQuery::new(t.clone(), vec![]), &ctx),
            Err(Error::InvalidQuery(_))
        ));
        let dup = monomials(&["1", "1"]);
        assert!(find_relation(&RelationQuery::new(t.clone(), dup), &ctx).is_err());
        let short = truncate_to_digits(&t, 30);
        assert!(matches!(
            find_relation(&RelationQuery::new(short, monomials(&["1"])), &ctx),
            Err(Error::InvalidQuery(_))
        ));
    }

    #[test]
    fn presets_and_lists() {
        assert_eq!(basis_preset("default").unwrap().len(), 11);
        assert_eq!(basis_preset("G/pi, ln2").unwrap().len(), 2);
        assert!(basis_preset("nonsense").is_err());
        assert!(basis_preset("2*G").is_err());
        let full = basis_preset("full").unwrap();
        assert!(full.contains(&parse_monomial("beta4/pi").unwrap()));
        assert!(full.contains(&parse_monomial("G*Gs/pi").unwrap()));
    }

    #[test]
    fn deterministic() {
        let ctx = context(50).unwrap();
        let q = RelationQuery::new(
            target("4*G/pi - 1/12*pi - 2*ln2^2/pi", 50),
            basis_preset("default").unwrap(),
        );
        let a = find_relation(&q, &ctx).unwrap();
        let b = find_relation(&q, &ctx).unwrap();
        assert_eq!(a, b);
        assert!(a.found);
    }
}
