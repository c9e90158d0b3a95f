//! Exact closed forms for the central binomial families with a shifted odd denominator.
//!
//! With `c_n = C(2n,n)^2/16^n` and `d = 2n + 1 - 2 lambda`:
//!
//! ```text
//! main(lambda)   = sum_{n>=1} c_n O_n^2 / d^2
//! first(lambda)  = sum_{n>=1} c_n O_n   / d^2
//! second(lambda) = sum_{n>=1} c_n O_n^2 / d
//! aux(lambda)    = sum_{n>=1} c_n O_n   / d
//! ```
//!
//! `main`, `first` and `second` are extended from `lambda = 1` by exact
//! recurrences. `aux` values, and the `first` base, come from External
//! catalog records that must verify numerically before they are used.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::catalog::{verify_record, Catalog, IdentityRecord, Status};
use crate::closed_form::{Atom, ClosedForm, Monomial};
use crate::error::{Error, Result};
use crate::series::SeriesSpec;

/// Digits an External record must reach before the engine consumes it.
pub const EXTERNAL_DIGITS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyName {
    MainProblem,
    FirstProblem,
    SecondProblem,
    AuxOLinear,
}

impl FamilyName {
    pub const ALL: [FamilyName; 4] = [
        FamilyName::MainProblem,
        FamilyName::FirstProblem,
        FamilyName::SecondProblem,
        FamilyName::AuxOLinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyName::MainProblem => "main",
            FamilyName::FirstProblem => "first",
            FamilyName::SecondProblem => "second",
            FamilyName::AuxOLinear => "aux",
        }
    }

    /// The series whose value `extend(self, lambda)` returns.
    pub fn series(self, lambda: u32) -> Result<SeriesSpec> {
        if lambda == 0 {
            return Err(Error::Domain("lambda must be at least 1".into()));
        }
        let (weight, power) = match self {
            FamilyName::MainProblem => ("O^2", 2),
            FamilyName::FirstProblem => ("O", 2),
            FamilyName::SecondProblem => ("O^2", 1),
            FamilyName::AuxOLinear => ("O", 1),
        };
        let shift = 2 * lambda as i64 - 1;
        let pow = if power == 1 { String::new() } else { format!("^{power}") };
        format!("binom2/16^n * {weight} / (2n-{shift}){pow} from n=1").parse()
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "main" | "mainproblem" => Ok(FamilyName::MainProblem),
            "first" | "firstproblem" => Ok(FamilyName::FirstProblem),
            "second" | "secondproblem" => Ok(FamilyName::SecondProblem),
            "aux" | "auxolinear" => Ok(FamilyName::AuxOLinear),
            _ => Err(Error::Domain(format!(
                "unknown family `{s}` (expected main, first, second or aux)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    BaseCase,
    Recurrence,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaEntry {
    pub value: ClosedForm,
    pub provenance: Provenance,
    /// Catalog record the entry was read from, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaTable {
    pub family: FamilyName,
    pub entries: BTreeMap<u32, LambdaEntry>,
}

impl LambdaTable {
    fn new(family: FamilyName) -> Self {
        Self {
            family,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, lambda: u32) -> Option<&ClosedForm> {
        self.entries.get(&lambda).map(|e| &e.value)
    }
}

fn q(num: impl Into<Integer>, den: impl Into<Integer>) -> Rational {
    Rational::from((num.into(), den.into()))
}

fn central(k: u32) -> Rational {
    let b = Integer::from(Integer::binomial_u(2 * k, k));
    let b2 = Integer::from(b.square_ref());
    q(b2, Integer::from(16u32).pow(k))
}

fn over_pi(c: Rational) -> ClosedForm {
    ClosedForm::term(c, Monomial::new(-1, &[]).expect("1/pi is in bounds"))
}

fn mono(pi: i32, factors: &[(Atom, u32)]) -> Monomial {
    Monomial::new(pi, factors).expect("fixed monomial is in bounds")
}

/// `16^m / (m^2 C(2m,m)^2)`
fn lemma_prefactor(m: u32) -> Rational {
    let b = Integer::from(Integer::binomial_u(2 * m, m));
    let den = Integer::from(b.square_ref()) * Integer::from(m) * Integer::from(m);
    q(Integer::from(16u32).pow(m), den)
}

fn a_rational(m: u32) -> Rational {
    let s: Rational = (0..m).map(central).sum();
    -(lemma_prefactor(m) * s) / 2u32
}

/// `S(r) = sum_{n>=0} c_n / (n + r) = 16^r/(pi r^2 C(2r,r)^2) sum_{k<r} c_k`.
pub fn ramanujan_s(r: u32) -> Result<ClosedForm> {
    if r == 0 {
        return Err(Error::Domain("S(r) needs r >= 1".into()));
    }
    let s: Rational = (0..r).map(central).sum();
    Ok(over_pi(lemma_prefactor(r) * s))
}

/// `A(m) = sum_{n>=0} c_n / (2n + 1 - 2m)`.
pub fn lemma5_a(m: u32) -> Result<ClosedForm> {
    if m == 0 {
        return Err(Error::Domain("A(m) needs m >= 1".into()));
    }
    Ok(over_pi(a_rational(m)))
}

/// `B(m) = sum_{n>=0} c_n / (2n + 1 - 2m)^2`.
pub fn lemma5_b(m: u32) -> Result<ClosedForm> {
    if m == 0 {
        return Err(Error::Domain("B(m) needs m >= 1".into()));
    }
    let pre = lemma_prefactor(m);
    let mut first = Rational::new();
    for k in 1..m {
        first += central(k) * q(k, 2 * k + 1) * a_rational(k);
    }
    let mut second = Rational::new();
    for k in 0..m {
        second += central(k) / Rational::from(2 * k + 1);
    }
    Ok(over_pi(pre.clone() * first + pre * second))
}

fn lam_ratio(l: u32) -> Rational {
    // 4 l^2 / (1 + 2 l)^2
    q(4 * l * l, (2 * l + 1) * (2 * l + 1))
}

/// One step of the `first` recurrence: the value at `l + 1` from the value at `l`
/// and `aux(l + 1)`.
pub fn first_step(l: u32, first_l: &ClosedForm, aux_next: &ClosedForm) -> Result<ClosedForm> {
    let (a, b) = (lemma5_a(l + 1)?, lemma5_b(l + 1)?);
    let l2 = l * l;
    let d = 2 * l2 * (2 * l + 1) * (2 * l + 1);
    let tail = ClosedForm::from_terms([
        (mono(-1, &[(Atom::Ln2, 1)]), q(4 * l, d)),
        (mono(-1, &[]), q(3, d)),
    ]);
    Ok(first_l
        .scale(&lam_ratio(l))
        .add(&aux_next.scale(&q(1, l * (2 * l + 1))))
        .sub(&a.scale(&q(3 + 2 * l, 4 * l2 * (2 * l + 1))))
        .add(&b.scale(&q(1, 2 * l)))
        .sub(&tail))
}

/// One step of the `second` recurrence.
pub fn second_step(l: u32, second_l: &ClosedForm, aux_next: &ClosedForm) -> Result<ClosedForm> {
    let a = lemma5_a(l + 1)?;
    let l2 = l * l;
    let e = 12 * l2 * (2 * l + 1) * (2 * l + 1);
    let tail = ClosedForm::from_terms([
        (mono(-1, &[(Atom::Ln2, 2)]), q(24 * l2, e)),
        (mono(1, &[]), q(l2, e)),
        (mono(-1, &[(Atom::Ln2, 1)]), q(24 * l, e)),
        (mono(-1, &[]), q(6, e)),
    ]);
    Ok(second_l
        .scale(&lam_ratio(l))
        .add(&aux_next.scale(&q(1, l)))
        .sub(&a.scale(&q(1, 4 * l2)))
        .sub(&tail))
}

/// One step of the `main` recurrence; needs the `second`, `aux` and `first`
/// values at `l + 1`.
pub fn main_step(
    l: u32,
    main_l: &ClosedForm,
    second_next: &ClosedForm,
    aux_next: &ClosedForm,
    first_next: &ClosedForm,
) -> Result<ClosedForm> {
    let (a, b) = (lemma5_a(l + 1)?, lemma5_b(l + 1)?);
    let l2 = l * l;
    let l3 = l2 * l;
    let e = 12 * l3 * (2 * l + 1) * (2 * l + 1);
    let tail = ClosedForm::from_terms([
        (mono(-1, &[(Atom::Ln2, 2)]), q(24 * l2, e)),
        (mono(1, &[]), q(l2, e)),
        (mono(-1, &[(Atom::Ln2, 1)]), q(36 * l, e)),
        (mono(-1, &[]), q(12, e)),
    ]);
    Ok(main_l
        .scale(&lam_ratio(l))
        .add(&second_next.scale(&q(1, l * (2 * l + 1))))
        .sub(&aux_next.scale(&q(3 + 2 * l, 2 * l2 * (2 * l + 1))))
        .add(&first_next.scale(&q(1, l)))
        .add(&a.scale(&q(1 + l, 2 * l3 * (2 * l + 1))))
        .sub(&b.scale(&q(1, 4 * l2)))
        .add(&tail))
}

/// Iterates the recurrences bottom-up, memoizing every value it produces.
pub struct RecurrenceEngine<'a> {
    catalog: &'a Catalog,
    tables: BTreeMap<FamilyName, LambdaTable>,
    gate: HashMap<String, bool>,
}

impl<'a> RecurrenceEngine<'a> {
    pub fn new(catalog: &'a Catalog) -> Self {
        let tables = FamilyName::ALL
            .iter()
            .map(|&f| (f, LambdaTable::new(f)))
            .collect();
        Self {
            catalog,
            tables,
            gate: HashMap::new(),
        }
    }

    pub fn table(&self, family: FamilyName) -> &LambdaTable {
        &self.tables[&family]
    }

    pub fn provenance(&self, family: FamilyName, lambda: u32) -> Option<Provenance> {
        self.tables[&family].entries.get(&lambda).map(|e| e.provenance)
    }

    fn store(&mut self, family: FamilyName, lambda: u32, entry: LambdaEntry) -> ClosedForm {
        let v = entry.value.clone();
        self.tables
            .get_mut(&family)
            .expect("all families present")
            .entries
            .insert(lambda, entry);
        v
    }

    fn cached(&self, family: FamilyName, lambda: u32) -> Option<ClosedForm> {
        self.tables[&family].get(lambda).cloned()
    }

    /// Catalog record for the family at `lambda`. For weights that vanish at
    /// `n = 0` a record starting there is the same sum.
    fn record_for(&self, family: FamilyName, lambda: u32) -> Result<Option<&'a IdentityRecord>> {
        let spec = family.series(lambda)?;
        if let Some(r) = self.catalog.find_series(&spec) {
            return Ok(Some(r));
        }
        Ok(self.catalog.find_series(&spec.with_start(0)?))
    }

    fn passes_gate(&mut self, record: &IdentityRecord) -> bool {
        if record.status != Status::External {
            return true;
        }
        if let Some(&ok) = self.gate.get(&record.id) {
            return ok;
        }
        let ok = verify_record(record, EXTERNAL_DIGITS).pass;
        self.gate.insert(record.id.clone(), ok);
        ok
    }

    /// Reads a value from the catalog. Proved records become base cases,
    /// External ones must pass verification first.
    fn from_catalog(&mut self, family: FamilyName, lambda: u32) -> Result<ClosedForm> {
        if let Some(v) = self.cached(family, lambda) {
            return Ok(v);
        }
        let missing = || -> Result<Error> {
            Ok(Error::MissingExternal(family.series(lambda)?.to_string()))
        };
        let record = match self.record_for(family, lambda)? {
            Some(r) => r,
            None => return Err(missing()?),
        };
        if !self.passes_gate(record) {
            return Err(missing()?);
        }
        let provenance = match record.status {
            Status::External => Provenance::External,
            _ => Provenance::BaseCase,
        };
        Ok(self.store(
            family,
            lambda,
            LambdaEntry {
                value: record.rhs.clone(),
                provenance,
                source: Some(record.id.clone()),
            },
        ))
    }

    /// Exact closed form of `family` at `lambda`.
    pub fn extend(&mut self, family: FamilyName, lambda: u32) -> Result<ClosedForm> {
        if lambda == 0 {
            return Err(Error::Domain("lambda must be at least 1".into()));
        }
        if let Some(v) = self.cached(family, lambda) {
            return Ok(v);
        }
        if family == FamilyName::AuxOLinear || lambda == 1 {
            return self.from_catalog(family, lambda);
        }
        let mut l = (1..lambda)
            .rev()
            .find(|&l| self.cached(family, l).is_some())
            .unwrap_or(1);
        let mut cur = self.extend(family, l)?;
        while l < lambda {
            let aux = self.extend(FamilyName::AuxOLinear, l + 1)?;
            let next = match family {
                FamilyName::FirstProblem => first_step(l, &cur, &aux)?,
                FamilyName::SecondProblem => second_step(l, &cur, &aux)?,
                FamilyName::MainProblem => {
                    let second = self.extend(FamilyName::SecondProblem, l + 1)?;
                    let first = self.extend(FamilyName::FirstProblem, l + 1)?;
                    main_step(l, &cur, &second, &aux, &first)?
                }
                FamilyName::AuxOLinear => unreachable!(),
            };
            l += 1;
            cur = self.store(
                family,
                l,
                LambdaEntry {
                    value: next,
                    provenance: Provenance::Recurrence,
                    source: None,
                },
            );
        }
        Ok(cur)
    }
}

/// `extend` against a fresh engine.
pub fn extend(catalog: &Catalog, family: FamilyName, lambda: u32) -> Result<ClosedForm> {
    RecurrenceEngine::new(catalog).extend(family, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::cf_parse;
    use crate::numeric::{context, digits_agreed};
    use crate::series::sum_accelerated;
    use rug::Float;

    fn cf(s: &str) -> ClosedForm {
        cf_parse(s).unwrap()
    }

    #[test]
    fn ramanujan_small_cases() {
        assert_eq!(ramanujan_s(1).unwrap(), cf("4/pi"));
        assert_eq!(ramanujan_s(2).unwrap(), cf("20/9/pi"));
        assert!(ramanujan_s(0).is_err());
    }

    #[test]
    fn lemma_small_cases() {
        assert_eq!(lemma5_a(1).unwrap(), cf("-2/pi"));
        assert_eq!(lemma5_b(1).unwrap(), cf("4/pi"));
        assert!(lemma5_a(0).is_err());
        assert!(lemma5_b(0).is_err());
        for m in 1..8 {
            assert_eq!(lemma5_a(m).unwrap(), ramanujan_s(m).unwrap().scale(&q(-1, 2)));
        }
    }

    #[test]
    fn lemma_values_match_sums() {
        let ctx = context(20).unwrap();
        for m in 1..=5u32 {
            for (p, v) in [(1, lemma5_a(m).unwrap()), (2, lemma5_b(m).unwrap())] {
                let pow = if p == 1 { String::new() } else { format!("^{p}") };
                let spec: SeriesSpec = format!("binom2/16^n * 1 / (2n-{}){pow} from n=0", 2 * m - 1)
                    .parse()
                    .unwrap();
                let (s, _) = sum_accelerated(&spec, &ctx).unwrap();
                let diff = Float::with_val(ctx.bits(), &s - v.eval(&ctx));
                assert!(digits_agreed(&diff, 30) >= 18, "m = {m}, p = {p}");
            }
        }
    }

    #[test]
    fn main_base_is_the_catalog_record() {
        let c = Catalog::bundled();
        let v = extend(c, FamilyName::MainProblem, 1).unwrap();
        assert_eq!(v, c.get("thm2_1").unwrap().rhs);
        assert_eq!(v.to_string(), c.get("thm2_1").unwrap().rhs.to_string());
    }

    #[test]
    fn printed_lists_are_reproduced() {
        let c = Catalog::bundled();
        let mut e = RecurrenceEngine::new(c);
        let cases = [
            (FamilyName::MainProblem, 2, "lambda2_main"),
            (FamilyName::MainProblem, 3, "main_lambda3"),
            (FamilyName::MainProblem, 4, "main_lambda4"),
            (FamilyName::FirstProblem, 2, "first_lambda2"),
            (FamilyName::FirstProblem, 3, "first_lambda3"),
            (FamilyName::FirstProblem, 4, "first_lambda4"),
            (FamilyName::SecondProblem, 2, "second_lambda2"),
            (FamilyName::SecondProblem, 3, "second_lambda3"),
            (FamilyName::SecondProblem, 4, "second_lambda4"),
        ];
        for (f, l, id) in cases {
            assert_eq!(e.extend(f, l).unwrap(), c.get(id).unwrap().rhs, "{f} {l}");
        }
        assert_eq!(e.provenance(FamilyName::MainProblem, 1), Some(Provenance::BaseCase));
        assert_eq!(e.provenance(FamilyName::MainProblem, 4), Some(Provenance::Recurrence));
        assert_eq!(e.provenance(FamilyName::FirstProblem, 1), Some(Provenance::External));
        assert_eq!(e.provenance(FamilyName::AuxOLinear, 3), Some(Provenance::External));
    }

    #[test]
    fn first_recurrence_telescopes() {
        let c = Catalog::bundled();
        let two = &c.get("first_lambda2").unwrap().rhs;
        let aux3 = &c.get("wang_chu_o_linear_3").unwrap().rhs;
        let three = first_step(2, two, aux3).unwrap();
        assert_eq!(three, c.get("first_lambda3").unwrap().rhs);
    }

    #[test]
    fn missing_external_is_reported() {
        let full = Catalog::bundled();
        let without: Vec<_> = full
            .records()
            .iter()
            .filter(|r| r.id != "wang_chu_o_linear_3")
            .cloned()
            .collect();
        let c = Catalog::from_records(without).unwrap();
        let err = extend(&c, FamilyName::SecondProblem, 3).unwrap_err();
        assert_eq!(
            err,
            Error::MissingExternal("binom2/16^n * O / (2n-5) from n=1".into())
        );
        assert!(extend(&c, FamilyName::SecondProblem, 2).is_ok());
    }

    #[test]
    fn wrong_external_is_refused() {
        let mut records = Catalog::bundled().records().to_vec();
        let r = records
            .iter_mut()
            .find(|r| r.id == "wang_chu_o_linear_2")
            .unwrap();
        r.rhs = cf("-4/9/pi + 10/9*ln2/pi + 1/1000000000000000");
        let c = Catalog::from_records(records).unwrap();
        assert!(matches!(
            extend(&c, FamilyName::FirstProblem, 2),
            Err(Error::MissingExternal(_))
        ));
    }

    #[test]
    fn family_names_round_trip() {
        for f in FamilyName::ALL {
            assert_eq!(f.name().parse::<FamilyName>().unwrap(), f);
        }
        assert!("third".parse::<FamilyName>().is_err());
        assert_eq!(
            FamilyName::MainProblem.series(2).unwrap().to_string(),
            "binom2/16^n * O^2 / (2n-3)^2 from n=1"
        );
    }
}
