//! Registry of identities and their numeric verification.
//!
//! The bundled catalog lives in `data/catalog.json`; its schema is
//! documented in `docs/catalog.md`. A left-hand side is a series, an
//! integral, an inner-sum series, a constant expression, or a combination of
//! these with real constant coefficients.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::closed_form::{cf_eval, ClosedForm};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numeric::{context, digits_agreed, pow10, to_decimal, to_scientific, PrecisionContext, Real};
use crate::quad::quad_de;
use crate::series::{inner_weighted_sum, summation, InnerSum, SeriesSpec};

const BUNDLED: &str = include_str!("../data/catalog.json");

/// Digits that a verification must beat the requested count by.
pub const PASS_MARGIN: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Proved,
    Conjectural,
    External,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Proved => "Proved",
            Status::Conjectural => "Conjectural",
            Status::External => "External",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub lower: Expr,
    pub upper: Expr,
    pub integrand: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Series(SeriesSpec),
    /// `sum_k term(k) sum_{0<m<k} 1/(2m)`
    InnerSum(SeriesSpec),
    Integral(Integral),
    Constant(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: Expr,
    pub item: Item,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Lhs {
    Single(Item),
    Combination(Vec<Term>),
}

impl Lhs {
    /// The series if the left-hand side is a single series.
    pub fn as_series(&self) -> Option<&SeriesSpec> {
        match self {
            Lhs::Single(Item::Series(s)) => Some(s),
            _ => None,
        }
    }

    /// Every series mentioned, including inner-sum series.
    pub fn series(&self) -> Vec<&SeriesSpec> {
        let items: Vec<&Item> = match self {
            Lhs::Single(i) => vec![i],
            Lhs::Combination(ts) => ts.iter().map(|t| &t.item).collect(),
        };
        items
            .into_iter()
            .filter_map(|i| match i {
                Item::Series(s) | Item::InnerSum(s) => Some(s),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRecord {
    pub id: String,
    pub lhs: Lhs,
    pub rhs: ClosedForm,
    pub status: Status,
    pub anchor: String,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegral {
    lower: String,
    upper: String,
    integrand: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawItem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coef: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    series: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inner_sum: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    integral: Option<RawIntegral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constant: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RawLhs {
    Series(String),
    Combination { combination: Vec<RawItem> },
    Item(RawItem),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    lhs: RawLhs,
    rhs: String,
    status: Status,
    anchor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn parse_expr(id: &str, what: &str, s: &str) -> Result<Expr> {
    s.parse()
        .map_err(|e| Error::Catalog(format!("{id}: {what} `{s}`: {e}")))
}

fn parse_series(id: &str, s: &str) -> Result<SeriesSpec> {
    s.parse()
        .map_err(|e| Error::Catalog(format!("{id}: series `{s}`: {e}")))
}

fn item_from_raw(id: &str, raw: &RawItem) -> Result<Item> {
    let mut items = Vec::new();
    if let Some(s) = &raw.series {
        items.push(Item::Series(parse_series(id, s)?));
    }
    if let Some(s) = &raw.inner_sum {
        let spec = parse_series(id, s)?;
        items.push(Item::InnerSum(spec));
    }
    if let Some(i) = &raw.integral {
        items.push(Item::Integral(Integral {
            lower: parse_expr(id, "lower bound", &i.lower)?,
            upper: parse_expr(id, "upper bound", &i.upper)?,
            integrand: parse_expr(id, "integrand", &i.integrand)?,
        }));
    }
    if let Some(c) = &raw.constant {
        let e = parse_expr(id, "constant", c)?;
        if e.uses_variable() {
            return Err(Error::Catalog(format!("{id}: constant `{c}` uses a variable")));
        }
        items.push(Item::Constant(e));
    }
    match items.len() {
        1 => Ok(items.pop().expect("one item")),
        0 => Err(Error::Catalog(format!(
            "{id}: term needs one of series, inner_sum, integral, constant"
        ))),
        _ => Err(Error::Catalog(format!("{id}: term has more than one kind"))),
    }
}

fn item_to_raw(item: &Item, coef: Option<String>) -> RawItem {
    let mut r = RawItem {
        coef,
        ..RawItem::default()
    };
    match item {
        Item::Series(s) => r.series = Some(s.to_string()),
        Item::InnerSum(s) => r.inner_sum = Some(s.to_string()),
        Item::Integral(i) => {
            r.integral = Some(RawIntegral {
                lower: i.lower.to_string(),
                upper: i.upper.to_string(),
                integrand: i.integrand.to_string(),
            })
        }
        Item::Constant(e) => r.constant = Some(e.to_string()),
    }
    r
}

impl IdentityRecord {
    fn from_raw(raw: RawRecord) -> Result<Self> {
        let id = raw.id;
        if id.is_empty() || !id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
            return Err(Error::Catalog(format!("invalid id `{id}`")));
        }
        let lhs = match &raw.lhs {
            RawLhs::Series(s) => Lhs::Single(Item::Series(parse_series(&id, s)?)),
            RawLhs::Item(item) => {
                if item.coef.is_some() {
                    return Err(Error::Catalog(format!(
                        "{id}: `coef` is only allowed inside a combination"
                    )));
                }
                Lhs::Single(item_from_raw(&id, item)?)
            }
            RawLhs::Combination { combination } => {
                if combination.is_empty() {
                    return Err(Error::Catalog(format!("{id}: empty combination")));
                }
                let mut terms = Vec::new();
                for t in combination {
                    let coefficient =
                        parse_expr(&id, "coefficient", t.coef.as_deref().unwrap_or("1"))?;
                    if coefficient.uses_variable() {
                        return Err(Error::Catalog(format!("{id}: coefficient uses a variable")));
                    }
                    terms.push(Term {
                        coefficient,
                        item: item_from_raw(&id, t)?,
                    });
                }
                Lhs::Combination(terms)
            }
        };
        let rhs = raw
            .rhs
            .parse()
            .map_err(|e| Error::Catalog(format!("{id}: rhs `{}`: {e}", raw.rhs)))?;
        if raw.anchor.trim().is_empty() {
            return Err(Error::Catalog(format!("{id}: empty anchor")));
        }
        Ok(IdentityRecord {
            id,
            lhs,
            rhs,
            status: raw.status,
            anchor: raw.anchor,
            note: raw.note,
        })
    }

    fn to_raw(&self) -> RawRecord {
        let lhs = match &self.lhs {
            Lhs::Single(Item::Series(s)) => RawLhs::Series(s.to_string()),
            Lhs::Single(i) => RawLhs::Item(item_to_raw(i, None)),
            Lhs::Combination(ts) => RawLhs::Combination {
                combination: ts
                    .iter()
                    .map(|t| item_to_raw(&t.item, Some(t.coefficient.to_string())))
                    .collect(),
            },
        };
        RawRecord {
            id: self.id.clone(),
            lhs,
            rhs: self.rhs.to_string(),
            status: self.status,
            anchor: self.anchor.clone(),
            note: self.note.clone(),
        }
    }
}

impl Serialize for IdentityRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_raw().serialize(s)
    }
}

/// An ordered, validated list of records with unique ids.
#[derive(Debug, Clone)]
pub struct Catalog {
    records: Vec<IdentityRecord>,
}

impl Catalog {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<RawRecord> =
            serde_json::from_str(text).map_err(|e| Error::Catalog(e.to_string()))?;
        let records = raw
            .into_iter()
            .map(IdentityRecord::from_raw)
            .collect::<Result<Vec<_>>>()?;
        Self::from_records(records)
    }

    /// Builds a catalog from already parsed records, rejecting duplicate ids.
    pub fn from_records(records: Vec<IdentityRecord>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &records {
            if !seen.insert(r.id.as_str()) {
                return Err(Error::Catalog(format!("duplicate id `{}`", r.id)));
            }
        }
        Ok(Catalog { records })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Catalog(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn bundled() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| Catalog::from_json(BUNDLED).expect("bundled catalog is valid"))
    }

    pub fn records(&self) -> &[IdentityRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Result<&IdentityRecord> {
        self.records
            .iter()
            .find(|r| r.id == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    /// Ids sharing a substring with `query`, closest first.
    pub fn near_matches(&self, query: &str) -> Vec<&str> {
        let q = query.to_ascii_lowercase();
        let mut scored: Vec<(usize, &str)> = self
            .records
            .iter()
            .map(|r| (common_substring(&q, &r.id.to_ascii_lowercase()), r.id.as_str()))
            .filter(|(s, _)| *s >= 3.min(q.len()).max(1))
            .collect();
        scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(b.1)));
        scored.into_iter().take(8).map(|(_, id)| id).collect()
    }

    /// Records whose lhs is exactly `spec`, excluding conjectures.
    pub fn find_series(&self, spec: &SeriesSpec) -> Option<&IdentityRecord> {
        self.records
            .iter()
            .find(|r| r.status != Status::Conjectural && r.lhs.as_series() == Some(spec))
    }

    pub fn to_json(&self) -> String {
        let raw: Vec<RawRecord> = self.records.iter().map(|r| r.to_raw()).collect();
        serde_json::to_string_pretty(&raw).expect("serializable")
    }
}

fn common_substring(a: &str, b: &str) -> usize {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    let mut best = 0;
    let mut prev = vec![0usize; b.len() + 1];
    for i in 1..=a.len() {
        let mut cur = vec![0usize; b.len() + 1];
        for j in 1..=b.len() {
            if a[i - 1] == b[j - 1] {
                cur[j] = prev[j - 1] + 1;
                best = best.max(cur[j]);
            }
        }
        prev = cur;
    }
    best
}

/// The bundled catalog's records.
pub fn catalog() -> &'static [IdentityRecord] {
    Catalog::bundled().records()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub id: String,
    pub status: Status,
    pub requested_digits: u32,
    pub lhs_value: String,
    pub rhs_value: String,
    pub abs_diff: String,
    pub digits_agreed: u32,
    pub pass: bool,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A numeric value with an error estimate and the methods used.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: Real,
    pub error: Real,
    pub method: String,
}

fn eval_item(item: &Item, ctx: &PrecisionContext) -> Result<Evaluation> {
    match item {
        Item::Series(s) => {
            let r = summation(s, ctx)?;
            Ok(Evaluation {
                value: r.value,
                error: r.error,
                method: r.method.name().to_string(),
            })
        }
        Item::InnerSum(s) => {
            let (value, error) = inner_weighted_sum(s, InnerSum::SumOverEvenReciprocal, ctx)?;
            Ok(Evaluation {
                value,
                error,
                method: "inner-sum".to_string(),
            })
        }
        Item::Integral(i) => {
            let f = i.integrand.integrand(&i.lower, &i.upper, ctx)?;
            let r = quad_de(&f, ctx)?;
            Ok(Evaluation {
                value: r.value,
                error: r.estimate,
                method: "tanh-sinh".to_string(),
            })
        }
        Item::Constant(e) => Ok(Evaluation {
            value: e.eval_constant(ctx)?,
            error: ctx.zero(),
            method: "constant".to_string(),
        }),
    }
}

/// Numeric value of a left-hand side.
pub fn evaluate_lhs(lhs: &Lhs, ctx: &PrecisionContext) -> Result<Evaluation> {
    match lhs {
        Lhs::Single(i) => eval_item(i, ctx),
        Lhs::Combination(terms) => {
            let mut value = ctx.zero();
            let mut error = ctx.zero();
            let mut methods: Vec<String> = Vec::new();
            for t in terms {
                let c = t.coefficient.eval_constant(ctx)?;
                let e = eval_item(&t.item, ctx)?;
                value += Float::with_val(ctx.bits(), &c * &e.value);
                error += Float::with_val(ctx.bits(), &c * &e.error).abs();
                if !methods.contains(&e.method) {
                    methods.push(e.method);
                }
            }
            Ok(Evaluation {
                value,
                error,
                method: format!("combination({})", methods.join(",")),
            })
        }
    }
}

/// Verifies a record to `digits` decimal digits.
pub fn verify_record(record: &IdentityRecord, digits: u32) -> VerificationReport {
    let failed = |msg: String| VerificationReport {
        id: record.id.clone(),
        status: record.status,
        requested_digits: digits,
        lhs_value: String::new(),
        rhs_value: String::new(),
        abs_diff: String::new(),
        digits_agreed: 0,
        pass: false,
        method: "error".to_string(),
        error: Some(msg),
    };
    if digits <= PASS_MARGIN {
        return failed(format!("digits must exceed {PASS_MARGIN}"));
    }
    let ctx = match context(digits) {
        Ok(c) => c,
        Err(e) => return failed(e.to_string()),
    };
    let lhs = match evaluate_lhs(&record.lhs, &ctx) {
        Ok(v) => v,
        Err(e) => return failed(e.to_string()),
    };
    let rhs = cf_eval(&record.rhs, &ctx);
    let diff = Float::with_val(ctx.bits(), &lhs.value - &rhs).abs();
    let threshold = pow10(-((digits - PASS_MARGIN) as i32), ctx.bits());
    let shown = digits + 2;
    VerificationReport {
        id: record.id.clone(),
        status: record.status,
        requested_digits: digits,
        lhs_value: to_decimal(&lhs.value, shown),
        rhs_value: to_decimal(&rhs, shown),
        abs_diff: to_scientific(&diff, 3),
        digits_agreed: digits_agreed(&diff, ctx.working_digits()),
        pass: diff < threshold,
        method: lhs.method,
        error: None,
    }
}

/// Looks up `id` in `catalog` and verifies it.
pub fn verify(catalog: &Catalog, id: &str, digits: u32) -> Result<VerificationReport> {
    Ok(verify_record(catalog.get(id)?, digits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_catalog_loads() {
        let c = Catalog::bundled();
        assert!(c.records().len() >= 45);
        let r = c.get("eq10_basel").unwrap();
        assert_eq!(r.status, Status::Proved);
        assert_eq!(
            r.lhs.as_series().unwrap().to_string(),
            "binom2/16^n * O^2 / (2n-1) from n=0"
        );
        assert_eq!(r.rhs, "4*G/pi - pi/12 - 2*ln2^2/pi".parse().unwrap());
        assert_eq!(c.get("sun_conj_35").unwrap().status, Status::Conjectural);
        assert!(matches!(c.get("nope"), Err(Error::UnknownId(_))));
    }

    #[test]
    fn json_round_trip() {
        let c = Catalog::bundled();
        let again = Catalog::from_json(&c.to_json()).unwrap();
        assert_eq!(again.records(), c.records());
    }

    #[test]
    fn rejects_malformed_catalogs() {
        let dup = r#"[{"id":"a","lhs":"binom2/16^n * 1 / (2n+1) from n=0","rhs":"4*G/pi","status":"Proved","anchor":"x"},
                      {"id":"a","lhs":"binom2/16^n * 1 / (2n+1) from n=0","rhs":"4*G/pi","status":"Proved","anchor":"x"}]"#;
        assert!(matches!(Catalog::from_json(dup), Err(Error::Catalog(_))));
        let bad_rhs = r#"[{"id":"a","lhs":"binom2/16^n * 1 / (2n+1) from n=0","rhs":"4*Q","status":"Proved","anchor":"x"}]"#;
        assert!(Catalog::from_json(bad_rhs).is_err());
        let two_kinds = r#"[{"id":"a","lhs":{"series":"binom2/16^n * 1 / (2n+1) from n=0","constant":"1"},"rhs":"1","status":"Proved","anchor":"x"}]"#;
        assert!(Catalog::from_json(two_kinds).is_err());
        let unknown_status = r#"[{"id":"a","lhs":"binom2/16^n * 1 / (2n+1) from n=0","rhs":"1","status":"Maybe","anchor":"x"}]"#;
        assert!(Catalog::from_json(unknown_status).is_err());
        assert!(Catalog::from_json("{}").is_err());
    }

    #[test]
    fn verify_simple_record() {
        let c = Catalog::bundled();
        let r = verify(c, "eq10_basel", 30).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.digits_agreed >= 25);
        assert_eq!(r.method, "euler-maclaurin");
    }

    #[test]
    fn engine_failure_is_reported() {
        let c = Catalog::from_json(
            r#"[{"id":"bad","lhs":{"integral":{"lower":"0","upper":"1","integrand":"1/t"}},"rhs":"0","status":"Proved","anchor":"x"}]"#,
        )
        .unwrap();
        let r = verify(&c, "bad", 30).unwrap();
        assert!(!r.pass);
        assert_eq!(r.method, "error");
    }

    #[test]
    fn near_matches_suggest_ids() {
        let c = Catalog::bundled();
        assert!(c.near_matches("basel").contains(&"eq10_basel"));
    }

    #[test]
    fn anchors_match_the_anchor_list() {
        let listed: std::collections::BTreeSet<&str> =
            include_str!("../data/anchors.txt").lines().filter(|l| !l.is_empty()).collect();
        let used: std::collections::BTreeSet<&str> =
            Catalog::bundled().records().iter().map(|r| r.anchor.as_str()).collect();
        assert_eq!(listed, used);
    }
}
