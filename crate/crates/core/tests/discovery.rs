use ohl_core::catalog::{evaluate_lhs, Catalog};
use ohl_core::numeric::{context, digits_agreed};
use ohl_core::recurrence::FamilyName;
use ohl_core::relation::{basis_preset, find_relation, truncate_to_digits, RelationQuery};
use ohl_core::series::sum_accelerated;
use rug::Float;

/// Records whose right-hand sides lie in the default basis.
pub const DESIGNATED: [&str; 12] = [
    "eq10_basel",
    "odd2kp1",
    "afterjay",
    "central_odd_1",
    "central_odd_2",
    "alpha2",
    "nocentral",
    "eq9_wz_combination",
    "paulbrilliant",
    "thirdpower",
    "use_it_integral",
    "wang_chu_first_base",
];

#[test]
fn designated_records_are_rediscovered() {
    let catalog = Catalog::bundled();
    let ctx = context(50).unwrap();
    let check = context(25).unwrap();
    let basis = basis_preset("default").unwrap();
    for id in DESIGNATED {
        let record = catalog.get(id).unwrap();
        let value = evaluate_lhs(&record.lhs, &ctx).unwrap().value;
        let q = RelationQuery::new(truncate_to_digits(&value, 50), basis.clone());
        let r = find_relation(&q, &ctx).unwrap();
        assert!(r.found, "{id}: no relation");
        let cf = r.closed_form().unwrap();
        let diff = Float::with_val(check.bits(), cf.eval(&check) - record.rhs.eval(&check));
        assert!(digits_agreed(&diff, 40) >= 25, "{id}: found {cf}");
    }
}

#[test]
fn auxiliary_values_are_rediscovered() {
    let catalog = Catalog::bundled();
    let ctx = context(50).unwrap();
    let basis = basis_preset("aux").unwrap();
    for lambda in 2..=8 {
        let spec = FamilyName::AuxOLinear.series(lambda).unwrap();
        let (value, _) = sum_accelerated(&spec, &ctx).unwrap();
        let q = RelationQuery::new(truncate_to_digits(&value, 50), basis.clone());
        let r = find_relation(&q, &ctx).unwrap();
        let record = catalog.find_series(&spec).unwrap();
        assert_eq!(r.closed_form().unwrap(), record.rhs, "lambda = {lambda}");
    }
}
