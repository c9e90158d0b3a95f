use ohl_core::catalog::Catalog;
use ohl_core::closed_form::{cf_combine, cf_eval, cf_parse, cf_render, Atom, ClosedForm, Monomial};
use ohl_core::numeric::{context, digits_agreed};
use ohl_core::relation::{basis_preset, find_relation, truncate_to_digits, RelationQuery};
use ohl_core::series::{
    partial_sum, sum_accelerated, t_sum, terms, LinearFactor, Prefactor, SeriesSpec,
    TSumComposition, Weight,
};
use proptest::prelude::*;
use rug::{Float, Integer, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..500).prop_map(|(n, d)| Rational::from((n, d)))
}

fn monomial() -> impl Strategy<Value = Monomial> {
    (-1i32..=3, prop::collection::vec((0usize..7, 1u32..=2), 0..3)).prop_filter_map(
        "out of bounds",
        |(pi, factors)| {
            let factors: Vec<(Atom, u32)> =
                factors.into_iter().map(|(i, e)| (Atom::ALL[i + 1], e)).collect();
            Monomial::new(pi, &factors).ok()
        },
    )
}

fn closed_form() -> impl Strategy<Value = ClosedForm> {
    prop::collection::vec((monomial(), rational()), 0..6).prop_map(ClosedForm::from_terms)
}

fn series_spec() -> impl Strategy<Value = SeriesSpec> {
    let prefactor = prop_oneof![Just(Prefactor::CentralBinomSquared), Just(Prefactor::CentralBinom)];
    let weight = prop_oneof![
        Just(Weight::One),
        Just(Weight::O),
        Just(Weight::OSquared),
        Just(Weight::H),
        Just(Weight::HOdd),
        Just(Weight::Z),
    ];
    let base = prop_oneof![
        Just(16i64),
        Just(-16),
        Just(4),
        Just(-4),
        Just(64),
        Just(-64),
        Just(32)
    ];
    let factor = (1i64..=3, -7i64..=7, 1u32..=4).prop_map(|(a, b, p)| LinearFactor::new(a, b, p));
    (prefactor, base, weight, prop::collection::vec(factor, 0..3), 0u64..=4).prop_filter_map(
        "invalid series",
        |(pf, base, w, d, start)| SeriesSpec::new(pf, Rational::from(base), w, d, start).ok(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_round_trip(cf in closed_form()) {
        let text = cf_render(&cf);
        prop_assert_eq!(cf_parse(&text).unwrap(), cf);
    }

    #[test]
    fn combine_is_linear_in_values(
        a in closed_form(),
        b in closed_form(),
        ca in rational(),
        cb in rational(),
    ) {
        let ctx = context(30).unwrap();
        let combined = cf_eval(&cf_combine(&a, &ca, &b, &cb), &ctx);
        let expected = Float::with_val(ctx.bits(), cf_eval(&a, &ctx) * &ca)
            + Float::with_val(ctx.bits(), cf_eval(&b, &ctx) * &cb);
        let scale = Float::with_val(64, expected.abs_ref()).max(&Float::with_val(64, 1));
        let rel = Float::with_val(ctx.bits(), &combined - &expected) / scale;
        prop_assert!(digits_agreed(&rel, 40) >= 25);
    }

    #[test]
    fn series_spec_round_trip(spec in series_spec()) {
        let text = spec.to_string();
        let parsed: SeriesSpec = text.parse().unwrap();
        prop_assert_eq!(parsed, spec);
    }

    #[test]
    fn stuffle_holds(k in 1u64..=150, a in 1u32..=4, b in 1u32..=4) {
        let ta = t_sum(k, &TSumComposition::new(vec![a]).unwrap());
        let tb = t_sum(k, &TSumComposition::new(vec![b]).unwrap());
        let lhs = Rational::from(&ta * &tb);
        let rhs = t_sum(k, &TSumComposition::new(vec![a, b]).unwrap())
            + t_sum(k, &TSumComposition::new(vec![b, a]).unwrap())
            + t_sum(k, &TSumComposition::new(vec![a + b]).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn positive_partial_sums_rise_to_the_accelerated_value(
        index in any::<prop::sample::Index>(),
        n in 1u64..1500,
    ) {
        let positive: Vec<SeriesSpec> = Catalog::bundled()
            .records()
            .iter()
            .filter_map(|r| r.lhs.as_series().cloned())
            .filter(|s| *s.base() > 0)
            .collect();
        let spec = index.get(&positive);
        let ctx = context(20).unwrap();
        let ts = terms(spec, n + 40, &ctx);
        prop_assume!(ts.iter().all(|t| *t >= 0));
        let (acc, err) = sum_accelerated(spec, &ctx).unwrap();
        let lower = partial_sum(spec, n, &ctx).unwrap();
        let upper = partial_sum(spec, n + 40, &ctx).unwrap();
        prop_assert!(lower <= upper);
        prop_assert!(upper <= acc + err);
    }

    #[test]
    fn pslq_recovers_small_combinations(coeffs in prop::collection::vec(-60i64..=60, 3)) {
        prop_assume!(coeffs.iter().any(|&c| c != 0));
        let ctx = context(50).unwrap();
        let basis = basis_preset("small").unwrap();
        let expected = ClosedForm::from_terms(
            basis.iter().zip(&coeffs).map(|(m, &c)| (*m, Rational::from(c))),
        );
        let target = truncate_to_digits(&cf_eval(&expected, &ctx), 50);
        let r = find_relation(&RelationQuery::new(target, basis), &ctx).unwrap();
        prop_assert!(r.found);
        prop_assert_eq!(r.closed_form().unwrap(), expected);
        prop_assert!(r.coefficients[0] != Integer::ZERO);
    }
}
