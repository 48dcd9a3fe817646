use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

use super::*;
use crate::field::NumberField;
use crate::witness::shift_witness;

fn golden() -> NumberField {
    NumberField::parse([-1, -1, 1]).unwrap()
}

fn two() -> NumberField {
    NumberField::integer(2).unwrap()
}

fn below() -> ResidualOptions {
    ResidualOptions {
        allow_below_threshold: true,
        ..ResidualOptions::default()
    }
}

#[test]
fn s_of_n_examples() {
    let f = golden();
    let form = LinearForm::from_ints(&f, &[0, 1]).unwrap();
    assert!(s_of_n(&form, &BigUint::from(3u8)).unwrap().is_zero());
    let form = LinearForm::from_ints(&f, &[1, 0]).unwrap();
    assert!(s_of_n(&form, &BigUint::from(3u8)).unwrap().is_zero());
    let form = LinearForm::new(vec![f.beta(), f.from_int(3)]).unwrap();
    let v = s_of_n(&form, &BigUint::from(1u8)).unwrap();
    assert_eq!(v.coords(), &[BigInt::from(3), BigInt::from(1)]);
    assert!(s_of_n(&form, &BigUint::from(0u8)).is_err());
}

#[test]
fn small_pair_expands_by_hand() {
    let w = shift_witness(2).unwrap();
    let f = two();
    let form = LinearForm::from_ints(&f, &[0, 1]).unwrap();
    let pair = build_approx(&w, &form, 1, DEFAULT_TERM_BUDGET).unwrap();
    assert_eq!(pair.kappa(), 1);
    assert_eq!(pair.half_degree(), &BigUint::from(2u8));
    assert_eq!(pair.q_degree(), BigUint::from(4u8));
    // p = X(t(9) − t(1)) + X²(t(4) − t(0)) + X³ t(1) with t(n²)
    let expect: Vec<(u64, i64)> = vec![(1, -1), (2, 1), (3, 1)];
    let got: Vec<(u64, i64)> = pair
        .p_terms()
        .unwrap()
        .iter()
        .map(|(e, c)| (*e, i64::try_from(&c.coords()[0]).unwrap()))
        .collect();
    assert_eq!(got, expect);
    let q_at_one: BigInt = pair.q_terms().iter().map(|(_, c)| c.clone()).sum();
    assert_eq!(q_at_one, BigInt::from(0));
}

#[test]
fn degree_of_q_follows_kappa() {
    let w = shift_witness(2).unwrap();
    let form = LinearForm::from_ints(&golden(), &[0, 1]).unwrap();
    let pair = build_approx(&w, &form, 5, 16).unwrap();
    assert!(!pair.is_materialized());
    let kap = crate::witness::kappa(&w, 5);
    assert_eq!(pair.q_degree(), &w.y << (kap + 1));
}

#[test]
fn mismatched_k_rejected() {
    let w = shift_witness(3).unwrap();
    let form = LinearForm::from_ints(&golden(), &[0, 1]).unwrap();
    assert!(build_approx(&w, &form, 5, 16).is_err());
}

#[test]
fn leading_zero_rejected() {
    let w = shift_witness(2).unwrap();
    let form = LinearForm::from_ints(&golden(), &[1, 0]).unwrap();
    assert!(residual_series(&w, &form, 15, &ResidualOptions::default()).is_err());
}

#[test]
fn below_threshold_needs_opt_in() {
    let w = shift_witness(2).unwrap();
    let form = LinearForm::from_ints(&golden(), &[0, 1]).unwrap();
    assert!(matches!(
        residual_series(&w, &form, 5, &ResidualOptions::default()),
        Err(crate::Error::BelowThreshold { .. })
    ));
    let r = residual_series(&w, &form, 5, &below()).unwrap();
    assert!(r.below_threshold);
}

#[test]
fn truncated_identity_exact_at_two() {
    let w = shift_witness(2).unwrap();
    let form = LinearForm::from_ints(&two(), &[0, 1]).unwrap();
    for n in 1..=4 {
        let pair = build_approx(&w, &form, n, DEFAULT_TERM_BUDGET).unwrap();
        let t = 2 * pair.half_degree_u64().unwrap() + 40;
        let a = residual_truncated(&pair, t, 64).unwrap();
        let b = residual_direct(&pair, t, 64).unwrap();
        assert!(a.is_exact() && b.truncated.is_exact());
        assert_eq!(a.mid(), b.truncated.mid(), "N = {n}");
    }
}

#[test]
fn truncated_identity_golden() {
    let w = shift_witness(2).unwrap();
    let form = LinearForm::new(vec![golden().from_int(2), golden().beta()]).unwrap();
    let pair = build_approx(&w, &form, 2, DEFAULT_TERM_BUDGET).unwrap();
    let t = 2 * pair.half_degree_u64().unwrap() + 30;
    let a = residual_truncated(&pair, t, 96).unwrap();
    let b = residual_direct(&pair, t, 96).unwrap();
    assert!(a.overlaps(&b.truncated));
}

#[test]
fn zero_form_gives_zero() {
    let w = shift_witness(2).unwrap();
    let form = LinearForm::from_ints(&golden(), &[0, 0]).unwrap();
    let pair = build_approx(&w, &form, 2, DEFAULT_TERM_BUDGET).unwrap();
    let d = residual_direct(&pair, 2 * pair.half_degree_u64().unwrap(), 64).unwrap();
    assert!(d.enclosure.contains(&crate::dyadic::Dyadic::zero()));
    assert!(d.enclosure.is_exact());
}

#[test]
fn full_matches_direct() {
    let w = shift_witness(2).unwrap();
    for f in [two(), golden()] {
        let form = LinearForm::from_ints(&f, &[0, 1]).unwrap();
        for n in 3..=4 {
            let pair = build_approx(&w, &form, n, DEFAULT_TERM_BUDGET).unwrap();
            let t = 2 * pair.half_degree_u64().unwrap() + 200;
            let d = residual_direct(&pair, t, 80).unwrap();
            let full = residual_full(&w, &form, n, 200, 80).unwrap();
            assert!(d.enclosure.overlaps(&full), "N = {n}");
        }
    }
}

#[test]
fn golden_residual_at_threshold() {
    let w = shift_witness(2).unwrap();
    let form = LinearForm::from_ints(&golden(), &[0, 1]).unwrap();
    let r = residual_series(&w, &form, 15, &ResidualOptions::default()).unwrap();
    assert!(r.passed(), "{:?}", r.checks);
    assert!(r.check("lower-bound").unwrap().passed);
    assert_eq!(r.u_first.abs(), 1);
    let lo = r.lower_const.to_f64();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    // φ⁴ − φ² − 1 = 2φ and φ²(φ² − 1) = 2φ + 1
    assert!((lo - 2.0 * phi / (2.0 * phi + 1.0)).abs() < 1e-15);
    assert!((r.eps_n.to_f64() - phi.powi(-4)).abs() < 1e-12);
    assert!(r.scaled.to_f64() > 0.7 && r.scaled.to_f64() < 0.8);
}

#[test]
fn dropping_first_term_breaks_bound() {
    let w = shift_witness(2).unwrap();
    let form = LinearForm::from_ints(&golden(), &[0, 1]).unwrap();
    let r = residual_series(&w, &form, 15, &ResidualOptions::default()).unwrap();
    let phi = r.beta.clone();
    let first = phi.recip().unwrap().scale_int(&BigInt::from(r.u_first));
    let rest = (&r.scaled_signed - &first).abs();
    assert!(rest.upper() < r.lower_const.lower());
}

#[test]
fn binary_residual_exact_sum() {
    let w = shift_witness(2).unwrap();
    let form = LinearForm::from_ints(&two(), &[0, 1]).unwrap();
    let r = residual_series(&w, &form, 12, &below()).unwrap();
    assert!(r.exact);
    assert!(r.s.is_exact() && r.scaled.is_exact());
    assert!(r.check("upper-bound").unwrap().passed);
    assert!(r.check("lower-bound-corrected").unwrap().passed);
    assert!(!r.check("lower-bound").unwrap().gating);
}

#[test]
fn norm_audit_golden() {
    let w = shift_witness(2).unwrap();
    let form = LinearForm::from_ints(&golden(), &[0, 1]).unwrap();
    let a = norm_contradiction_check(&w, &form, 4, &NormAuditOptions::default()).unwrap();
    assert!(a.passed());
    let n0 = a.n0.unwrap();
    assert!(a.lhs_at_n0.as_ref().unwrap().upper() < crate::dyadic::Dyadic::one());
    assert_eq!(a.n0_valid, Some(n0.max(15)));
    assert!(a.c2_n.is_some() && a.c2_audit_passed());
}

#[test]
fn norm_audit_integer() {
    let w = shift_witness(2).unwrap();
    let form = LinearForm::from_ints(&two(), &[0, 1]).unwrap();
    let opts = NormAuditOptions {
        xi_coords: vec![BigInt::from(7)],
        ..NormAuditOptions::default()
    };
    let a = norm_contradiction_check(&w, &form, 3, &opts).unwrap();
    assert!(a.integer_case && a.passed());
    assert!(a.c2_n.is_none());
}

#[test]
fn norm_audit_not_applicable_off_pisot() {
    let w = shift_witness(2).unwrap();
    let f = NumberField::parse([-2, 0, 1]).unwrap();
    let form = LinearForm::from_ints(&f, &[0, 1]).unwrap();
    let a = norm_contradiction_check(&w, &form, 3, &NormAuditOptions::default()).unwrap();
    assert!(!a.applicable && !a.passed());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn n0_monotone_in_xi(a0 in 1i64..200, a1 in 1i64..200) {
        let w = shift_witness(2).unwrap();
        let form = LinearForm::from_ints(&golden(), &[0, 1]).unwrap();
        let mk = |s: i64| NormAuditOptions {
            xi_coords: vec![BigInt::from(a0 * s), BigInt::from(a1 * s)],
            term_budget: 0,
            ..NormAuditOptions::default()
        };
        let x = norm_contradiction_check(&w, &form, 2, &mk(1)).unwrap();
        let y = norm_contradiction_check(&w, &form, 2, &mk(2)).unwrap();
        prop_assert!(y.c2.lower() > x.c2.lower());
        prop_assert!(y.n0.unwrap() >= x.n0.unwrap());
        prop_assert!(y.n0.unwrap() <= x.n0.unwrap() + 1);
    }

    #[test]
    fn p_coefficient_matches_terms(n in 1u64..4) {
        let w = shift_witness(2).unwrap();
        let f = golden();
        let form = LinearForm::new(vec![f.beta(), f.from_int(-3)]).unwrap();
        let pair = build_approx(&w, &form, n, DEFAULT_TERM_BUDGET).unwrap();
        for (e, c) in pair.p_terms().unwrap() {
            prop_assert_eq!(&pair.p_coefficient(&BigUint::from(*e)), c);
        }
        prop_assert!(pair.p_coefficient(&pair.q_degree()).is_zero());
    }
}
