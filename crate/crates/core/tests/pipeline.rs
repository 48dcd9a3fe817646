use num_bigint::BigInt;
use tmpow::approx::{
    build_approx, norm_contradiction_check, residual_series, s_of_n, LinearForm, NormAuditOptions,
    ResidualOptions,
};
use tmpow::field::NumberField;
use tmpow::lemma::{u_value, JSelection, LemmaLab};
use tmpow::witness::{cached_witness, min_valid_n};

fn golden() -> NumberField {
    NumberField::parse([-1, -1, 1]).unwrap()
}

#[test]
fn printed_constant_exceeds_certified_value_at_golden() {
    let w = cached_witness(2).unwrap();
    let form = LinearForm::from_ints(&golden(), &[0, 1]).unwrap();
    let r = residual_series(w, &form, 15, &ResidualOptions::default()).unwrap();
    // (β⁴−β²−1)/(β²(β²−1)) ≈ 0.7639 sits above the certified 0.7541; the
    // β³ denominator gives 0.4721, which holds
    assert!(r.scaled.upper() < r.lower_const.lower());
    let corrected = r.corrected_const.to_f64();
    assert!(r.scaled.to_f64() >= corrected * (1.0 - 1e-3));
    assert!(r.scaled.upper() <= r.c.lower());
}

#[test]
fn printed_bound_fails_at_two() {
    let w = cached_witness(2).unwrap();
    let form = LinearForm::from_ints(&NumberField::integer(2).unwrap(), &[0, 1]).unwrap();
    let r = residual_series(w, &form, 15, &ResidualOptions::default()).unwrap();
    assert!(r.exact);
    let lower = r.check("lower-bound").unwrap();
    assert!(!lower.passed && !lower.gating);
    assert!(r.passed());
}

#[test]
fn residual_record_is_all_strings() {
    let w = cached_witness(2).unwrap();
    let form = LinearForm::from_ints(&golden(), &[0, 1]).unwrap();
    let r = residual_series(w, &form, 15, &ResidualOptions::default()).unwrap();
    let v = serde_json::to_value(r.record()).unwrap();
    fn no_numbers(v: &serde_json::Value) -> bool {
        match v {
            serde_json::Value::Number(_) => false,
            serde_json::Value::Array(a) => a.iter().all(no_numbers),
            serde_json::Value::Object(o) => o.values().all(no_numbers),
            _ => true,
        }
    }
    assert!(no_numbers(&v));
    assert_eq!(v["N"], "15");
}

#[test]
fn residual_is_reproducible_across_thread_counts() {
    let w = cached_witness(2).unwrap();
    let form = LinearForm::from_ints(&NumberField::integer(2).unwrap(), &[0, 1]).unwrap();
    let opts = ResidualOptions::default();
    let run = |t: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .unwrap()
            .install(|| residual_series(w, &form, 15, &opts).unwrap().record())
    };
    let a = serde_json::to_string(&run(1)).unwrap();
    let b = serde_json::to_string(&run(4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn u_profile_starts_at_first_point() {
    let w = cached_witness(3).unwrap();
    let n = min_valid_n(w);
    let f = golden();
    let form = LinearForm::new(vec![f.zero(), f.one(), f.beta()]).unwrap();
    let r = residual_series(w, &form, n, &ResidualOptions::default()).unwrap();
    let first: BigInt = BigInt::from(1) << n as usize;
    assert_eq!(r.u_profile[0].j, (first + 1u8).to_string());
    let j = num_bigint::BigUint::from(1u8) << n as usize;
    assert_eq!(i8::try_from(r.u_first).unwrap(), u_value(w, n, &(j + 1u8)).unwrap());
    assert!(r.passed());
}

#[test]
fn lab_and_pair_share_kappa() {
    let w = cached_witness(4).unwrap();
    let n = min_valid_n(w);
    let f = golden();
    let form = LinearForm::from_ints(&f, &[1, 0, 0, 1]).unwrap();
    let pair = build_approx(w, &form, n, 0).unwrap();
    let lab = LemmaLab::new(w, n).unwrap();
    assert_eq!(pair.kappa(), lab.kappa());
    assert!(!pair.is_materialized());
    assert_eq!(pair.half_degree(), lab.base(0));
    let one = num_bigint::BigUint::from(1u8);
    assert!(s_of_n(&form, &one).unwrap().coords()[0] == BigInt::from(2));
    let r = lab.shift_invariance(&JSelection::Explicit(vec![0, 1, 2, 3])).unwrap();
    assert!(r.passed());
}

#[test]
fn norm_audit_plastic() {
    let w = cached_witness(2).unwrap();
    let f = NumberField::parse([-1, -1, 0, 1]).unwrap();
    let form = LinearForm::from_ints(&f, &[1, 1]).unwrap();
    let opts = NormAuditOptions {
        xi_coords: vec![BigInt::from(3), BigInt::from(-2), BigInt::from(1)],
        ..NormAuditOptions::default()
    };
    let a = norm_contradiction_check(w, &form, 3, &opts).unwrap();
    assert!(a.passed(), "{:?}", a.record());
    assert_eq!(a.degree, 3);
}
