use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use super::*;

fn naive_count(w: &[u8], m: usize) -> u64 {
    w.windows(m).collect::<HashSet<_>>().len() as u64
}

fn naive_has_cube(w: &[u8]) -> bool {
    let n = w.len();
    (1..=n / 3).any(|p| (0..=n - 3 * p).any(|s| w[s..s + p] == w[s + p..s + 2 * p] && w[s..s + p] == w[s + 2 * p..s + 3 * p]))
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn periodic_and_constant_words() {
    let alt: Vec<u8> = (0..100).map(|i| (i % 2) as u8).collect();
    assert_eq!(complexity_profile(&alt, 2, 3).unwrap().counts(), vec![2, 2, 2]);
    let zeros = vec![0u8; 10];
    assert_eq!(complexity_profile(&zeros, 2, 2).unwrap().counts(), vec![1, 1]);
    assert!(complexity_profile(&zeros, 2, 11).is_err());
}

#[test]
fn tm_complexity_matches_window_sets() {
    let w = tm_prefix(1, 1 << 20).unwrap();
    let r = subword_complexity(&w, 10).unwrap();
    for row in &r.rows {
        assert_eq!(row.count, naive_count(&w.bits, row.m), "m = {}", row.m);
    }
    assert!(r.bounds_hold && r.monotone_where_checked);
}

#[test]
fn large_windows_use_sorting() {
    let w = tm_prefix(2, 1 << 14).unwrap();
    for m in [27, 30, 40] {
        assert_eq!(count_factors(&w.bits, 2, m), naive_count(&w.bits, m));
    }
}

#[test]
fn moshe_bound_values() {
    assert_eq!(moshe_bound(2, 5), 32);
    assert_eq!(moshe_bound(3, 4), 4);
    assert_eq!(moshe_bound(3, 5), 6);
    assert_eq!(moshe_bound(4, 1), 2);
    assert_eq!(moshe_bound(4, 8), 4);
    assert_eq!(moshe_bound(40, 8), 2);
}

#[test]
fn moshe_small_cases() {
    let r = moshe_check(2, 1, 16).unwrap();
    assert_eq!(r.rows[0].count, 2);
    assert!(r.passed);
    let r = moshe_check(3, 8, 1 << 16).unwrap();
    assert!(r.passed);
    assert!(moshe_check(1, 3, 100).is_err());
}

#[test]
fn frequencies_sum_to_windows() {
    let t = block_frequencies(2, 4, 10_000).unwrap();
    assert_eq!(t.counts.iter().sum::<u64>(), t.windows);
    let t = block_frequencies(1, 3, 10_000).unwrap();
    assert_eq!(t.counts[0b000], 0);
    assert_eq!(t.counts[0b111], 0);
    assert_eq!(t.missing, 2);
}

#[test]
fn cube_detector() {
    assert_eq!(find_cube(&[0, 1, 0, 0, 1, 0, 0, 1, 0]), Some(Cube { start: 0, period: 3 }));
    assert_eq!(find_cube(&[1, 1, 1]), Some(Cube { start: 0, period: 1 }));
    assert!(cube_free_check(3).unwrap());
    assert!(cube_free_check(1 << 14).unwrap());
    assert!(cube_free_check(2).is_err());
}

#[test]
fn affine_identity_and_shift() {
    let xi = tm_prefix(1, 4096).unwrap().bits;
    let id = affine_complexity_compare(&rat(1, 1), &rat(0, 1), 2, &xi, 10).unwrap();
    assert!(id.rows.iter().all(|r| r.ratio == "1.000000"));
    assert_eq!(&id.digits[..], &xi[..id.certified_digits]);
    let dbl = affine_complexity_compare(&rat(2, 1), &rat(0, 1), 2, &xi, 10).unwrap();
    assert_eq!(dbl.integer_part, BigInt::from(xi[0]));
    assert_eq!(&dbl.digits[..100], &xi[1..101]);
    let half = affine_complexity_compare(&rat(1, 1), &rat(1, 2), 2, &xi, 12).unwrap();
    assert!(half.certified_digits > 4000);
    assert!(affine_complexity_compare(&rat(0, 1), &rat(1, 2), 2, &xi, 12).is_err());
}

#[test]
fn affine_negative_multiplier() {
    let xi = vec![0u8, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0];
    let r = affine_complexity_compare(&rat(-1, 1), &rat(1, 1), 2, &xi, 3).unwrap();
    // 1 − ξ flips digits away from the last position
    for (d, x) in r.digits.iter().zip(&xi) {
        assert_eq!(*d, 1 - x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_match_naive(w in prop::collection::vec(0u8..3, 1..300), m in 1usize..12) {
        prop_assume!(m <= w.len());
        prop_assert_eq!(count_factors(&w, 3, m), naive_count(&w, m));
    }

    #[test]
    fn cube_finder_matches_naive(w in prop::collection::vec(0u8..2, 3..80)) {
        let found = find_cube(&w);
        prop_assert_eq!(found.is_some(), naive_has_cube(&w));
        if let Some(c) = found {
            let p = c.period;
            prop_assert_eq!(&w[c.start..c.start + p], &w[c.start + p..c.start + 2 * p]);
            prop_assert_eq!(&w[c.start..c.start + p], &w[c.start + 2 * p..c.start + 3 * p]);
        }
    }
}
