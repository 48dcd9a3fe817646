//! Congruence witnesses `(k, ν(k), m, n, x, y, z)`.
//!
//! For every `k >= 2` the construction produces `m, n, x` with
//!
//! ```text
//!          x ≡ 2^(2m-1) - 1  (mod 2^(2m))
//! 3^(k-1)·x ≡ 2^(2n)   - 1  (mod 2^(2n+1))
//! ```
//!
//! and then the least positive `y` with `k·2^(-ν(k))·y ≡ x (mod 2^(2m+2n+1))`.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bits::BitCount;
use crate::error::{invalid, Error, Result};

/// Which branch of the construction produced `(m, n, x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum CaseTag {
    EvenK,
    /// `k` odd and `s = 2u + 1`.
    OddSOdd { s: u32, a: u8 },
    /// `k` odd and `s = 2u`.
    OddSEven { s: u32, a: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceWitness {
    pub k: u32,
    pub nu: u32,
    pub m: u32,
    pub n: u32,
    pub x: BigUint,
    pub y: BigUint,
    pub z: BigUint,
    pub case: CaseTag,
}

/// JSON form of a witness; every integer is a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub k: String,
    pub nu: String,
    pub m: String,
    pub n: String,
    pub x: String,
    pub y: String,
    pub z: String,
    #[serde(rename = "caseTag")]
    pub case_tag: CaseTag,
    #[serde(rename = "minValidN")]
    pub min_valid_n: String,
}

impl CongruenceWitness {
    /// Exponent of the modulus `2^(2m+2n+1)` in the shift congruence.
    pub fn shift_modulus_bits(&self) -> u64 {
        2 * u64::from(self.m) + 2 * u64::from(self.n) + 1
    }

    /// The odd part `k·2^(-ν(k))`.
    pub fn odd_part(&self) -> u64 {
        u64::from(self.k) >> self.nu
    }

    pub fn to_record(&self) -> WitnessRecord {
        WitnessRecord {
            k: self.k.to_string(),
            nu: self.nu.to_string(),
            m: self.m.to_string(),
            n: self.n.to_string(),
            x: self.x.to_string(),
            y: self.y.to_string(),
            z: self.z.to_string(),
            case_tag: self.case,
            min_valid_n: min_valid_n(self).to_string(),
        }
    }
}

pub fn two_adic_valuation(k: u64) -> Result<u32> {
    if k == 0 {
        return invalid("the 2-adic valuation of 0 is infinite");
    }
    Ok(k.trailing_zeros())
}

fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

fn three_pow(e: u32) -> BigUint {
    BigUint::from(3u32).pow(e)
}

/// The canonical solution `(m, n, x)` of the two simultaneous congruences.
pub fn solve_congruence(k: u32) -> Result<(u32, u32, BigUint, CaseTag)> {
    if k < 2 {
        return invalid(format!("k must be at least 2, got {k}"));
    }
    if k % 2 == 0 {
        return Ok((1, 1, BigUint::one(), CaseTag::EvenK));
    }
    // 3^(k-1) - 1 = 9^l - 1 is divisible by 8, so its lowest set bit s is >= 3.
    let p = three_pow(k - 1);
    let s = (&p - 1u32)
        .trailing_zeros()
        .ok_or_else(|| Error::Invariant("3^(k-1) = 1 for k >= 3".into()))?;
    let s = u32::try_from(s).map_err(|_| Error::Invariant("valuation too large".into()))?;
    if s < 3 {
        return Err(Error::Invariant(format!("expected s >= 3, found {s}")));
    }
    let a = u8::from(p.bit(u64::from(s) + 1));
    let (m, n, x, case) = if s % 2 == 1 {
        let u = (s - 1) / 2;
        let mut x = pow2(2 * u64::from(u) + 1) - 1u32;
        if a == 0 {
            x += pow2(2 * u64::from(u) + 2);
        }
        (u + 1, u + 1, x, CaseTag::OddSOdd { s, a })
    } else {
        let u = s / 2;
        let x = pow2(2 * u64::from(u) + 1) - 1u32 + pow2(2 * u64::from(u) + 2);
        (u + 1, u, x, CaseTag::OddSEven { s, a })
    };
    if !verify_congruence(k, m, n, &x) {
        return Err(Error::Invariant(format!(
            "constructed x = {x} fails the congruences for k = {k}"
        )));
    }
    Ok((m, n, x, case))
}

/// Direct modular check of both congruences.
pub fn verify_congruence(k: u32, m: u32, n: u32, x: &BigUint) -> bool {
    if k < 2 || m == 0 || n == 0 || x.is_zero() {
        return false;
    }
    let (m, n) = (u64::from(m), u64::from(n));
    let first = x % pow2(2 * m) == pow2(2 * m - 1) - 1u32;
    let second = (three_pow(k - 1) * x) % pow2(2 * n + 1) == pow2(2 * n) - 1u32;
    first && second
}

/// Inverse of an odd number modulo `2^bits` by Hensel lifting.
pub fn inverse_mod_pow2(odd: &BigUint, bits: u64) -> Result<BigUint> {
    if odd.is_even() {
        return invalid("only odd numbers are invertible modulo a power of two");
    }
    let modulus = pow2(bits);
    let a = odd % &modulus;
    let mut inv = BigUint::one();
    let mut good = 1u64;
    while good < bits {
        // inv <- inv·(2 - a·inv), doubling the number of correct low bits
        let t = (&a * &inv) % &modulus;
        let two = BigUint::from(2u32);
        let correction = (&modulus + two - t) % &modulus;
        inv = (inv * correction) % &modulus;
        good *= 2;
    }
    Ok(inv % modulus)
}

pub fn shift_witness(k: u32) -> Result<CongruenceWitness> {
    let (m, n, x, case) = solve_congruence(k)?;
    let nu = two_adic_valuation(u64::from(k))?;
    let odd = BigUint::from(k >> nu);
    let bits = 2 * u64::from(m) + 2 * u64::from(n) + 1;
    let modulus = pow2(bits);
    let mut y = (inverse_mod_pow2(&odd, bits)? * &x) % &modulus;
    if y.is_zero() {
        y = modulus.clone();
    }
    let z = &odd * &y;
    let w = CongruenceWitness {
        k,
        nu,
        m,
        n,
        x,
        y,
        z,
        case,
    };
    if !witness_invariants_hold(&w) {
        return Err(Error::Invariant(format!("witness for k = {k} is inconsistent")));
    }
    Ok(w)
}

/// All type invariants of a witness, checked from scratch.
pub fn witness_invariants_hold(w: &CongruenceWitness) -> bool {
    if !verify_congruence(w.k, w.m, w.n, &w.x) {
        return false;
    }
    if u64::from(w.nu) != u64::from(w.k.trailing_zeros()) {
        return false;
    }
    let modulus = pow2(w.shift_modulus_bits());
    let odd = BigUint::from(w.odd_part());
    w.y >= BigUint::one()
        && w.y <= modulus
        && (&odd * &w.y) % &modulus == &w.x % &modulus
        && w.z == &odd * &w.y
        && &w.z % &modulus == &w.x % &modulus
}

fn low_bits_are_zero_then_ones(v: &BigUint, ones: u64) -> bool {
    (0..ones).all(|i| v.bit(i)) && !v.bit(ones)
}

/// Binary suffix forms `(x)_2 = w 0 1^(2m-1)` and `(3^(k-1) x)_2 = w 0 1^(2n)`,
/// plus the two Thue–Morse identities they imply, for both `x` and `z`.
pub fn check_tm_identities(w: &CongruenceWitness) -> bool {
    let p = three_pow(w.k - 1);
    let ones_x = 2 * u64::from(w.m) - 1;
    let ones_px = 2 * u64::from(w.n);
    [&w.x, &w.z].into_iter().all(|v| {
        let pv = &p * v;
        let forms = low_bits_are_zero_then_ones(v, ones_x) && low_bits_are_zero_then_ones(&pv, ones_px);
        let first = (v + 1u32).parity() == v.parity();
        let second = (&pv + 1u32).parity() == 1 - pv.parity();
        forms && first && second
    })
}

/// `⌊λN⌋` with `λ = 1 + 1/(2(k-1))`, computed without rounding.
pub fn floor_lambda_n(k: u32, big_n: u64) -> u64 {
    big_n + big_n / (2 * u64::from(k - 1))
}

/// `κ(N) = kN - ν(k)`.
pub fn kappa(w: &CongruenceWitness, big_n: u64) -> u64 {
    u64::from(w.k) * big_n - u64::from(w.nu)
}

/// Coefficient bound `2^k·(2^(2m+2n+1))^k·(5·2^(N-2))^(k-1) < 2^(kN-ν(k))`,
/// both sides multiplied by `2^(2(k-1))` to stay integral.
pub fn coefficient_bound_holds(w: &CongruenceWitness, big_n: u64) -> bool {
    let k = u64::from(w.k);
    let lhs = BigUint::from(5u32).pow(w.k - 1)
        << (k + w.shift_modulus_bits() * k + big_n * (k - 1));
    let rhs = pow2(k * big_n - u64::from(w.nu) + 2 * (k - 1));
    lhs < rhs
}

/// Lower-power bound `2^(k-1)·(2^(2m+2n+1))^(k-1)·2^(⌊λN⌋(k-1)) < 2^(kN-ν(k))`.
pub fn lower_power_bound_holds(w: &CongruenceWitness, big_n: u64) -> bool {
    let k = u64::from(w.k);
    let lhs = pow2((k - 1) + w.shift_modulus_bits() * (k - 1) + floor_lambda_n(w.k, big_n) * (k - 1));
    let rhs = pow2(k * big_n - u64::from(w.nu));
    lhs < rhs
}

/// Least `N` from which both bounds hold for every larger `N` as well.
///
/// The lower-power bound is not monotone in `N` (the floor in `⌊λN⌋` jumps),
/// so the scan continues past the first success up to the point where
/// `(k-1)·⌊N/(2(k-1))⌋ <= N/2` makes it hold unconditionally.
pub fn min_valid_n(w: &CongruenceWitness) -> u64 {
    let k = u64::from(w.k);
    let safe = 2 * ((k - 1) * (1 + w.shift_modulus_bits()) + u64::from(w.nu)) + 1;
    let mut last_fail = 0;
    let mut big_n = 1;
    while big_n <= safe || !coefficient_bound_holds(w, big_n) {
        if !(coefficient_bound_holds(w, big_n) && lower_power_bound_holds(w, big_n)) {
            last_fail = big_n;
        }
        big_n += 1;
    }
    last_fail + 1
}

const CACHE_MAX_K: u32 = 256;

/// Witness for `k`, served from a table built once for `k <= 256`.
pub fn cached_witness(k: u32) -> Result<&'static CongruenceWitness> {
    static TABLE: OnceLock<Vec<CongruenceWitness>> = OnceLock::new();
    if !(2..=CACHE_MAX_K).contains(&k) {
        return invalid(format!("cached witnesses cover 2 <= k <= {CACHE_MAX_K}"));
    }
    let table = TABLE.get_or_init(|| {
        (2..=CACHE_MAX_K)
            .map(|k| shift_witness(k).expect("witness construction cannot fail for k >= 2"))
            .collect()
    });
    Ok(&table[(k - 2) as usize])
}
