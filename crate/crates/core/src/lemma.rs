//! Exact verification of the shift-invariance lemmas.
//!
//! Each check evaluates `t((y·2^(κ+δ) + j)^r)` for `δ ∈ {0, 1}` by full
//! big-integer exponentiation. The binomial shortcut is exposed separately
//! ([`LemmaLab::congruence_shortcut`]) so it can be tested against the
//! direct evaluation rather than trusted by it.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitCount;
use crate::error::{invalid, Error, Result};
use crate::serde_util::{display, display_seq};
use crate::tm::parity_of_power;
use crate::witness::{floor_lambda_n, kappa, min_valid_n, CongruenceWitness};

pub const DEFAULT_BUDGET: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Lemma {
    /// Invariance for `j < 2^N` and `j = 2^N + 2h`.
    #[serde(rename = "shift-invariance")]
    ShiftInvariance,
    /// Failure at `2^N + 1`, invariance at `2^N + 3`.
    #[serde(rename = "special-points")]
    SpecialPoints,
    /// Invariance of lower powers `r < k` for `j <= 2^⌊λN⌋`.
    #[serde(rename = "lower-powers")]
    LowerPowers,
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lemma::ShiftInvariance => "shift-invariance",
            Lemma::SpecialPoints => "special-points",
            Lemma::LowerPowers => "lower-powers",
        })
    }
}

/// How the `j` values of a lemma range are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JSelection {
    /// Exhaustive when the range has at most `budget` points, otherwise a
    /// [`sample_plan`] with the given seed.
    Auto { budget: u64, seed: u64 },
    /// Exactly these values; each must lie in the lemma's range.
    Explicit(Vec<u128>),
}

impl Default for JSelection {
    fn default() -> Self {
        JSelection::Auto {
            budget: DEFAULT_BUDGET,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaReport {
    #[serde(serialize_with = "display")]
    pub k: u32,
    #[serde(rename = "N", serialize_with = "display")]
    pub n: u64,
    pub lemma: Lemma,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(serialize_with = "display")]
    pub j_tested: u64,
    #[serde(serialize_with = "display_seq")]
    pub j_failed: Vec<u128>,
    pub sampled: bool,
    pub seed_or_plan: String,
    /// Observed `u(2^N + 1)`; only its absolute value is asserted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed_sign: Option<i8>,
    pub below_threshold: bool,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.j_failed.is_empty()
    }
}

/// Deterministic selection of at most `budget` distinct values in `0..=range_end`.
///
/// Low values `0..min(budget/2, range_end)` come first, then the top 16 values
/// of the range, then seeded pseudo-random values until the budget is filled.
pub fn sample_plan(range_end: u128, budget: u64, seed: u64) -> Vec<u128> {
    let budget = budget.max(1);
    let size = range_end.saturating_add(1);
    if size <= u128::from(budget) {
        return (0..=range_end).collect();
    }
    let budget = budget as usize;
    let mut chosen = BTreeSet::new();
    let low = (budget / 2).min(usize::try_from(range_end).unwrap_or(usize::MAX));
    chosen.extend(0..low as u128);
    let top = 16.min(budget - chosen.len()) as u128;
    chosen.extend((0..top).map(|i| range_end - i));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while chosen.len() < budget {
        chosen.insert(rng.gen_range(0..=range_end));
    }
    chosen.into_iter().collect()
}

/// Shift bases `y·2^κ(N)` and `y·2^(κ(N)+1)` for one witness and `N`.
#[derive(Clone, Debug)]
pub struct LemmaLab {
    witness: CongruenceWitness,
    n: u64,
    kappa: u64,
    threshold: u64,
    base0: BigUint,
    base1: BigUint,
}

impl LemmaLab {
    /// Lab for `N >= min_valid_n`.
    pub fn new(witness: &CongruenceWitness, n: u64) -> Result<Self> {
        let lab = Self::unchecked(witness, n)?;
        if n < lab.threshold {
            return Err(Error::BelowThreshold {
                n,
                threshold: lab.threshold,
            });
        }
        Ok(lab)
    }

    /// Lab for any `N >= 1`; reports are flagged as below threshold.
    pub fn unchecked(witness: &CongruenceWitness, n: u64) -> Result<Self> {
        if n == 0 {
            return invalid("N must be at least 1");
        }
        let kappa = kappa(witness, n);
        let base0 = &witness.y << kappa;
        let base1 = &base0 << 1u32;
        Ok(LemmaLab {
            witness: witness.clone(),
            n,
            kappa,
            threshold: min_valid_n(witness),
            base0,
            base1,
        })
    }

    pub fn witness(&self) -> &CongruenceWitness {
        &self.witness
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn kappa(&self) -> u64 {
        self.kappa
    }

    pub fn below_threshold(&self) -> bool {
        self.n < self.threshold
    }

    /// `y·2^(κ(N)+δ)`.
    pub fn base(&self, delta: u8) -> &BigUint {
        if delta == 0 {
            &self.base0
        } else {
            &self.base1
        }
    }

    fn t_shifted(&self, delta: u8, j: &BigUint, r: u32) -> u8 {
        parity_of_power(&(self.base(delta) + j), r)
    }

    /// `t((y2^(κ+1) + j)^r) - t((y2^κ + j)^r)`.
    pub fn difference(&self, j: &BigUint, r: u32) -> i8 {
        self.t_shifted(1, j, r) as i8 - self.t_shifted(0, j, r) as i8
    }

    /// `u(j)`, the difference at the full power `k`.
    pub fn u_value(&self, j: &BigUint) -> i8 {
        self.difference(j, self.witness.k)
    }

    fn two_pow_n(&self) -> Result<u128> {
        if self.n >= 125 {
            return Err(Error::BudgetExceeded(format!(
                "j ranges for N = {} exceed 128-bit indices",
                self.n
            )));
        }
        Ok(1u128 << self.n)
    }

    /// Number of points of the shift-invariance range.
    fn shift_range_len(&self) -> Result<u128> {
        let p = self.two_pow_n()?;
        Ok(p + (p >> 3) + 1)
    }

    fn shift_index_to_j(&self, i: u128) -> u128 {
        let p = 1u128 << self.n;
        if i < p {
            i
        } else {
            p + 2 * (i - p)
        }
    }

    pub fn in_shift_range(&self, j: u128) -> bool {
        let p = 1u128 << self.n.min(126);
        j < p || (j >= p && (j - p) % 2 == 0 && (j - p) / 2 <= p >> 3)
    }

    fn select(&self, len: u128, sel: &JSelection, map: impl Fn(u128) -> u128) -> (Vec<u128>, bool, String) {
        match sel {
            JSelection::Auto { budget, seed } => {
                if len <= u128::from(*budget) {
                    ((0..len).map(&map).collect(), false, "full range".to_string())
                } else {
                    let idx = sample_plan(len - 1, *budget, *seed);
                    (
                        idx.into_iter().map(&map).collect(),
                        true,
                        format!("sample_plan(budget={budget}, seed={seed})"),
                    )
                }
            }
            JSelection::Explicit(js) => {
                let mut js = js.clone();
                js.sort_unstable();
                js.dedup();
                let full = u128::try_from(js.len()).unwrap_or(u128::MAX) == len;
                (js, !full, "explicit".to_string())
            }
        }
    }

    fn sweep(&self, js: &[u128], r: u32) -> Vec<u128> {
        let mut failed: Vec<u128> = js
            .par_iter()
            .filter(|&&j| self.difference(&BigUint::from(j), r) != 0)
            .copied()
            .collect();
        failed.sort_unstable();
        failed
    }

    /// Shift invariance at the full power over `{0..2^N-1} ∪ {2^N + 2h : h <= 2^(N-3)}`.
    pub fn shift_invariance(&self, sel: &JSelection) -> Result<LemmaReport> {
        let len = self.shift_range_len()?;
        if let JSelection::Explicit(js) = sel {
            if let Some(bad) = js.iter().find(|&&j| !self.in_shift_range(j)) {
                return invalid(format!("j = {bad} is outside the shift-invariance range"));
            }
        }
        let (js, sampled, plan) = self.select(len, sel, |i| self.shift_index_to_j(i));
        let failed = self.sweep(&js, self.witness.k);
        Ok(LemmaReport {
            k: self.witness.k,
            n: self.n,
            lemma: Lemma::ShiftInvariance,
            r: None,
            j_tested: js.len() as u64,
            j_failed: failed,
            sampled,
            seed_or_plan: plan,
            observed_sign: None,
            below_threshold: self.below_threshold(),
        })
    }

    /// The two points `2^N + 1` (must differ) and `2^N + 3` (must agree).
    /// A failing point is listed in `j_failed`.
    pub fn special_points(&self) -> LemmaReport {
        let p = BigUint::one() << self.n;
        let j1 = &p + 1u32;
        let j3 = &p + 3u32;
        let u1 = self.u_value(&j1);
        let u3 = self.u_value(&j3);
        let mut failed = Vec::new();
        let as_u128 = |v: &BigUint| u128::try_from(v).unwrap_or(u128::MAX);
        if u1.abs() != 1 {
            failed.push(as_u128(&j1));
        }
        if u3 != 0 {
            failed.push(as_u128(&j3));
        }
        LemmaReport {
            k: self.witness.k,
            n: self.n,
            lemma: Lemma::SpecialPoints,
            r: None,
            j_tested: 2,
            j_failed: failed,
            sampled: false,
            seed_or_plan: "j in {2^N+1, 2^N+3}".to_string(),
            observed_sign: Some(u1),
            below_threshold: self.below_threshold(),
        }
    }

    /// Invariance of `t((y2^(κ+δ) + j)^r)` for `1 <= r <= k-1`, `0 <= j <= 2^⌊λN⌋`.
    pub fn lower_powers(&self, r: u32, sel: &JSelection) -> Result<LemmaReport> {
        let k = self.witness.k;
        if r == 0 || r >= k {
            return invalid(format!("r must satisfy 1 <= r <= k-1 = {}, got {r}", k - 1));
        }
        let top = floor_lambda_n(k, self.n);
        if top >= 126 {
            return Err(Error::BudgetExceeded(format!("2^{top} exceeds 128-bit indices")));
        }
        let end = 1u128 << top;
        if let JSelection::Explicit(js) = sel {
            if let Some(bad) = js.iter().find(|&&j| j > end) {
                return invalid(format!("j = {bad} exceeds 2^floor(lambda N) = {end}"));
            }
        }
        let (js, sampled, plan) = self.select(end + 1, sel, |i| i);
        let failed = self.sweep(&js, r);
        Ok(LemmaReport {
            k,
            n: self.n,
            lemma: Lemma::LowerPowers,
            r: Some(r),
            j_tested: js.len() as u64,
            j_failed: failed,
            sampled,
            seed_or_plan: plan,
            observed_sign: None,
            below_threshold: self.below_threshold(),
        })
    }

    /// `A_(ℓ,j) = C(k,ℓ)·y^ℓ·j^(k-ℓ)` for `ℓ = 0..=k`.
    pub fn coefficient_terms(&self, j: &BigUint) -> Vec<BigUint> {
        let k = self.witness.k;
        let mut out = Vec::with_capacity(k as usize + 1);
        let mut binom = BigUint::one();
        for l in 0..=k {
            out.push(&binom * self.witness.y.pow(l) * j.pow(k - l));
            binom = binom * (k - l) / (l + 1);
        }
        out
    }

    /// Whether `A_(ℓ,j) < 2^κ(N)` for every `ℓ >= 1`.
    pub fn coefficient_terms_fit(&self, j: &BigUint) -> bool {
        let bound = BigUint::one() << self.kappa;
        self.coefficient_terms(j).iter().skip(1).all(|a| *a < bound)
    }

    /// `t(j^k) + t(z·j^(k-1)) + Σ_(ℓ>=2) t(A_(ℓ,j)) mod 2`, with `t(0) = 0`.
    pub fn congruence_shortcut(&self, j: &BigUint) -> u8 {
        let k = self.witness.k;
        let terms = self.coefficient_terms(j);
        let mut acc = j.pow(k).parity() ^ (&self.witness.z * j.pow(k - 1)).parity();
        for a in terms.iter().skip(2) {
            acc ^= a.parity();
        }
        acc
    }

    /// Direct `t((y2^(κ+δ) + j)^k)` for comparison with the shortcut.
    pub fn direct_value(&self, delta: u8, j: &BigUint) -> u8 {
        self.t_shifted(delta, j, self.witness.k)
    }
}

/// `u(j)` for a witness and `N` (any `N >= 1`).
pub fn u_value(w: &CongruenceWitness, n: u64, j: &BigUint) -> Result<i8> {
    Ok(LemmaLab::unchecked(w, n)?.u_value(j))
}

pub fn verify_shift_invariance(w: &CongruenceWitness, n: u64, sel: &JSelection) -> Result<LemmaReport> {
    LemmaLab::new(w, n)?.shift_invariance(sel)
}

pub fn verify_special_j(w: &CongruenceWitness, n: u64) -> Result<LemmaReport> {
    Ok(LemmaLab::new(w, n)?.special_points())
}

pub fn verify_lower_powers(w: &CongruenceWitness, n: u64, r: u32, sel: &JSelection) -> Result<LemmaReport> {
    LemmaLab::new(w, n)?.lower_powers(r, sel)
}
