//! Factor complexity, block frequencies and cube detection for `t(n^k)`.

mod affine;
mod cube;

use rayon::prelude::*;
use serde::Serialize;

pub use affine::{affine_complexity_compare, AffineReport, AffineRow};
pub use cube::{cube_free_check, find_cube, Cube};

use crate::error::{invalid, Result};
use crate::serde_util::display;
use crate::tm::{tm_word, BinaryWord};

/// Windows with at most this many possible values are counted in a bitset.
const BITSET_LIMIT: u64 = 1 << 26;
const CHUNK: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComplexityRow {
    #[serde(serialize_with = "display")]
    pub m: usize,
    #[serde(serialize_with = "display")]
    pub count: u64,
    /// `min(b^m, len − m + 1)`.
    #[serde(serialize_with = "display")]
    pub bound: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComplexityReport {
    pub rows: Vec<ComplexityRow>,
    #[serde(serialize_with = "display")]
    pub prefix_len: usize,
    #[serde(serialize_with = "display")]
    pub alphabet: u32,
    /// `ln p(m) / m` at the largest `m`.
    #[serde(serialize_with = "display")]
    pub entropy_estimate: f64,
    pub bounds_hold: bool,
    /// `p(m+1) ≥ p(m)` wherever the prefix has length at least `2^{m+2}`.
    pub monotone_where_checked: bool,
}

impl ComplexityReport {
    pub fn counts(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.count).collect()
    }
}

fn window_bits(alphabet: u32) -> u32 {
    32 - (alphabet - 1).leading_zeros()
}

/// Number of distinct length-`m` factors, with letters below `alphabet`.
pub fn count_factors(word: &[u8], alphabet: u32, m: usize) -> u64 {
    if m == 0 {
        return 1;
    }
    if word.len() < m {
        return 0;
    }
    let b = u64::from(alphabet);
    let space = b.checked_pow(m as u32);
    let code = |w: &[u8]| w.iter().fold(0u64, |acc, &x| acc * b + u64::from(x));
    match space.filter(|&s| s <= BITSET_LIMIT) {
        Some(space) => {
            let words = (space as usize).div_ceil(64);
            let starts = word.len() - m + 1;
            let bits = (0..starts)
                .into_par_iter()
                .step_by(CHUNK)
                .map(|s| {
                    let mut set = vec![0u64; words];
                    let end = (s + CHUNK).min(starts);
                    let mut c = code(&word[s..s + m]);
                    let top = space / b;
                    for i in s..end {
                        if i > s {
                            c = (c % top) * b + u64::from(word[i + m - 1]);
                        }
                        set[(c / 64) as usize] |= 1 << (c % 64);
                    }
                    set
                })
                .reduce(
                    || vec![0u64; words],
                    |mut a, b| {
                        a.iter_mut().zip(&b).for_each(|(x, y)| *x |= y);
                        a
                    },
                );
            bits.iter().map(|w| u64::from(w.count_ones())).sum()
        }
        None => {
            assert!(
                m as u32 * window_bits(alphabet) <= 128,
                "window of {m} letters does not fit 128 bits"
            );
            let shift = window_bits(alphabet);
            let mut codes: Vec<u128> = word
                .par_windows(m)
                .map(|w| w.iter().fold(0u128, |acc, &x| (acc << shift) | u128::from(x)))
                .collect();
            codes.par_sort_unstable();
            codes.dedup();
            codes.len() as u64
        }
    }
}

/// `p(m)` for `m = 1..=m_max` over an alphabet of the given size.
pub fn complexity_profile(word: &[u8], alphabet: u32, m_max: usize) -> Result<ComplexityReport> {
    if alphabet < 2 {
        return invalid("alphabet must have at least two letters");
    }
    if m_max == 0 || m_max > word.len() {
        return invalid(format!("m_max must lie in 1..={}", word.len()));
    }
    if word.iter().any(|&x| u32::from(x) >= alphabet) {
        return invalid("letter outside the alphabet");
    }
    let len = word.len();
    let rows: Vec<ComplexityRow> = (1..=m_max)
        .map(|m| ComplexityRow {
            m,
            count: count_factors(word, alphabet, m),
            bound: u64::from(alphabet)
                .checked_pow(m as u32)
                .unwrap_or(u64::MAX)
                .min((len - m + 1) as u64),
        })
        .collect();
    let bounds_hold = rows.iter().all(|r| r.count <= r.bound);
    let monotone_where_checked = rows.windows(2).all(|w| {
        let checked = w[0].m + 2 < 64 && len as u64 >= 1u64 << (w[0].m + 2);
        !checked || w[1].count >= w[0].count
    });
    let last = rows.last().expect("m_max >= 1");
    Ok(ComplexityReport {
        entropy_estimate: (last.count as f64).ln() / last.m as f64,
        rows,
        prefix_len: len,
        alphabet,
        bounds_hold,
        monotone_where_checked,
    })
}

/// Binary complexity of a word.
pub fn subword_complexity(word: &BinaryWord, m_max: usize) -> Result<ComplexityReport> {
    complexity_profile(&word.bits, 2, m_max)
}

/// `t(1^k) t(2^k) ⋯ t(L^k)`.
pub fn tm_prefix(k: u32, prefix_len: usize) -> Result<BinaryWord> {
    tm_word(1, prefix_len, k)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MosheRow {
    #[serde(serialize_with = "display")]
    pub m: usize,
    #[serde(serialize_with = "display")]
    pub count: u64,
    /// `⌈2^{m/2^{k−2}}⌉`.
    #[serde(serialize_with = "display")]
    pub bound: u64,
    #[serde(serialize_with = "display")]
    pub margin: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MosheReport {
    #[serde(serialize_with = "display")]
    pub k: u32,
    #[serde(serialize_with = "display")]
    pub prefix_len: usize,
    pub rows: Vec<MosheRow>,
    /// For `k = 2` the bound is `2^m`: every binary word occurs.
    pub all_words_check: bool,
    pub passed: bool,
}

/// Least `c` with `c^{2^{k−2}} ≥ 2^m`.
pub fn moshe_bound(k: u32, m: usize) -> u64 {
    assert!(k >= 2);
    if k - 2 >= 32 {
        return if m == 0 { 1 } else { 2 };
    }
    let e = 1u32 << (k - 2);
    if e == 1 {
        return 1u64 << m;
    }
    let target = num_bigint::BigUint::from(1u8) << m;
    let mut c = (2f64.powf(m as f64 / f64::from(e)).floor() as u64).max(1);
    while c > 1 && num_bigint::BigUint::from(c - 1).pow(e) >= target {
        c -= 1;
    }
    while num_bigint::BigUint::from(c).pow(e) < target {
        c += 1;
    }
    c
}

pub fn moshe_check(k: u32, m_max: usize, prefix_len: usize) -> Result<MosheReport> {
    if k < 2 {
        return invalid("Moshe's bound needs k >= 2");
    }
    if m_max > 62 {
        return invalid("m_max must be at most 62");
    }
    let word = tm_prefix(k, prefix_len)?;
    let prof = subword_complexity(&word, m_max)?;
    let rows: Vec<MosheRow> = prof
        .rows
        .iter()
        .map(|r| {
            let bound = moshe_bound(k, r.m);
            MosheRow {
                m: r.m,
                count: r.count,
                bound,
                margin: r.count as i64 - bound as i64,
            }
        })
        .collect();
    let passed = rows.iter().all(|r| r.margin >= 0);
    Ok(MosheReport {
        k,
        prefix_len,
        all_words_check: k == 2,
        rows,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FrequencyTable {
    #[serde(serialize_with = "display")]
    pub k: u32,
    #[serde(serialize_with = "display")]
    pub m: usize,
    #[serde(serialize_with = "display")]
    pub prefix_len: usize,
    /// Number of overlapping windows, `L − m + 1`.
    #[serde(serialize_with = "display")]
    pub windows: u64,
    /// Count of each block, indexed by its binary value (first letter most significant).
    #[serde(serialize_with = "crate::serde_util::display_seq")]
    pub counts: Vec<u64>,
    /// `max |c/W − 2^{−m}| / 2^{−m}`.
    #[serde(serialize_with = "display")]
    pub max_deviation: f64,
    #[serde(serialize_with = "display")]
    pub missing: u64,
}

impl FrequencyTable {
    pub fn frequency(&self, block: usize) -> f64 {
        self.counts[block] as f64 / self.windows as f64
    }
}

/// Overlapping-window block counts of `t(n^k)`, `1 ≤ n ≤ L`.
pub fn block_frequencies(k: u32, m: usize, prefix_len: usize) -> Result<FrequencyTable> {
    if m == 0 || m > 16 {
        return invalid("block length must lie in 1..=16");
    }
    if prefix_len < m {
        return invalid("prefix shorter than the block length");
    }
    let word = tm_prefix(k, prefix_len)?;
    let counts = block_counts(&word.bits, m);
    let windows = (prefix_len - m + 1) as u64;
    let expect = windows as f64 / (1u64 << m) as f64;
    let max_deviation = counts
        .iter()
        .map(|&c| (c as f64 - expect).abs() / expect)
        .fold(0.0, f64::max);
    Ok(FrequencyTable {
        k,
        m,
        prefix_len,
        windows,
        missing: counts.iter().filter(|&&c| c == 0).count() as u64,
        counts,
        max_deviation,
    })
}

fn block_counts(bits: &[u8], m: usize) -> Vec<u64> {
    let size = 1usize << m;
    let mask = size - 1;
    let starts = bits.len() - m + 1;
    (0..starts)
        .into_par_iter()
        .step_by(CHUNK)
        .map(|s| {
            let mut counts = vec![0u64; size];
            let mut c = bits[s..s + m].iter().fold(0usize, |a, &x| (a << 1) | x as usize);
            let end = (s + CHUNK).min(starts);
            for i in s..end {
                if i > s {
                    c = ((c << 1) & mask) | bits[i + m - 1] as usize;
                }
                counts[c] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

#[cfg(test)]
mod tests;
