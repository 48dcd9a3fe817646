use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::serde_util::display;
use crate::tm::tm_word;

const MOD: u64 = (1 << 61) - 1;

/// A factor `aaa` with `|a| = period` starting at `start` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cube {
    #[serde(serialize_with = "display")]
    pub start: usize,
    #[serde(serialize_with = "display")]
    pub period: usize,
}

fn mulmod(a: u64, b: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(MOD)) as u64
}

/// Prefix hashes for constant-time substring comparison.
struct Hashes {
    h: Vec<u64>,
    pw: Vec<u64>,
}

impl Hashes {
    fn new(w: &[u8]) -> Self {
        let base = ChaCha8Rng::seed_from_u64(0x7e57).gen_range(256..MOD - 1);
        let mut h = Vec::with_capacity(w.len() + 1);
        let mut pw = Vec::with_capacity(w.len() + 1);
        h.push(0);
        pw.push(1);
        for (i, &c) in w.iter().enumerate() {
            h.push((mulmod(h[i], base) + u64::from(c) + 1) % MOD);
            pw.push(mulmod(pw[i], base));
        }
        Hashes { h, pw }
    }

    fn get(&self, a: usize, len: usize) -> u64 {
        (self.h[a + len] + MOD - mulmod(self.h[a], self.pw[len])) % MOD
    }

    fn eq(&self, a: usize, b: usize, len: usize) -> bool {
        self.get(a, len) == self.get(b, len)
    }
}

/// Longest `l ≤ cap` with `w[a..a+l] = w[b..b+l]` (by hash; may overshoot).
fn lce_fwd(hs: &Hashes, a: usize, b: usize, cap: usize) -> usize {
    let (mut lo, mut hi) = (0, cap);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if hs.eq(a, b, mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Longest `l ≤ cap` with `w[a−l..a] = w[b−l..b]`.
fn lce_bwd(hs: &Hashes, a: usize, b: usize, cap: usize) -> usize {
    let (mut lo, mut hi) = (0, cap);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if hs.eq(a - mid, b - mid, mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

fn run_exact(w: &[u8], i: usize, p: usize) -> (usize, usize) {
    let mut s = i;
    while s > 0 && w[s - 1] == w[s - 1 + p] {
        s -= 1;
    }
    let mut e = i;
    while e + p < w.len() && w[e] == w[e + p] {
        e += 1;
    }
    (s, e)
}

fn cube_with_period(w: &[u8], hs: &Hashes, p: usize) -> Option<Cube> {
    let n = w.len();
    let mut j = 0;
    // any run of 2p positions i with w[i] = w[i+p] contains a multiple of p
    while j + p < n {
        let f = lce_fwd(hs, j, j + p, (n - j - p).min(2 * p));
        let b = lce_bwd(hs, j, j + p, j.min(2 * p));
        if f + b >= 2 * p {
            let (s, e) = run_exact(w, j, p);
            if e - s >= 2 * p {
                return Some(Cube { start: s, period: p });
            }
        }
        j += p;
    }
    None
}

/// Leftmost-period cube `aaa` in the word, if any.
pub fn find_cube(w: &[u8]) -> Option<Cube> {
    if w.len() < 3 {
        return None;
    }
    let hs = Hashes::new(w);
    (1..=w.len() / 3)
        .into_par_iter()
        .filter_map(|p| cube_with_period(w, &hs, p))
        .min_by_key(|c| (c.period, c.start))
}

/// No factor `aaa` in `t(1) ⋯ t(L)`.
pub fn cube_free_check(prefix_len: usize) -> Result<bool> {
    if prefix_len < 3 {
        return invalid("prefix length must be at least 3");
    }
    let w = tm_word(1, prefix_len, 1)?;
    Ok(find_cube(&w.bits).is_none())
}
