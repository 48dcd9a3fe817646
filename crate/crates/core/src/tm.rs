//! The Thue–Morse function on arbitrary-precision integers.
//!
//! Positions start at `n = 1`; `t(0)` is rejected rather than defined.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{checked_pow, BitCount};
use crate::error::{invalid, Result};

/// A finite 0/1 word together with the sequence index of its first letter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryWord {
    pub bits: Vec<u8>,
    pub offset: u64,
}

impl BinaryWord {
    pub fn new(bits: Vec<u8>, offset: u64) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return invalid("binary word letters must be 0 or 1");
        }
        Ok(BinaryWord { bits, offset })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Number of one-bits in the binary expansion of `n`.
pub fn s2<T: BitCount>(n: &T) -> u64 {
    n.popcount()
}

/// `t(n) = s2(n) mod 2` for `n >= 1`.
pub fn tm<T: BitCount>(n: &T) -> Result<u8> {
    if n.is_zero_value() {
        return invalid("Thue-Morse positions start at n = 1");
    }
    Ok(n.parity())
}

/// `t(n^k)`, evaluated with exact exponentiation.
pub fn tm_pow(n: &BigUint, k: u32) -> Result<u8> {
    if k == 0 {
        return invalid("exponent k must be at least 1");
    }
    if n.bits() == 0 {
        return invalid("Thue-Morse positions start at n = 1");
    }
    Ok(parity_of_power(n, k))
}

/// Parity of `s2(n^k)` with a `u128` fast path when the power fits.
pub(crate) fn parity_of_power(n: &BigUint, k: u32) -> u8 {
    if let Some(small) = n.to_u128() {
        if let Some(p) = checked_pow(small, k) {
            return p.parity();
        }
    }
    n.pow(k).parity()
}

#[inline]
fn parity_of_small_power(n: u64, k: u32) -> u8 {
    match checked_pow(u128::from(n), k) {
        Some(p) => p.parity(),
        None => BigUint::from(n).pow(k).parity(),
    }
}

const CHUNK: usize = 1 << 14;

/// The word `t(start^k), t((start+1)^k), ..., t((start+length-1)^k)`.
pub fn tm_word(start: u64, length: usize, k: u32) -> Result<BinaryWord> {
    if start == 0 {
        return invalid("Thue-Morse positions start at n = 1");
    }
    if k == 0 {
        return invalid("exponent k must be at least 1");
    }
    if length > 0 && start.checked_add(length as u64 - 1).is_none() {
        return invalid("word end position overflows u64");
    }
    let mut bits = vec![0u8; length];
    bits.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let first = start + (c * CHUNK) as u64;
        for (i, b) in chunk.iter_mut().enumerate() {
            *b = parity_of_small_power(first + i as u64, k);
        }
    });
    Ok(BinaryWord {
        bits,
        offset: start,
    })
}

/// `t(n)` for `n` given as a machine integer, with `t(0)` rejected.
pub fn tm_u64(n: u64) -> Result<u8> {
    tm(&n)
}
