//! Bit-count kernels shared by every integer width the crate evaluates.
//!
//! The Thue–Morse value only needs the parity of the digit sum, so each
//! implementation folds limbs with XOR before a single hardware popcount.

use num_bigint::BigUint;
use num_traits::{PrimInt, Unsigned};

/// Unsigned integers whose binary digit sum can be taken cheaply.
pub trait BitCount {
    fn popcount(&self) -> u64;

    fn parity(&self) -> u8 {
        (self.popcount() & 1) as u8
    }

    fn is_zero_value(&self) -> bool;
}

macro_rules! prim_bitcount {
    ($($t:ty),*) => {$(
        impl BitCount for $t {
            #[inline]
            fn popcount(&self) -> u64 {
                u64::from(self.count_ones())
            }

            #[inline]
            fn is_zero_value(&self) -> bool {
                *self == 0
            }
        }
    )*};
}

prim_bitcount!(u8, u16, u32, u64, u128, usize);

impl BitCount for BigUint {
    fn popcount(&self) -> u64 {
        self.iter_u64_digits().map(|d| u64::from(d.count_ones())).sum()
    }

    #[inline]
    fn parity(&self) -> u8 {
        let folded = self.iter_u64_digits().fold(0u64, |acc, d| acc ^ d);
        (folded.count_ones() & 1) as u8
    }

    fn is_zero_value(&self) -> bool {
        self.bits() == 0
    }
}

/// Exact power of a primitive unsigned integer, `None` on overflow.
pub fn checked_pow<T: PrimInt + Unsigned>(base: T, exp: u32) -> Option<T> {
    let mut acc = T::one();
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.checked_mul(&b)?;
        }
        e >>= 1;
        if e > 0 {
            b = b.checked_mul(&b)?;
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_matches_count_for_bigints() {
        let n = BigUint::parse_bytes(b"123456789012345678901234567890123456789", 10).unwrap();
        assert_eq!(n.parity() as u64, n.popcount() & 1);
        assert_eq!(n.popcount(), n.count_ones());
    }

    #[test]
    fn checked_pow_overflow() {
        assert_eq!(checked_pow(3u64, 4), Some(81));
        assert_eq!(checked_pow(2u64, 64), None);
        assert_eq!(checked_pow(2u128, 127), Some(1u128 << 127));
        assert_eq!(checked_pow(0u64, 0), Some(1));
    }
}
