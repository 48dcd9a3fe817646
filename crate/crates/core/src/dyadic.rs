//! Exact dyadic rationals `mant · 2^exp`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// `mant · 2^exp`, normalized so that `mant` is odd (or zero with `exp = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Dyadic { mant, exp: 0 };
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        Dyadic {
            mant: mant >> tz,
            exp: exp + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v.into(), 0)
    }

    pub fn pow2(e: i64) -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: e,
        }
    }

    /// Exact value of a finite `f64`.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Dyadic::new(BigInt::from(m) * sign, e))
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// Significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `e` with `2^e <= |x| < 2^(e+1)`; `None` for zero.
    pub fn msb(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.mant.bits() as i64 - 1)
        }
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0 || self.is_zero()
    }

    /// `±2^e` exactly.
    pub fn is_power_of_two(&self) -> bool {
        self.mant.abs().is_one()
    }

    pub fn mul_pow2(&self, e: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + e,
        }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        (
            &self.mant << (self.exp - e) as u64,
            &other.mant << (other.exp - e) as u64,
            e,
        )
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            // arithmetic shift rounds toward negative infinity
            &self.mant >> (-self.exp) as u64
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Rounds to at most `bits` significant bits in the given direction.
    pub fn round(&self, bits: u64, dir: Round) -> Self {
        let bits = bits.max(1);
        let len = self.mant.bits();
        if len <= bits {
            return self.clone();
        }
        let shift = len - bits;
        let mut q = &self.mant >> shift;
        if dir == Round::Up && (&q << shift) != self.mant {
            q += 1;
        }
        Dyadic::new(q, self.exp + shift as i64)
    }

    /// `a / b` rounded to about `bits` significant bits.
    pub fn div_round(a: &Self, b: &Self, bits: u64, dir: Round) -> Self {
        assert!(!b.is_zero(), "division by zero");
        if a.is_zero() {
            return Dyadic::zero();
        }
        let s = bits as i64 + 2 + b.mant.bits() as i64 - a.mant.bits() as i64;
        let (num, den) = if s >= 0 {
            (&a.mant << s as u64, b.mant.clone())
        } else {
            (a.mant.clone(), &b.mant << (-s) as u64)
        };
        let (mut q, r) = num.div_mod_floor(&den);
        if dir == Round::Up && !r.is_zero() {
            q += 1;
        }
        Dyadic::new(q, a.exp - b.exp - s)
    }

    /// Square root of a non-negative value, rounded to about `bits` bits.
    pub fn sqrt_round(&self, bits: u64, dir: Round) -> Self {
        assert!(!self.is_negative(), "square root of a negative value");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let want = 2 * bits as i64 + 4;
        let mut t = (want - self.mant.bits() as i64).max(0);
        if (self.exp - t).rem_euclid(2) != 0 {
            t += 1;
        }
        let scaled = &self.mant << t as u64;
        let mut r = scaled.sqrt();
        if dir == Round::Up && &r * &r != scaled {
            r += 1;
        }
        Dyadic::new(r, (self.exp - t) / 2)
    }

    /// Nearest `f64` (saturating to 0 or infinity).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let len = self.mant.bits();
        let shift = len.saturating_sub(60);
        let top = (&self.mant >> shift).to_f64().unwrap_or(0.0);
        let e = self.exp + shift as i64;
        if e > 2000 {
            return top.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        let half = (e / 2) as i32;
        top * 2f64.powi(half) * 2f64.powi(e as i32 - half)
    }

    /// `log2 |x|` as an approximation valid for any exponent range.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let len = self.mant.bits();
        let shift = len.saturating_sub(60);
        let top = (self.mant.abs() >> shift).to_f64().unwrap_or(1.0);
        top.log2() + (self.exp + shift as i64) as f64
    }

    /// Scientific decimal rendering with `sig` significant digits, rounded
    /// in the given direction (of the signed value).
    pub fn to_sci(&self, sig: usize, dir: Round) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let sig = sig.max(1) as i64;
        let dec = (self.log2_abs() * std::f64::consts::LOG10_2).floor() as i64;
        let scale = sig - 1 - dec;
        // value · 10^scale as an exact fraction num / den
        let ten = BigInt::from(10u32);
        let mut num = self.mant.clone();
        let mut den = BigInt::one();
        if scale >= 0 {
            num *= ten.pow(scale as u32);
        } else {
            den *= ten.pow((-scale) as u32);
        }
        if self.exp >= 0 {
            num <<= self.exp as u64;
        } else {
            den <<= (-self.exp) as u64;
        }
        let (mut q, r) = num.div_mod_floor(&den);
        if dir == Round::Up && !r.is_zero() {
            q += 1;
        }
        let neg = q.is_negative();
        let digits = q.abs().to_string();
        let exp10 = digits.len() as i64 - 1 - scale;
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(digits[1..].trim_end_matches('0'));
            if out.ends_with('.') {
                out.pop();
            }
        }
        if exp10 != 0 {
            out.push_str(&format!("e{exp10}"));
        }
        out
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.mant)
        } else {
            write!(f, "{}*2^{}", self.mant, self.exp)
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (s, o) = (self.signum(), other.signum());
        if s != o {
            return s.cmp(&o);
        }
        if s == 0 {
            return Ordering::Equal;
        }
        // same sign: compare magnitudes by leading bit before aligning
        let (ms, mo) = (self.msb().unwrap(), other.msb().unwrap());
        if ms != mo {
            let mag = ms.cmp(&mo);
            return if s > 0 { mag } else { mag.reverse() };
        }
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: &self.mant * &rhs.mant,
            exp: self.exp + rhs.exp,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn normalization_and_arith() {
        assert_eq!(d(12, 0), d(3, 2));
        assert_eq!(&d(3, -1) + &d(1, -1), d(2, 0));
        assert_eq!(&d(3, -1) * &d(2, 0), d(3, 0));
        assert_eq!(&d(1, 0) - &d(1, -2), d(3, -2));
        assert!(d(-1, 5) < d(1, -5));
        assert!(d(3, -1) > d(1, 0));
    }

    #[test]
    fn rounding_directions() {
        let x = d(0b1011011, 0);
        assert_eq!(x.round(3, Round::Down), d(0b101, 4));
        assert_eq!(x.round(3, Round::Up), d(0b110, 4));
        let y = d(-0b1011011, 0);
        assert_eq!(y.round(3, Round::Down), d(-0b110, 4));
        assert_eq!(d(7, -1).floor(), BigInt::from(3));
        assert_eq!(d(-7, -1).floor(), BigInt::from(-4));
        assert_eq!(d(-7, -1).ceil(), BigInt::from(-3));
    }

    #[test]
    fn division_brackets_quotient() {
        let a = d(1, 0);
        let b = d(3, 0);
        let lo = Dyadic::div_round(&a, &b, 64, Round::Down);
        let hi = Dyadic::div_round(&a, &b, 64, Round::Up);
        assert!(&lo * &b <= a && &hi * &b >= a);
        assert!(&hi - &lo <= Dyadic::pow2(-64));
    }

    #[test]
    fn sqrt_brackets_root() {
        let two = d(2, 0);
        let lo = two.sqrt_round(80, Round::Down);
        let hi = two.sqrt_round(80, Round::Up);
        assert!(&lo * &lo <= two && &hi * &hi >= two);
        assert!((lo.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(d(9, -2).sqrt_round(10, Round::Up), d(3, -1));
    }

    #[test]
    fn f64_round_trip() {
        for x in [0.1, -3.75, 1e-300, 6.02e23] {
            assert_eq!(Dyadic::from_f64(x).unwrap().to_f64(), x);
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(d(1, -1).to_sci(5, Round::Down), "5e-1");
        assert_eq!(d(1, 0).to_sci(5, Round::Down), "1");
        let third = Dyadic::div_round(&d(1, 0), &d(3, 0), 100, Round::Down);
        assert_eq!(third.to_sci(6, Round::Down), "3.33333e-1");
        assert_eq!(third.to_sci(6, Round::Up), "3.33334e-1");
        assert_eq!(d(-3, 3).to_sci(4, Round::Down), "-2.4e1");
    }
}
