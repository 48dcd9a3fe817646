//! Midpoint–radius ("ball") arithmetic over dyadic rationals.
//!
//! A [`Ball`] encloses a real number in `[mid - rad, mid + rad]`. Every
//! operation returns a ball that encloses all results of the operation on
//! enclosed inputs. A working precision of `0` means exact: midpoints are
//! never rounded, so integer and dyadic computations stay bit-exact.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::dyadic::{Dyadic, Round};

/// Mantissa bits kept for radii (always rounded up).
const RAD_BITS: u64 = 32;
/// Precision used for inexact operations on exact balls.
pub const FALLBACK_PREC: u64 = 128;
const EXACT_PRINT_BITS: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    mid: Dyadic,
    rad: Dyadic,
    prec: u64,
}

/// Decimal `(center, radius)` pair; the decimal ball encloses the dyadic one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallRecord {
    pub center: String,
    pub radius: String,
    /// Exact dyadic form of the center when the ball has zero radius and the
    /// mantissa is short enough to print.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl Ball {
    pub fn exact(mid: Dyadic) -> Self {
        Ball {
            mid,
            rad: Dyadic::zero(),
            prec: 0,
        }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Ball::exact(Dyadic::from_int(v))
    }

    pub fn new(mid: Dyadic, rad: Dyadic, prec: u64) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        Ball::finish(mid, rad, prec)
    }

    /// The ball `[lo, hi]`.
    pub fn from_bounds(lo: &Dyadic, hi: &Dyadic, prec: u64) -> Self {
        let mid = (lo + hi).mul_pow2(-1);
        let rad = (hi - lo).mul_pow2(-1);
        Ball::finish(mid, rad, prec)
    }

    pub fn zero() -> Self {
        Ball::exact(Dyadic::zero())
    }

    pub fn one() -> Self {
        Ball::exact(Dyadic::one())
    }

    pub fn with_prec(mut self, prec: u64) -> Self {
        self.prec = prec;
        Ball::finish(self.mid, self.rad, prec)
    }

    fn finish(mid: Dyadic, rad: Dyadic, prec: u64) -> Self {
        let mut rad = rad;
        let mid = if prec > 0 && mid.bits() > prec {
            let r = mid.round(prec, Round::Down);
            rad = &rad + &(&mid - &r);
            r
        } else {
            mid
        };
        Ball {
            mid,
            rad: rad.round(RAD_BITS, Round::Up),
            prec,
        }
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn prec(&self) -> u64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn lower(&self) -> Dyadic {
        &self.mid - &self.rad_for_bounds()
    }

    /// The radius, or a coarser bound on it when it is negligible against the
    /// midpoint so that endpoints stay short.
    fn rad_for_bounds(&self) -> Dyadic {
        let bits = self.prec.max(64) + 64;
        if negligible(&self.mid, &self.rad, bits) {
            Dyadic::pow2(self.mid.msb().expect("nonzero") - bits as i64)
        } else {
            self.rad.clone()
        }
    }

    pub fn upper(&self) -> Dyadic {
        &self.mid + &self.rad_for_bounds()
    }

    pub fn is_positive(&self) -> bool {
        self.lower().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.upper().is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.lower() <= *x && *x <= self.upper()
    }

    pub fn overlaps(&self, other: &Ball) -> bool {
        let d = self - other;
        d.mid.abs() <= d.rad
    }

    /// Certified comparison; `None` if the balls overlap.
    pub fn certified_cmp(&self, other: &Ball) -> Option<Ordering> {
        if self.upper() < other.lower() {
            Some(Ordering::Less)
        } else if self.lower() > other.upper() {
            Some(Ordering::Greater)
        } else if self.is_exact() && other.is_exact() && self.mid == other.mid {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Upper bound of `|x|` (radius precision).
    pub fn abs_upper(&self) -> Dyadic {
        (&self.mid.abs() + &self.rad_for_bounds()).round(RAD_BITS, Round::Up)
    }

    /// Lower bound of `|x|`, zero when the ball contains zero.
    pub fn abs_lower(&self) -> Dyadic {
        let lo = &self.mid.abs() - &self.rad_for_bounds();
        if lo.is_positive() {
            lo.round(RAD_BITS, Round::Down)
        } else {
            Dyadic::zero()
        }
    }

    pub fn abs(&self) -> Ball {
        if self.is_positive() {
            self.clone()
        } else if self.is_negative() {
            -self
        } else {
            let hi = self.abs_upper();
            Ball::from_bounds(&Dyadic::zero(), &hi, self.prec)
        }
    }

    /// `floor(x)` when it is the same for every enclosed value.
    pub fn floor_certain(&self) -> Option<BigInt> {
        let lo = self.lower().floor();
        let hi = self.upper().floor();
        (lo == hi).then_some(lo)
    }

    fn op_prec(&self, other: &Ball) -> u64 {
        self.prec.max(other.prec)
    }

    fn div_prec(&self) -> u64 {
        if self.prec == 0 {
            FALLBACK_PREC
        } else {
            self.prec
        }
    }

    pub fn scale_int(&self, c: &BigInt) -> Ball {
        let c = Dyadic::from_int(c.clone());
        Ball::finish(&self.mid * &c, &self.rad * &c.abs(), self.prec)
    }

    pub fn mul_pow2(&self, e: i64) -> Ball {
        Ball {
            mid: self.mid.mul_pow2(e),
            rad: self.rad.mul_pow2(e),
            prec: self.prec,
        }
    }

    /// `1/x`; `None` if the ball contains zero.
    pub fn recip(&self) -> Option<Ball> {
        if self.contains_zero() {
            return None;
        }
        if self.is_exact() && self.mid.is_power_of_two() {
            let sign = self.mid.signum();
            let m = Dyadic::pow2(-self.mid.exp());
            return Some(Ball::exact(if sign < 0 { -m } else { m }).with_prec(self.prec));
        }
        let p = self.div_prec();
        let one = Dyadic::one();
        let q = Dyadic::div_round(&one, &self.mid, p + 2, Round::Down);
        let q_hi = Dyadic::div_round(&one, &self.mid, p + 2, Round::Up);
        let mut rad = &q_hi - &q;
        if !self.rad.is_zero() {
            // |1/x - 1/m| <= r / (|m| (|m| - r))
            let m = self.mid.abs();
            let r = self.rad_for_bounds();
            let gap = (&m - &r).round(RAD_BITS, Round::Down);
            let den = (&m.round(RAD_BITS, Round::Down) * &gap).round(RAD_BITS, Round::Down);
            rad = add_up(&rad, &Dyadic::div_round(&r, &den, RAD_BITS, Round::Up));
        }
        Some(Ball::finish(q, rad, p))
    }

    pub fn div(&self, other: &Ball) -> Option<Ball> {
        if other.is_exact() && self.is_exact() && other.mid.is_power_of_two() {
            return Some(self * &other.recip()?);
        }
        let inv = other.with_prec_at_least(self.prec).recip()?;
        Some(self * &inv)
    }

    fn with_prec_at_least(&self, p: u64) -> Ball {
        if self.prec >= p {
            self.clone()
        } else {
            Ball {
                prec: p,
                ..self.clone()
            }
        }
    }

    pub fn sqr(&self) -> Ball {
        self * self
    }

    pub fn pow(&self, mut e: u64) -> Ball {
        let mut acc = Ball::one().with_prec(self.prec);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = b.sqr();
            }
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Decimal record with `sig` significant digits in the center; the
    /// radius absorbs the conversion error.
    pub fn to_record(&self, sig: usize) -> BallRecord {
        let c_lo = self.mid.to_sci(sig, Round::Down);
        let c_hi = self.mid.to_sci(sig, Round::Up);
        let conv = if c_lo == c_hi {
            Dyadic::zero()
        } else {
            // one unit in the last printed place bounds the error
            let ulp_exp = self.mid.log2_abs() - (sig as f64 - 1.0) * std::f64::consts::LOG2_10;
            Dyadic::pow2(ulp_exp.ceil() as i64 + 1)
        };
        let rad = &self.rad + &conv;
        BallRecord {
            center: c_lo,
            radius: rad.to_sci(4, Round::Up),
            exact: (self.rad.is_zero() && self.mid.bits() <= EXACT_PRINT_BITS)
                .then(|| self.mid.to_string()),
        }
    }
}

/// Gap in binary orders beyond which the smaller operand is not aligned.
fn negligible(a: &Dyadic, b: &Dyadic, bits: u64) -> bool {
    match (a.msb(), b.msb()) {
        (Some(x), Some(y)) => x - y > bits as i64 + 8,
        _ => false,
    }
}

/// Upper bound of `a + b` for `a, b >= 0`.
fn add_up(a: &Dyadic, b: &Dyadic) -> Dyadic {
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if negligible(big, small, RAD_BITS) {
        let ulp = Dyadic::pow2(big.msb().expect("nonzero") - RAD_BITS as i64);
        big + &ulp
    } else {
        big + small
    }
}

/// `a ± b` with the radius it adds; operands far below `prec` go to the radius.
fn add_mid(a: &Dyadic, b: &Dyadic, prec: u64) -> (Dyadic, Dyadic) {
    if prec > 0 {
        if negligible(a, b, prec) {
            return (a.clone(), b.abs());
        }
        if negligible(b, a, prec) {
            return (b.clone(), a.abs());
        }
    }
    (a + b, Dyadic::zero())
}

impl Add for &Ball {
    type Output = Ball;
    fn add(self, rhs: &Ball) -> Ball {
        let prec = self.op_prec(rhs);
        let (mid, extra) = add_mid(&self.mid, &rhs.mid, prec);
        Ball::finish(mid, add_up(&add_up(&self.rad, &rhs.rad), &extra), prec)
    }
}

impl Sub for &Ball {
    type Output = Ball;
    fn sub(self, rhs: &Ball) -> Ball {
        self + &(-rhs)
    }
}

impl Mul for &Ball {
    type Output = Ball;
    fn mul(self, rhs: &Ball) -> Ball {
        let mid = &self.mid * &rhs.mid;
        let rad = if self.rad.is_zero() && rhs.rad.is_zero() {
            Dyadic::zero()
        } else {
            let a = self.mid.abs().round(RAD_BITS, Round::Up);
            let b = rhs.mid.abs().round(RAD_BITS, Round::Up);
            add_up(&add_up(&(&a * &rhs.rad), &(&b * &self.rad)), &(&self.rad * &rhs.rad))
        };
        Ball::finish(mid, rad, self.op_prec(rhs))
    }
}

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball {
            mid: -&self.mid,
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        -&self
    }
}

macro_rules! owned_ball_ops {
    ($t:ty: $($tr:ident $m:ident),*) => {$(
        impl $tr for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
    )*};
}
owned_ball_ops!(Ball: Add add, Sub sub, Mul mul);

impl Zero for Ball {
    fn zero() -> Self {
        Ball::zero()
    }
    fn is_zero(&self) -> bool {
        self.mid.is_zero() && self.rad.is_zero()
    }
}

impl One for Ball {
    fn one() -> Self {
        Ball::one()
    }
}

/// Rectangular complex ball `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CBall {
    pub re: Ball,
    pub im: Ball,
}

impl CBall {
    pub fn new(re: Ball, im: Ball) -> Self {
        CBall { re, im }
    }

    pub fn real(re: Ball) -> Self {
        let p = re.prec();
        CBall {
            re,
            im: Ball::zero().with_prec(p),
        }
    }

    pub fn exact(re: Dyadic, im: Dyadic) -> Self {
        CBall {
            re: Ball::exact(re),
            im: Ball::exact(im),
        }
    }

    pub fn with_prec(self, p: u64) -> Self {
        CBall {
            re: self.re.with_prec(p),
            im: self.im.with_prec(p),
        }
    }

    pub fn prec(&self) -> u64 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_real_exact(&self) -> bool {
        self.im.is_zero()
    }

    /// Centers of both parts, as an exact point.
    pub fn center(&self) -> CBall {
        CBall::exact(self.re.mid().clone(), self.im.mid().clone()).with_prec(self.prec())
    }

    /// Upper bound of `|z - center|`.
    pub fn radius_upper(&self) -> Dyadic {
        let s = &(self.re.rad() * self.re.rad()) + &(self.im.rad() * self.im.rad());
        s.round(RAD_BITS, Round::Up).sqrt_round(RAD_BITS, Round::Up)
    }

    pub fn norm_sqr(&self) -> Ball {
        &self.re.sqr() + &self.im.sqr()
    }

    pub fn abs_upper(&self) -> Dyadic {
        let a = self.re.abs_upper();
        let b = self.im.abs_upper();
        (&(&a * &a) + &(&b * &b))
            .round(RAD_BITS, Round::Up)
            .sqrt_round(RAD_BITS, Round::Up)
    }

    pub fn abs_lower(&self) -> Dyadic {
        let a = self.re.abs_lower();
        let b = self.im.abs_lower();
        (&(&a * &a) + &(&b * &b))
            .round(RAD_BITS, Round::Down)
            .sqrt_round(RAD_BITS, Round::Down)
    }

    /// Enclosure of `|z|` as a real ball with tight center.
    pub fn abs(&self) -> Ball {
        if self.im.is_zero() {
            return self.re.abs();
        }
        let p = self.prec().max(64);
        let n = self.norm_sqr();
        let lo = n.lower();
        let hi = n.upper();
        let lo = if lo.is_negative() { Dyadic::zero() } else { lo };
        Ball::from_bounds(&lo.sqrt_round(p, Round::Down), &hi.sqrt_round(p, Round::Up), p)
    }

    pub fn conj(&self) -> CBall {
        CBall {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn recip(&self) -> Option<CBall> {
        if self.im.is_zero() {
            return Some(CBall::real(self.re.recip()?));
        }
        let inv = self.norm_sqr().with_prec(self.prec().max(1)).recip()?;
        Some(CBall {
            re: &self.re * &inv,
            im: -&(&self.im * &inv),
        })
    }

    pub fn div(&self, other: &CBall) -> Option<CBall> {
        Some(self * &other.recip()?)
    }

    pub fn scale(&self, s: &Ball) -> CBall {
        CBall {
            re: &self.re * s,
            im: &self.im * s,
        }
    }

    pub fn pow(&self, mut e: u64) -> CBall {
        let mut acc = CBall::real(Ball::one().with_prec(self.prec()));
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        acc
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }
}

impl Add for &CBall {
    type Output = CBall;
    fn add(self, rhs: &CBall) -> CBall {
        CBall {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &CBall {
    type Output = CBall;
    fn sub(self, rhs: &CBall) -> CBall {
        CBall {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &CBall {
    type Output = CBall;
    fn mul(self, rhs: &CBall) -> CBall {
        if self.im.is_zero() && rhs.im.is_zero() {
            let re = &self.re * &rhs.re;
            let p = re.prec();
            return CBall {
                re,
                im: Ball::zero().with_prec(p),
            };
        }
        CBall {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl Neg for &CBall {
    type Output = CBall;
    fn neg(self) -> CBall {
        CBall {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

owned_ball_ops!(CBall: Add add, Sub sub, Mul mul);

impl Zero for CBall {
    fn zero() -> Self {
        CBall::real(Ball::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for CBall {
    fn one() -> Self {
        CBall::real(Ball::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(x: f64) -> Ball {
        Ball::exact(Dyadic::from_f64(x).unwrap())
    }

    #[test]
    fn exact_arithmetic_stays_exact() {
        let x = &(&b(1.5) * &b(2.25)) - &b(0.125);
        assert!(x.is_exact());
        assert_eq!(x.to_f64(), 1.5 * 2.25 - 0.125);
        let half = b(2.0).recip().unwrap();
        assert!(half.is_exact());
        assert_eq!(half.to_f64(), 0.5);
    }

    #[test]
    fn reciprocal_encloses() {
        let three = Ball::from_int(3).with_prec(100);
        let inv = three.recip().unwrap();
        let prod = &inv * &Ball::from_int(3);
        assert!(prod.contains(&Dyadic::one()));
        assert!(prod.rad() < &Dyadic::pow2(-95));
        assert!(Ball::from_bounds(&Dyadic::from_int(-1), &Dyadic::one(), 64).recip().is_none());
    }

    #[test]
    fn rounding_widens_radius() {
        let x = Ball::exact(Dyadic::new(BigInt::from(0b1011011), 0)).with_prec(3);
        assert!(x.contains(&Dyadic::from_int(0b1011011)));
        assert!(!x.is_exact());
    }

    #[test]
    fn far_apart_terms_stay_short() {
        let big = Ball::exact(Dyadic::pow2(-5)).with_prec(128);
        let tiny = Ball::exact(Dyadic::pow2(-(1i64 << 40))).with_prec(128);
        let s = &big + &tiny;
        assert!(s.mid().bits() < 200 && s.rad().bits() < 64);
        assert!(s.contains(&Dyadic::pow2(-5)));
        assert!(s.upper() > Dyadic::pow2(-5));
        let d = &big - &tiny;
        assert!(d.lower() < Dyadic::pow2(-5) && d.overlaps(&s));
        assert!(tiny.is_positive() && !(&tiny - &tiny).is_positive());
        let exact = &Ball::exact(Dyadic::pow2(-5)) + &Ball::exact(Dyadic::pow2(-300));
        assert!(exact.is_exact());
    }

    #[test]
    fn floor_certainty() {
        assert_eq!(b(2.5).floor_certain(), Some(BigInt::from(2)));
        let near = Ball::from_bounds(&Dyadic::from_f64(2.9).unwrap(), &Dyadic::from_f64(3.1).unwrap(), 64);
        assert_eq!(near.floor_certain(), None);
    }

    #[test]
    fn complex_ops() {
        let i = CBall::exact(Dyadic::zero(), Dyadic::one());
        let m1 = &i * &i;
        assert_eq!(m1.re.to_f64(), -1.0);
        assert!(m1.im.is_zero());
        let z = CBall::exact(Dyadic::from_int(3), Dyadic::from_int(4)).with_prec(80);
        assert!(z.abs().contains(&Dyadic::from_int(5)));
        let w = z.recip().unwrap();
        let one = &z * &w;
        assert!(one.re.contains(&Dyadic::one()) && one.im.contains(&Dyadic::zero()));
    }

    proptest! {
        #[test]
        fn products_enclose_true_values(x in -1e6f64..1e6, y in -1e6f64..1e6, p in 8u64..80) {
            let bx = b(x).with_prec(p);
            let by = b(y).with_prec(p);
            let exact = &Dyadic::from_f64(x).unwrap() * &Dyadic::from_f64(y).unwrap();
            prop_assert!((&bx * &by).contains(&exact));
            let sum = &Dyadic::from_f64(x).unwrap() + &Dyadic::from_f64(y).unwrap();
            prop_assert!((&bx + &by).contains(&sum));
        }

        #[test]
        fn quotients_enclose(x in 1e-3f64..1e6, y in 1e-3f64..1e6, p in 16u64..120) {
            let q = b(x).with_prec(p).div(&b(y)).unwrap();
            // q·y must enclose x
            let back = &q * &b(y);
            prop_assert!(back.contains(&Dyadic::from_f64(x).unwrap()));
        }
    }
}
