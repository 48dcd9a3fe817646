//! Dense univariate polynomials over any `num-traits` ring.
//!
//! Coefficients are stored constant term first with no trailing zeros. The
//! same type serves exact integer and rational arithmetic (via the
//! [`IntPoly`](crate::IntPoly) and [`RatPoly`](crate::RatPoly) aliases) and is
//! evaluated into ball arithmetic through [`Poly::eval_with`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Clone + Zero> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// `c · x^e`.
    pub fn monomial(c: T, e: usize) -> Self {
        let mut v = vec![T::zero(); e + 1];
        v[e] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    /// `x^deg · p(1/x)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Poly::new(c)
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// Horner evaluation in another arithmetic, lifting each coefficient.
    pub fn eval_with<S>(&self, x: &S, lift: impl Fn(&T) -> S) -> S
    where
        S: Clone + Zero,
        for<'a> &'a S: Add<&'a S, Output = S> + Mul<&'a S, Output = S>,
    {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &lift(c);
        }
        acc
    }
}

impl<T> Poly<T>
where
    T: Clone + Num,
{
    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn is_monic(&self) -> bool {
        !self.is_zero() && self.lc().is_one()
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Division with remainder; `None` when a leading-coefficient division
    /// is inexact in `T` or the divisor is zero.
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        let dd = d.degree()?;
        let lc = d.lc();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Some((Poly::zero(), self.clone()));
        }
        let mut q = vec![T::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let top = r[i + dd].clone();
            if top.is_zero() {
                continue;
            }
            let f = top.clone() / lc.clone();
            if f.clone() * lc.clone() != top {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] = r[i + j].clone() - f.clone() * dc.clone();
            }
            q[i] = f;
        }
        r.truncate(dd);
        Some((Poly::new(q), Poly::new(r)))
    }

    pub fn rem(&self, d: &Self) -> Option<Self> {
        self.div_rem(d).map(|(_, r)| r)
    }
}

impl<T: Clone + Num + FromPrimitive> Poly<T> {
    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::from_usize(i).expect("degree fits the scalar type"))
                .collect(),
        )
    }
}

impl<T: Clone + Num + Signed> Poly<T> {
    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc + c.abs())
    }
}

impl Poly<BigRational> {
    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("field division is exact");
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lc = a.lc();
        a.map(|c| c / &lc)
    }

    pub fn from_int(p: &Poly<BigInt>) -> Self {
        p.map(|c| BigRational::from_integer(c.clone()))
    }

    /// Integer polynomial with content 1 and positive leading coefficient.
    pub fn primitive_integer(&self) -> Poly<BigInt> {
        if self.is_zero() {
            return Poly::zero();
        }
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        Poly::new(ints).primitive()
    }
}

impl Poly<BigInt> {
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        self.map(|c| c / &g)
    }
}

impl<T: Clone + Num> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Clone + Num> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Clone + Num> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Clone + Num + Neg<Output = T>> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Clone + Zero + fmt::Display + Signed> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = a.is_one();
            match (i, unit) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{a}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Fraction-free (Bareiss) determinant over an integral domain.
pub fn determinant<T: Clone + Num>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = T::zero() - sign;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].clone() * m[k][k].clone() - m[i][k].clone() * m[k][j].clone();
                m[i][j] = v / prev.clone();
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Resultant via the Sylvester determinant; `Res(f, c) = c^deg f` for a
/// constant `c`.
pub fn resultant<T: Clone + Num>(f: &Poly<T>, g: &Poly<T>) -> T {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return T::zero();
    };
    if n == 0 {
        return pow_n(&g.lc(), m);
    }
    if m == 0 {
        return pow_n(&f.lc(), n);
    }
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![T::zero(); size];
        for (j, c) in f.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![T::zero(); size];
        for (j, c) in g.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    determinant(rows)
}

fn pow_n<T: Clone + Num>(c: &T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, _| acc * c.clone())
}

/// Sturm chain of a rational polynomial.
pub fn sturm_chain(p: &Poly<BigRational>) -> Vec<Poly<BigRational>> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let r = chain[n - 2].rem(&chain[n - 1]).expect("field division is exact");
        if r.is_zero() {
            break;
        }
        chain.push(-&r);
    }
    chain
}

fn sign_changes(chain: &[Poly<BigRational>], x: &BigRational) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .map(|q| {
            let v = q.eval(x);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_real_roots(p: &Poly<BigRational>, a: &BigRational, b: &BigRational) -> usize {
    let chain = sturm_chain(p);
    sign_changes(&chain, a).saturating_sub(sign_changes(&chain, b))
}

/// Number of distinct real roots on the whole line.
pub fn count_all_real_roots(p: &Poly<BigRational>) -> usize {
    let chain = sturm_chain(p);
    let at = |pos: bool| -> usize {
        let signs: Vec<i8> = chain
            .iter()
            .filter(|q| !q.is_zero())
            .map(|q| {
                let d = q.degree().unwrap_or(0);
                let lc = q.lc();
                let s = if lc.is_positive() { 1 } else { -1 };
                if pos || d % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    at(false).saturating_sub(at(true))
}
