use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::NumberField;
use crate::ball::{Ball, CBall};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::poly::resultant;
use crate::IntPoly;

/// Element `Σ A_i β^i` of `Z[β]` in power-basis coordinates.
#[derive(Clone)]
pub struct FieldElement {
    coords: Vec<BigInt>,
    field: NumberField,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElemOp {
    Add,
    Sub,
    Mul,
}

impl FieldElement {
    pub(super) fn from_parts(field: NumberField, coords: Vec<BigInt>) -> Self {
        FieldElement { coords, field }
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn to_poly(&self) -> IntPoly {
        IntPoly::new(self.coords.clone())
    }

    fn from_poly(field: &NumberField, p: &IntPoly) -> Self {
        let r = p.rem(field.min_poly()).expect("minimal polynomial is monic");
        let d = field.degree();
        let coords = (0..d).map(|i| r.coeff(i)).collect();
        FieldElement {
            coords,
            field: field.clone(),
        }
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field.same_as(&other.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(FieldElement::from_parts(self.field.clone(), coords))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        Ok(FieldElement::from_parts(self.field.clone(), coords))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(FieldElement::from_poly(&self.field, &(&self.to_poly() * &other.to_poly())))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let coords = self.coords.iter().map(|a| a * c).collect();
        FieldElement::from_parts(self.field.clone(), coords)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = self.field.one();
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

    /// Exact norm `Π_i a(β_i)`, as the resultant of the minimal polynomial
    /// and the coordinate polynomial.
    pub fn norm(&self) -> BigInt {
        if self.field.degree() == 1 {
            return self.coords[0].clone();
        }
        resultant(self.field.min_poly(), &self.to_poly())
    }

    /// Evaluation of the coordinate polynomial on a given root enclosure.
    pub fn eval_at(&self, root: &CBall) -> CBall {
        self.to_poly()
            .eval_with(root, |c| CBall::real(Ball::from_int(c.clone())))
    }

    pub fn eval_real(&self, root: &Ball) -> Ball {
        self.to_poly().eval_with(root, |c| Ball::from_int(c.clone()))
    }

    /// Certified enclosure of the image under the embedding `β ↦ β_index`
    /// (1-based), with radius at most `2^{-precision}·max(1, |center|)`.
    pub fn embed(&self, index: usize, precision: u64) -> Result<CBall> {
        let ceiling = self.field.precision_ceiling();
        let extra = self.coords.iter().map(|c| c.bits()).max().unwrap_or(0) + 16;
        let mut work = precision + extra;
        loop {
            let root = self.field.root_ball(index, work)?;
            let v = self.eval_at(&root);
            let scale = v.center().abs_upper().max(Dyadic::one());
            if v.radius_upper() <= &Dyadic::pow2(-(precision as i64)) * &scale {
                return Ok(v);
            }
            if work >= ceiling {
                return Err(Error::PrecisionExhausted(ceiling));
            }
            work = (2 * work).min(ceiling);
        }
    }

    /// Real embedding at the distinguished root β.
    pub fn embed_beta(&self, precision: u64) -> Result<Ball> {
        Ok(self.embed(self.field.beta_index(), precision)?.re)
    }

    /// Sum of absolute values of the coordinates.
    pub fn coord_l1(&self) -> BigInt {
        self.coords.iter().map(|c| c.abs()).sum()
    }

    pub fn record(&self) -> ElementRecord {
        ElementRecord {
            coords: self.coords.iter().map(ToString::to_string).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementRecord {
    pub coords: Vec<String>,
}

/// `a op b` for elements of the same field.
pub fn elem_arith(a: &FieldElement, b: &FieldElement, op: ElemOp) -> Result<FieldElement> {
    match op {
        ElemOp::Add => a.checked_add(b),
        ElemOp::Sub => a.checked_sub(b),
        ElemOp::Mul => a.checked_mul(b),
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_as(&other.field) && self.coords == other.coords
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({:?})", self.coords)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.to_poly();
        let s = p.to_string().replace('x', "β");
        f.write_str(&s)
    }
}

// Operator forms panic on mismatched fields; use the `checked_*` methods
// for fallible arithmetic.
impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.checked_add(rhs).expect("elements belong to different fields")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.checked_sub(rhs).expect("elements belong to different fields")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.checked_mul(rhs).expect("elements belong to different fields")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::from_parts(self.field.clone(), self.coords.iter().map(|c| -c).collect())
    }
}

impl FieldElement {
    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }
}
