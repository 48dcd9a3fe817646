//! Evaluation of digit series `Σ_j d_j β^{-j}` with small integer digits.
//!
//! When β is a power of two the sum is formed exactly as a dyadic rational
//! by a balanced binary reduction; otherwise it is a Horner recurrence in
//! ball arithmetic. Both shapes are fixed by the input, so results do not
//! depend on scheduling.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::ball::Ball;
use crate::dyadic::Dyadic;
use crate::error::Result;
use crate::field::{FieldElement, NumberField};

/// Exponents beyond this are replaced by an enclosure `[0, β^{-CLAMP}]`.
const CLAMP: u64 = 1 << 40;
const LEAF: usize = 64;
const PAR_CUTOFF: usize = 1 << 14;

#[derive(Clone, Debug)]
pub(crate) enum Base {
    Pow2 { e: u32 },
    Real { beta: Ball, inv: Ball },
}

impl Base {
    pub fn new(field: &NumberField, prec: u64) -> Result<Base> {
        if field.is_integer() {
            let b = -field.min_poly().coeff(0);
            if b.sign() == num_bigint::Sign::Plus && b.magnitude().count_ones() == 1 {
                return Ok(Base::Pow2 {
                    e: (b.bits() - 1) as u32,
                });
            }
        }
        let beta = field.beta_ball(prec)?.with_prec(prec);
        let inv = beta.recip().expect("β > 1");
        Ok(Base::Real { beta, inv })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Base::Pow2 { .. })
    }

    pub fn beta(&self) -> Ball {
        match self {
            Base::Pow2 { e } => Ball::exact(Dyadic::pow2(i64::from(*e))),
            Base::Real { beta, .. } => beta.clone(),
        }
    }

    /// `β^{-n}`.
    pub fn inv_pow(&self, n: u64) -> Ball {
        match self {
            Base::Pow2 { e } => Ball::exact(Dyadic::pow2(-(i64::from(*e) * n as i64))),
            Base::Real { inv, .. } => inv.pow(n),
        }
    }

    /// `β^{-n}` for arbitrary `n`; huge exponents give a certified enclosure.
    pub fn inv_pow_big(&self, n: &BigUint) -> Ball {
        match n.to_u64().filter(|&v| v <= CLAMP) {
            Some(v) => self.inv_pow(v),
            None => {
                let hi = self.inv_pow(CLAMP).upper();
                Ball::from_bounds(&Dyadic::zero(), &hi, self.prec())
            }
        }
    }

    pub fn pow(&self, n: u64) -> Ball {
        match self {
            Base::Pow2 { e } => Ball::exact(Dyadic::pow2(i64::from(*e) * n as i64)),
            Base::Real { beta, .. } => beta.pow(n),
        }
    }

    pub fn prec(&self) -> u64 {
        match self {
            Base::Pow2 { .. } => 0,
            Base::Real { beta, .. } => beta.prec(),
        }
    }

    /// Real image of `a` under `β ↦ β`.
    pub fn embed(&self, a: &FieldElement) -> Ball {
        a.eval_real(&self.beta())
    }

    /// `Σ_{j ≥ 0} d_j β^{-j}` over the given digits.
    pub fn digit_series(&self, digits: &[i64]) -> Ball {
        if digits.is_empty() {
            return Ball::zero();
        }
        match self {
            Base::Pow2 { e } => {
                let v = tree_sum(digits, *e);
                let shift = i64::from(*e) * (digits.len() as i64 - 1);
                Ball::exact(Dyadic::new(v, -shift))
            }
            Base::Real { inv, .. } => {
                let mut acc = Ball::from_int(digits[digits.len() - 1]).with_prec(inv.prec());
                for &d in digits[..digits.len() - 1].iter().rev() {
                    acc = &acc * inv;
                    if d != 0 {
                        acc = &acc + &Ball::from_int(d);
                    }
                }
                acc
            }
        }
    }
}

/// `Σ_j d_j 2^{e(len-1-j)}`.
fn tree_sum(d: &[i64], e: u32) -> BigInt {
    if d.len() <= LEAF {
        let mut acc = BigInt::zero();
        for &x in d {
            acc <<= e as usize;
            acc += x;
        }
        return acc;
    }
    let mid = d.len() / 2;
    let (l, r) = d.split_at(mid);
    let (a, b) = if d.len() >= PAR_CUTOFF {
        rayon::join(|| tree_sum(l, e), || tree_sum(r, e))
    } else {
        (tree_sum(l, e), tree_sum(r, e))
    };
    (a << (e as usize * r.len())) + b
}

/// Upper bound `‖a‖ = Σ |a_i(β)|` as a ball.
pub(crate) fn coeff_norm(base: &Base, coeffs: &[FieldElement]) -> Ball {
    coeffs
        .iter()
        .fold(Ball::zero(), |acc, a| &acc + &base.embed(a).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_tree_matches_rational() {
        let digits: Vec<i64> = (0..1000).map(|i| [(1), (0), (-1), (2)][i % 4]).collect();
        let base = Base::Pow2 { e: 1 };
        let v = base.digit_series(&digits);
        assert!(v.is_exact());
        // compare against a Horner evaluation in exact dyadics
        let mut acc = Dyadic::zero();
        for &d in digits.iter().rev() {
            acc = &acc.mul_pow2(-1) + &Dyadic::from_int(d);
        }
        assert_eq!(v.mid(), &acc);
    }

    #[test]
    fn ball_series_encloses_geometric_sum() {
        let f = NumberField::parse([-1, -1, 1]).unwrap();
        let base = Base::new(&f, 128).unwrap();
        let v = base.digit_series(&vec![1; 400]);
        // Σ_{j<400} φ^{-j} ≈ φ/(φ-1) = φ²
        let phi2 = (1.0 + 5f64.sqrt()) / 2.0 + 1.0;
        assert!((v.to_f64() - phi2).abs() < 1e-12);
        assert!(v.rad() < &Dyadic::pow2(-100));
    }
}
