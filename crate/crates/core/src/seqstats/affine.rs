use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::count_factors;
use crate::error::{invalid, Result};
use crate::serde_util::display;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AffineRow {
    #[serde(serialize_with = "display")]
    pub m: usize,
    #[serde(serialize_with = "display")]
    pub p_xi: u64,
    #[serde(serialize_with = "display")]
    pub p_affine: u64,
    /// `p_affine / p_xi`, six decimals.
    pub ratio: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AffineReport {
    #[serde(serialize_with = "display")]
    pub q1: BigRational,
    #[serde(serialize_with = "display")]
    pub q2: BigRational,
    #[serde(serialize_with = "display")]
    pub base: u32,
    #[serde(serialize_with = "display")]
    pub xi_digits: usize,
    /// Fractional digits of `q₁ξ + q₂` fixed by the known digits of `ξ`.
    #[serde(serialize_with = "display")]
    pub certified_digits: usize,
    #[serde(serialize_with = "display")]
    pub integer_part: BigInt,
    /// Fewer digits were certified than supplied (carry ambiguity).
    pub truncated: bool,
    /// Length on which both words were compared.
    #[serde(serialize_with = "display")]
    pub compared_len: usize,
    pub rows: Vec<AffineRow>,
    #[serde(skip)]
    pub digits: Vec<u8>,
}

fn floor_rat(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Base-`b` digits of `q₁ξ + q₂` certified from a digit prefix of `ξ ∈ [0, 1]`,
/// and the factor complexities of both words. Data only; no verdict.
pub fn affine_complexity_compare(
    q1: &BigRational,
    q2: &BigRational,
    base: u32,
    xi_digits: &[u8],
    m_max: usize,
) -> Result<AffineReport> {
    if q1.is_zero() {
        return invalid("q1 must be nonzero");
    }
    if !(2..=256).contains(&base) {
        return invalid("base must lie in 2..=256");
    }
    if xi_digits.iter().any(|&d| u32::from(d) >= base) {
        return invalid("digit outside the base");
    }
    if m_max == 0 {
        return invalid("m_max must be positive");
    }
    let n = xi_digits.len();
    let b = BigInt::from(base);
    let x = xi_digits
        .iter()
        .fold(BigInt::zero(), |acc, &d| acc * &b + BigInt::from(d));
    let scale = BigRational::from_integer(Pow::pow(&b, n));
    // ξ·b^n ∈ [X, X + 1]
    let a = q1 * BigRational::from_integer(x.clone()) + q2 * &scale;
    let c = q1 * BigRational::from_integer(x + 1) + q2 * &scale;
    let (lo, hi) = if q1.is_positive() { (a, c) } else { (c, a) };
    let (l, h) = (floor_rat(&lo), floor_rat(&hi));
    let mut r = 0;
    let mut div = BigInt::from(1);
    while r < n && l.div_floor(&div) != h.div_floor(&div) {
        div *= &b;
        r += 1;
    }
    let top = l.div_floor(&div);
    let certified = if l.div_floor(&div) == h.div_floor(&div) { n - r } else { 0 };
    let frac_scale: BigInt = Pow::pow(&b, certified);
    let (integer_part, mut frac) = top.div_mod_floor(&frac_scale);
    let mut digits = vec![0u8; certified];
    for slot in digits.iter_mut().rev() {
        let (q, d) = frac.div_mod_floor(&b);
        *slot = d.to_u8().expect("digit below base");
        frac = q;
    }
    let compared_len = certified.min(n);
    if compared_len < m_max {
        return invalid(format!(
            "only {compared_len} digits certified; need at least m_max = {m_max}"
        ));
    }
    let rows = (1..=m_max)
        .map(|m| {
            let p_xi = count_factors(&xi_digits[..compared_len], base, m);
            let p_affine = count_factors(&digits[..compared_len], base, m);
            AffineRow {
                m,
                p_xi,
                p_affine,
                ratio: format!("{:.6}", p_affine as f64 / p_xi as f64),
            }
        })
        .collect();
    Ok(AffineReport {
        q1: q1.clone(),
        q2: q2.clone(),
        base,
        xi_digits: n,
        certified_digits: certified,
        integer_part,
        truncated: certified < n,
        compared_len,
        rows,
        digits,
    })
}
