//! Greedy β-expansions of elements of `Q(β)` with exact orbit tracking.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::ball::Ball;
use crate::error::{invalid, Error, Result};
use crate::field::{FieldElement, NumberField};
use crate::serde_util::{display, display_opt, display_seq};

/// Orbit states whose coordinates exceed this many bits abort the expansion.
pub const DEFAULT_STATE_BITS: u64 = 1 << 16;
const START_PREC: u64 = 64;

/// `num / den` with `den > 0` and `gcd(coords, den) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub coords: Vec<BigInt>,
    pub den: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BetaExpansion {
    #[serde(serialize_with = "display_seq")]
    pub digits: Vec<BigInt>,
    /// Index `p` with `x_p = x_{p + period}`.
    #[serde(serialize_with = "display_opt")]
    pub preperiod: Option<usize>,
    #[serde(serialize_with = "display_opt")]
    pub period: Option<usize>,
    /// The orbit reached `0`.
    pub terminating: bool,
    /// Exact input; digits of ball inputs are certified but never periodic.
    pub exact: bool,
    #[serde(skip)]
    pub tail: Option<State>,
    #[serde(serialize_with = "display")]
    pub max_digits: usize,
}

impl BetaExpansion {
    /// `(preperiod, period)` if a repeated state was found.
    pub fn detect_period(&self) -> Option<(usize, usize)> {
        self.preperiod.zip(self.period)
    }
}

fn normalize(coords: Vec<BigInt>, den: BigInt) -> State {
    let g = coords.iter().fold(den.clone(), |g, c| g.gcd(c));
    let (coords, den) = if g.is_one() {
        (coords, den)
    } else {
        (coords.iter().map(|c| c / &g).collect(), &den / &g)
    };
    State { coords, den }
}

/// Certified floor of `num(β)/den`, deciding exact integers from coordinates.
fn exact_floor(field: &NumberField, num: &FieldElement, den: &BigInt) -> Result<BigInt> {
    let ceiling = field.precision_ceiling();
    let mut prec = START_PREC + num.coords().iter().map(|c| c.bits()).max().unwrap_or(0);
    loop {
        let beta = field.beta_ball(prec)?;
        let v = num
            .eval_real(&beta.with_prec(prec))
            .div(&Ball::from_int(den.clone()).with_prec(prec))
            .expect("den > 0");
        if let Some(f) = v.floor_certain() {
            return Ok(f);
        }
        let c = v.upper().floor();
        let int = num.coords()[1..].iter().all(Zero::is_zero) && num.coords()[0] == &c * den;
        if int {
            return Ok(c);
        }
        if prec >= ceiling {
            return Err(Error::PrecisionExhausted(ceiling));
        }
        prec = (prec * 2).min(ceiling);
    }
}

/// Greedy expansion of `num/den`, which must lie in `[0, 1)`.
pub fn beta_expand(num: &FieldElement, den: &BigInt, max_digits: usize) -> Result<BetaExpansion> {
    beta_expand_bounded(num, den, max_digits, DEFAULT_STATE_BITS)
}

pub fn beta_expand_bounded(
    num: &FieldElement,
    den: &BigInt,
    max_digits: usize,
    state_bits: u64,
) -> Result<BetaExpansion> {
    if !den.is_positive() {
        return invalid("denominator must be positive");
    }
    let field = num.field().clone();
    if !num.is_zero() && exact_floor(&field, num, den)? != BigInt::zero() {
        return invalid("x must lie in [0, 1)");
    }
    let beta = field.beta();
    let mut state = normalize(num.coords().to_vec(), den.clone());
    let mut seen: HashMap<State, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut preperiod = None;
    let mut period = None;
    loop {
        if let Some(&j) = seen.get(&state) {
            preperiod = Some(j);
            period = Some(digits.len() - j);
            break;
        }
        if digits.len() >= max_digits {
            break;
        }
        seen.insert(state.clone(), digits.len());
        let x = field.element(state.coords.clone())?;
        let y = &x * &beta;
        let d = exact_floor(&field, &y, &state.den)?;
        let mut coords = y.coords().to_vec();
        coords[0] -= &d * &state.den;
        let next = normalize(coords, state.den.clone());
        if next.coords.iter().any(|c| c.bits() > state_bits) {
            return Err(Error::BudgetExceeded(format!(
                "orbit state exceeds {state_bits} bits after {} digits",
                digits.len() + 1
            )));
        }
        digits.push(d);
        state = next;
    }
    Ok(BetaExpansion {
        terminating: state.coords.iter().all(Zero::is_zero),
        digits,
        preperiod,
        period,
        exact: true,
        tail: Some(state),
        max_digits,
    })
}

/// Digits of a real number known only as a ball, emitted while certain.
pub fn beta_expand_ball(field: &NumberField, x: &Ball, max_digits: usize) -> Result<BetaExpansion> {
    if x.lower().is_negative() || x.upper() >= crate::dyadic::Dyadic::one() {
        return invalid("x must lie in [0, 1) with certainty");
    }
    let prec = x.prec().max(START_PREC);
    let beta = field.beta_ball(prec + 64)?;
    let mut v = x.clone();
    let mut digits = Vec::new();
    while digits.len() < max_digits {
        let y = &v * &beta;
        let Some(d) = y.floor_certain() else { break };
        v = &y - &Ball::from_int(d.clone());
        digits.push(d);
    }
    Ok(BetaExpansion {
        digits,
        preperiod: None,
        period: None,
        terminating: false,
        exact: false,
        tail: None,
        max_digits,
    })
}

/// `x = Σ d_i β^{-i} + tail·β^{-n}` checked exactly in `Q(β)`.
pub fn reconstruct_exact(num: &FieldElement, den: &BigInt, e: &BetaExpansion) -> Result<bool> {
    let Some(tail) = &e.tail else {
        return invalid("reconstruction needs an exact expansion");
    };
    let field = num.field();
    let n = e.digits.len();
    let beta = field.beta();
    // β^n·x = Σ d_i β^{n−i} + tail, cleared of denominators
    let mut acc = field.zero();
    for d in &e.digits {
        acc = &(&acc * &beta) + &field.from_int(d.clone());
    }
    let lhs = (num * &beta.pow(n as u64)).scale(&tail.den);
    let rhs = &acc.scale(&(den * &tail.den)) + &field.element(tail.coords.clone())?.scale(den);
    Ok(lhs == rhs)
}

/// Same identity in ball arithmetic at the given precision.
pub fn reconstruct_ball(num: &FieldElement, den: &BigInt, e: &BetaExpansion, prec: u64) -> Result<bool> {
    let field = num.field();
    let beta = field.beta_ball(prec)?;
    let inv = beta.recip().expect("β > 1");
    let mut sum = Ball::zero();
    for d in e.digits.iter().rev() {
        sum = &(&sum + &Ball::from_int(d.clone())) * &inv;
    }
    if let Some(t) = &e.tail {
        let tv = field
            .element(t.coords.clone())?
            .eval_real(&beta)
            .div(&Ball::from_int(t.den.clone()))
            .expect("den > 0");
        sum = &sum + &(&tv * &inv.pow(e.digits.len() as u64));
    }
    let x = num.eval_real(&beta).div(&Ball::from_int(den.clone())).expect("den > 0");
    Ok(sum.overlaps(&x))
}
