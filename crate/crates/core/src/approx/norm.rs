use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::{tpow, LinearForm};
use crate::ball::{Ball, BallRecord, CBall};
use crate::dyadic::Dyadic;
use crate::error::{invalid, Result};
use crate::serde_util::display_opt;
use crate::field::{Classification, FieldElement};
use crate::witness::{kappa, min_valid_n, CongruenceWitness};

const SIG: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormAuditOptions {
    /// Power-basis coordinates `A_0..A_{d-1}` of the hypothesized `ξ`.
    pub xi_coords: Vec<BigInt>,
    pub precision: u64,
    /// Largest `N` searched for `N₀`.
    pub max_n: u64,
    /// Largest `2M` for which the coefficient-sum audit enumerates `p_N`.
    pub term_budget: u64,
}

impl Default for NormAuditOptions {
    fn default() -> Self {
        NormAuditOptions {
            xi_coords: vec![BigInt::from(10), BigInt::from(10)],
            precision: 128,
            max_n: 64,
            term_budget: 1 << 22,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NormAudit {
    pub k: u32,
    pub n: u64,
    pub degree: usize,
    pub classification: Classification,
    /// All conjugates satisfy `|β_i| ≤ 1` (Pisot, Salem, or `d = 1`).
    pub applicable: bool,
    pub integer_case: bool,
    /// `Σ|a_l(β)|`.
    pub norm_beta: Ball,
    /// `max_i Σ|σ_i(a_l)|` over conjugates.
    pub norm_conj: Ball,
    /// `Σ|A_i|`.
    pub xi_l1: BigInt,
    pub c1: Ball,
    pub c2: Ball,
    /// First `N` from which `lhs(N) < 1` holds for all larger `N`.
    pub n0: Option<u64>,
    /// `max(N₀, min_valid_N)`: where every bound used by the contradiction is valid.
    pub n0_valid: Option<u64>,
    pub lhs_at_n0: Option<Ball>,
    pub lhs_at_n: Ball,
    /// Exact coefficient-sum bound `max_i Σ_e|σ_i(p_e)| + 2|ξ(β_i)|` at `N`.
    pub c2_n: Option<Ball>,
    /// `c₂·M` at `N`.
    pub c2_m: Ball,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NormAuditRecord {
    pub k: String,
    #[serde(rename = "N")]
    pub n: String,
    pub degree: String,
    pub classification: Classification,
    pub applicable: bool,
    pub integer_case: bool,
    pub c1: BallRecord,
    pub c2: BallRecord,
    #[serde(rename = "N0", serialize_with = "display_opt")]
    pub n0: Option<u64>,
    #[serde(rename = "N0Valid", serialize_with = "display_opt")]
    pub n0_valid: Option<u64>,
    pub lhs_at_n0: Option<BallRecord>,
    pub lhs_at_n: BallRecord,
    pub c2_n: Option<BallRecord>,
    pub c2_m: BallRecord,
    pub c2_audit_passed: bool,
    pub passed: bool,
}

impl NormAudit {
    /// `C₂(N) ≤ c₂·M` certified (vacuous when not enumerated or `d = 1`).
    pub fn c2_audit_passed(&self) -> bool {
        match &self.c2_n {
            Some(b) => b.upper() <= self.c2_m.lower(),
            None => true,
        }
    }

    pub fn passed(&self) -> bool {
        self.applicable
            && self.c2_audit_passed()
            && self.lhs_at_n0.as_ref().is_some_and(|b| b.upper() < Dyadic::one())
    }

    pub fn record(&self) -> NormAuditRecord {
        NormAuditRecord {
            k: self.k.to_string(),
            n: self.n.to_string(),
            degree: self.degree.to_string(),
            classification: self.classification,
            applicable: self.applicable,
            integer_case: self.integer_case,
            c1: self.c1.to_record(SIG),
            c2: self.c2.to_record(SIG),
            n0: self.n0,
            n0_valid: self.n0_valid,
            lhs_at_n0: self.lhs_at_n0.as_ref().map(|b| b.to_record(SIG)),
            lhs_at_n: self.lhs_at_n.to_record(SIG),
            c2_n: self.c2_n.as_ref().map(|b| b.to_record(SIG)),
            c2_m: self.c2_m.to_record(SIG),
            c2_audit_passed: self.c2_audit_passed(),
            passed: self.passed(),
        }
    }
}

struct Constants {
    d: usize,
    beta: Ball,
    c1: Ball,
    c2: Ball,
    prec: u64,
}

impl Constants {
    /// `c₁ c₂^{d−1} M^d β^{−2^N}`.
    fn lhs(&self, w: &CongruenceWitness, n: u64) -> Ball {
        let m = &w.y << kappa(w, n);
        let mb = Ball::exact(Dyadic::new(BigInt::from(m), 0)).with_prec(self.prec);
        let two_n = if n < 64 {
            1u64 << n
        } else {
            u64::MAX
        };
        let decay = if two_n <= 1 << 40 {
            self.beta.recip().expect("β > 1").pow(two_n)
        } else {
            let hi = self.beta.recip().expect("β > 1").pow(1 << 40).upper();
            Ball::from_bounds(&Dyadic::zero(), &hi, self.prec)
        };
        &(&(&self.c1 * &self.c2.pow(self.d as u64 - 1)) * &mb.pow(self.d as u64)) * &decay
    }
}

fn abs_cball(z: &CBall) -> Ball {
    z.abs()
}

/// Explicit-constant form of the norm contradiction for a hypothesized
/// `ξ = Σ A_i β^i ∈ Z[β]`: `F_N = q_N ξ − p_N` is a nonzero algebraic integer,
/// so `1 ≤ |N(F_N)| ≤ c₁ c₂^{d−1} M^d β^{−2^N}`; reports the `N₀` past which the
/// right side stays below 1.
pub fn norm_contradiction_check(
    w: &CongruenceWitness,
    form: &LinearForm,
    n: u64,
    opts: &NormAuditOptions,
) -> Result<NormAudit> {
    if form.k() != w.k {
        return invalid(format!("form has k = {}, witness has k = {}", form.k(), w.k));
    }
    if n == 0 {
        return invalid("N must be at least 1");
    }
    let field = form.field();
    let d = field.degree();
    if opts.xi_coords.len() > d {
        return invalid(format!("ξ has {} coordinates, field degree is {d}", opts.xi_coords.len()));
    }
    let prec = opts.precision.max(64);
    let xi = field.element(opts.xi_coords.clone())?;
    let class = field.classification();
    let integer_case = d == 1;
    let applicable = matches!(
        class,
        Classification::Pisot | Classification::Salem | Classification::RationalInteger
    );

    let beta = field.beta_ball(prec)?.with_prec(prec);
    let one = Ball::one();
    let norm_beta = form
        .coeffs()
        .iter()
        .try_fold(Ball::zero(), |acc, a| Ok::<_, crate::Error>(&acc + &a.embed_beta(prec)?.abs()))?;
    let c1 = &norm_beta * &beta.div(&(&beta - &one)).expect("β > 1");

    let conj: Vec<usize> = field.conjugate_indices().collect();
    let mut norm_conj = Ball::zero();
    for &i in &conj {
        let mut s = Ball::zero();
        for a in form.coeffs() {
            s = &s + &abs_cball(&a.embed(i, prec)?);
        }
        if s.upper() > norm_conj.upper() {
            norm_conj = s;
        }
    }
    let xi_l1: BigInt = opts.xi_coords.iter().map(|a| a.abs()).sum();
    let c2 = &norm_conj.scale_int(&BigInt::from(3)) + &Ball::from_int(&xi_l1 * 2);

    let consts = Constants {
        d,
        beta: beta.clone(),
        c1: c1.clone(),
        c2: c2.clone(),
        prec,
    };

    // log2 lhs(N+1) − log2 lhs(N) = d·k − 2^N(log2 β) is negative from here on
    let lb = beta.lower().to_f64().log2();
    let mut mono = 1u64;
    while mono < opts.max_n && (1u64 << mono) as f64 * lb <= (d as f64) * f64::from(w.k) + 1.0 {
        mono += 1;
    }
    let top = mono.min(opts.max_n);
    let ok: Vec<bool> = (1..=opts.max_n)
        .map(|c| consts.lhs(w, c).upper() < Dyadic::one())
        .collect();
    let n0 = (1..=opts.max_n).find(|&c| (c..=c.max(top)).all(|v| ok[v as usize - 1]));
    let lhs_at_n0 = n0.map(|v| consts.lhs(w, v));
    let n0_valid = n0.map(|v| v.max(min_valid_n(w)));
    let lhs_at_n = consts.lhs(w, n);

    let m = &w.y << kappa(w, n);
    let c2_m = &c2 * &Ball::exact(Dyadic::new(BigInt::from(m.clone()), 0));
    let c2_n = if integer_case {
        None
    } else {
        coefficient_sum_bound(form, &xi, &m, &conj, opts.term_budget, prec)?
    };

    Ok(NormAudit {
        k: w.k,
        n,
        degree: d,
        classification: class,
        applicable,
        integer_case,
        norm_beta,
        norm_conj,
        xi_l1,
        c1,
        c2,
        n0,
        n0_valid,
        lhs_at_n0,
        lhs_at_n,
        c2_n,
        c2_m,
    })
}

/// `max_i (Σ_e |σ_i(p_e)| + 2|σ_i(ξ)|)`, enumerating the digit patterns of
/// `p_N`'s coefficients; `None` if `2M` exceeds the budget.
fn coefficient_sum_bound(
    form: &LinearForm,
    xi: &FieldElement,
    m: &BigUint,
    conj: &[usize],
    budget: u64,
    prec: u64,
) -> Result<Option<Ball>> {
    let Some(mm) = m.to_u64().filter(|&v| v.saturating_mul(2) <= budget) else {
        return Ok(None);
    };
    let support = form.support();
    let mut patterns: HashMap<Vec<i8>, u64> = HashMap::new();
    for e in 1..2 * mm {
        let pat: Vec<i8> = support
            .iter()
            .map(|&i| {
                let hi = tpow(&BigUint::from(2 * mm - e), i);
                let lo = if e <= mm { tpow(&BigUint::from(mm - e), i) } else { 0 };
                (hi - lo) as i8
            })
            .collect();
        *patterns.entry(pat).or_default() += 1;
    }
    let field = form.field();
    let mut best: Option<Ball> = None;
    for &i in conj {
        let mut total = Ball::zero();
        for (pat, count) in &patterns {
            let mut c = field.zero();
            for (&l, &dgt) in support.iter().zip(pat) {
                if dgt != 0 {
                    c = &c + &form.coeffs()[l as usize - 1].scale(&BigInt::from(dgt));
                }
            }
            if c.is_zero() {
                continue;
            }
            total = &total + &abs_cball(&c.embed(i, prec)?).scale_int(&BigInt::from(*count));
        }
        total = &total + &abs_cball(&xi.embed(i, prec)?).scale_int(&BigInt::from(2));
        if best.as_ref().is_none_or(|b| total.upper() > b.upper()) {
            best = Some(total);
        }
    }
    Ok(best)
}
