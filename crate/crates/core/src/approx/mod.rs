//! Rational approximations `p_N / q_N` to
//! `ξ = Σ_i a_i Σ_n t(n^i) β^{-n}` built from the shift witness, and the
//! certified inequalities they satisfy.

mod norm;
mod residual;
mod series;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

pub use norm::{norm_contradiction_check, NormAudit, NormAuditOptions, NormAuditRecord};
pub use residual::{
    residual_direct, residual_full, residual_series, residual_truncated, Check, DirectResidual,
    ResidualOptions, ResidualRecord, ResidualReport, UTerm,
};

use crate::error::{invalid, Error, Result};
use crate::field::{FieldElement, NumberField};
use crate::tm::parity_of_power;
use crate::witness::{kappa, CongruenceWitness};

/// Default number of terms materialized for `p_N`.
pub const DEFAULT_TERM_BUDGET: u64 = 1 << 20;

/// Coefficients `a_1..a_k` (and optionally `a_0`) in `Z[β]`.
#[derive(Clone, Debug)]
pub struct LinearForm {
    field: NumberField,
    coeffs: Vec<FieldElement>,
    a0: Option<FieldElement>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LinearFormRecord {
    pub k: String,
    /// Power-basis coordinates of `a_1..a_k`.
    pub coeffs: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<Vec<String>>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<FieldElement>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return invalid("a linear form needs k >= 1 coefficients");
        };
        let field = first.field().clone();
        if coeffs.iter().any(|c| !c.field().same_as(&field)) {
            return Err(Error::FieldMismatch);
        }
        Ok(LinearForm {
            field,
            coeffs,
            a0: None,
        })
    }

    /// Form with rational-integer coefficients `a_1..a_k`.
    pub fn from_ints(field: &NumberField, coeffs: &[i64]) -> Result<Self> {
        LinearForm::new(coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn with_constant(mut self, a0: FieldElement) -> Result<Self> {
        if !a0.field().same_as(&self.field) {
            return Err(Error::FieldMismatch);
        }
        self.a0 = Some(a0);
        Ok(self)
    }

    pub fn k(&self) -> u32 {
        self.coeffs.len() as u32
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    /// `a_1..a_k`.
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn constant(&self) -> Option<&FieldElement> {
        self.a0.as_ref()
    }

    /// `a_k`.
    pub fn leading(&self) -> &FieldElement {
        self.coeffs.last().expect("k >= 1")
    }

    /// Indices `i` (1-based) with `a_i ≠ 0`.
    pub(crate) fn support(&self) -> Vec<u32> {
        (1..=self.k())
            .filter(|&i| !self.coeffs[i as usize - 1].is_zero())
            .collect()
    }

    pub fn record(&self) -> LinearFormRecord {
        LinearFormRecord {
            k: self.k().to_string(),
            coeffs: self.coeffs.iter().map(|c| c.record().coords).collect(),
            a0: self.a0.as_ref().map(|c| c.record().coords),
        }
    }
}

/// `s(n) = Σ_i a_i t(n^i)`.
pub fn s_of_n(form: &LinearForm, n: &BigUint) -> Result<FieldElement> {
    if n.is_zero() {
        return invalid("s(n) is defined for n >= 1");
    }
    let mut acc = form.field().zero();
    for (i, a) in form.coeffs().iter().enumerate() {
        if parity_of_power(n, i as u32 + 1) == 1 {
            acc = &acc + a;
        }
    }
    Ok(acc)
}

/// `t(n^i)` with `t(0) = 0`.
pub(crate) fn tpow(n: &BigUint, i: u32) -> i64 {
    i64::from(parity_of_power(n, i))
}

/// The pair `p_N(X)`, `q_N(X) = X^{2M} − X^M` with `M = y·2^{κ(N)}`.
#[derive(Clone, Debug)]
pub struct ApproxPair {
    n: u64,
    kappa: u64,
    m: BigUint,
    witness: CongruenceWitness,
    form: LinearForm,
    p_terms: Option<Vec<(u64, FieldElement)>>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ApproxRecord {
    #[serde(rename = "N")]
    pub n: String,
    pub kappa: String,
    /// `M = y·2^κ`.
    pub half_degree: String,
    /// Sparse `(exponent, coefficient)` terms of `q_N`.
    pub q_poly: Vec<(String, String)>,
    /// Sparse terms of `p_N` when materialized.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_poly: Option<Vec<(String, Vec<String>)>>,
}

impl ApproxPair {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn kappa(&self) -> u64 {
        self.kappa
    }

    pub fn witness(&self) -> &CongruenceWitness {
        &self.witness
    }

    pub fn form(&self) -> &LinearForm {
        &self.form
    }

    /// `M = y·2^κ`.
    pub fn half_degree(&self) -> &BigUint {
        &self.m
    }

    pub fn half_degree_u64(&self) -> Option<u64> {
        self.m.to_u64()
    }

    /// `deg q_N = 2M`.
    pub fn q_degree(&self) -> BigUint {
        &self.m << 1u32
    }

    /// `q_N` as sparse `(exponent, coefficient)` terms.
    pub fn q_terms(&self) -> [(BigUint, BigInt); 2] {
        [
            (self.m.clone(), BigInt::from(-1)),
            (self.q_degree(), BigInt::from(1)),
        ]
    }

    pub fn is_materialized(&self) -> bool {
        self.p_terms.is_some()
    }

    /// Nonzero terms of `p_N`, ascending in the exponent.
    pub fn p_terms(&self) -> Option<&[(u64, FieldElement)]> {
        self.p_terms.as_deref()
    }

    /// Integer digit `c_i(e)` with `[X^e] p_N = Σ_i a_i c_i(e)`.
    pub(crate) fn p_digit(&self, i: u32, e: &BigUint) -> i64 {
        let two_m = self.q_degree();
        if e.is_zero() || *e >= two_m {
            return 0;
        }
        let hi = tpow(&(&two_m - e), i);
        if *e <= self.m {
            hi - tpow(&(&self.m - e), i)
        } else {
            hi
        }
    }

    /// `[X^e] p_N` for any exponent.
    pub fn p_coefficient(&self, e: &BigUint) -> FieldElement {
        let mut acc = self.form.field().zero();
        for (i, a) in self.form.coeffs().iter().enumerate() {
            let c = self.p_digit(i as u32 + 1, e);
            if c != 0 {
                acc = &acc + &a.scale(&BigInt::from(c));
            }
        }
        acc
    }

    pub fn record(&self) -> ApproxRecord {
        ApproxRecord {
            n: self.n.to_string(),
            kappa: self.kappa.to_string(),
            half_degree: self.m.to_string(),
            q_poly: self
                .q_terms()
                .iter()
                .map(|(e, c)| (e.to_string(), c.to_string()))
                .collect(),
            p_poly: self.p_terms.as_ref().map(|ts| {
                ts.iter()
                    .map(|(e, c)| (e.to_string(), c.record().coords))
                    .collect()
            }),
        }
    }
}

/// Builds `p_N`, `q_N`; `p_N` is materialized when `2M <= term_budget`.
pub fn build_approx(
    w: &CongruenceWitness,
    form: &LinearForm,
    n: u64,
    term_budget: u64,
) -> Result<ApproxPair> {
    if n == 0 {
        return invalid("N must be at least 1");
    }
    if form.k() != w.k {
        return invalid(format!("form has k = {}, witness has k = {}", form.k(), w.k));
    }
    let kap = kappa(w, n);
    let m = &w.y << kap;
    let mut pair = ApproxPair {
        n,
        kappa: kap,
        m,
        witness: w.clone(),
        form: form.clone(),
        p_terms: None,
    };
    if let Some(mm) = pair.half_degree_u64().filter(|&mm| mm.saturating_mul(2) <= term_budget) {
        let terms = (1..2 * mm)
            .map(|e| (e, pair.p_coefficient(&BigUint::from(e))))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        pair.p_terms = Some(terms);
    }
    Ok(pair)
}

#[cfg(test)]
mod tests;
