use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::series::{coeff_norm, Base};
use super::{tpow, ApproxPair, LinearForm};
use crate::ball::{Ball, BallRecord};
use crate::dyadic::Dyadic;
use crate::error::{invalid, Error, Result};
use crate::lemma::{JSelection, LemmaLab, LemmaReport};
use crate::witness::{floor_lambda_n, kappa, min_valid_n, CongruenceWitness};

const SIG: usize = 20;
const PROFILE_LEN: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualOptions {
    /// Target: certified tail of the scaled sum below `2^{-tol_bits}`.
    pub tol_bits: u64,
    /// Sample budget for the `u(j) = 0`, `j ≤ 2^N` check.
    pub sample_budget: u64,
    pub seed: u64,
    /// Permit `N < min_valid_N`; reports are then flagged.
    pub allow_below_threshold: bool,
    /// For β a power of two, sum all `2^{⌊λN⌋} − 2^N` terms exactly when at
    /// most this many.
    pub exact_budget: u64,
    /// Also enclose `q_N ξ − p_N` from `j = 0` when at most this many terms.
    pub full_budget: u64,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        ResidualOptions {
            tol_bits: 64,
            sample_budget: 4096,
            seed: 0,
            allow_below_threshold: false,
            exact_budget: 1 << 23,
            full_budget: 1 << 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Non-gating checks are reported but do not decide the verdict.
    pub gating: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, gating: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            passed,
            gating,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UTerm {
    pub j: String,
    pub u: String,
}

#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub k: u32,
    pub n: u64,
    pub kappa: u64,
    pub min_valid_n: u64,
    pub below_threshold: bool,
    pub beta: Ball,
    /// All `2^{⌊λN⌋} − 2^N` terms summed exactly (β a power of two).
    pub exact: bool,
    /// Last index `J` of the summed range.
    pub truncation: u128,
    /// Bound on the omitted part of the scaled sum.
    pub tail: Dyadic,
    /// `Σ_{j=2^N+1}^{2^{⌊λN⌋}} u(j) β^{-j}`.
    pub s: Ball,
    /// `S·β^{2^N}` with sign.
    pub scaled_signed: Ball,
    /// `|S|·β^{2^N}`.
    pub scaled: Ball,
    /// `(β⁴−β²−1)/(β²(β²−1))`.
    pub lower_const: Ball,
    /// `(β²/(β²−1))(β^{-5} + β^{-2^{N-2}-2})`.
    pub eps_n: Ball,
    /// `(β⁴−β²−1)/(β³(β²−1))`.
    pub corrected_const: Ball,
    /// `(β²/(β²−1))β^{-2^{N-2}-2}`.
    pub corrected_eps_n: Ball,
    /// `Σ |a_i(β)|`.
    pub norm_a: Ball,
    /// `C = Σ|a_i(β)|·β/(β−1)`.
    pub c: Ball,
    /// Enclosure of `β^{2^N}|q_N ξ − p_N|` bounded via `|a_k|·|S|β^{2^N}`.
    pub upper_lhs: Ball,
    /// `log_β(1/|S|) − 2^N`, approximate.
    pub decay_offset: f64,
    pub u_profile: Vec<UTerm>,
    pub u_nonzero: u64,
    /// `u(2^N + 1)`; the sign is observed, not asserted.
    pub u_first: i8,
    pub shift_report: LemmaReport,
    pub special_report: LemmaReport,
    /// Enclosure of `q_N ξ − p_N` summed from `j = 0`, when within budget.
    pub full: Option<Ball>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidualRecord {
    pub k: String,
    #[serde(rename = "N")]
    pub n: String,
    pub kappa: String,
    #[serde(rename = "minValidN")]
    pub min_valid_n: String,
    pub below_threshold: bool,
    pub beta: BallRecord,
    pub exact: bool,
    pub truncation: String,
    pub tail: String,
    #[serde(rename = "S")]
    pub s: BallRecord,
    pub scaled: BallRecord,
    pub lower_const: BallRecord,
    pub eps_n: BallRecord,
    pub corrected_const: BallRecord,
    pub corrected_eps_n: BallRecord,
    #[serde(rename = "C")]
    pub c: BallRecord,
    pub decay_offset: String,
    pub u_profile: Vec<UTerm>,
    pub u_nonzero: String,
    pub u_first: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full: Option<BallRecord>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl ResidualReport {
    /// All gating checks passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.gating).all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn record(&self) -> ResidualRecord {
        ResidualRecord {
            k: self.k.to_string(),
            n: self.n.to_string(),
            kappa: self.kappa.to_string(),
            min_valid_n: self.min_valid_n.to_string(),
            below_threshold: self.below_threshold,
            beta: self.beta.to_record(SIG),
            exact: self.exact,
            truncation: self.truncation.to_string(),
            tail: self.tail.to_sci(4, crate::dyadic::Round::Up),
            s: self.s.to_record(SIG),
            scaled: self.scaled.to_record(SIG),
            lower_const: self.lower_const.to_record(SIG),
            eps_n: self.eps_n.to_record(SIG),
            corrected_const: self.corrected_const.to_record(SIG),
            corrected_eps_n: self.corrected_eps_n.to_record(SIG),
            c: self.c.to_record(SIG),
            decay_offset: format!("{:.6}", self.decay_offset),
            u_profile: self.u_profile.clone(),
            u_nonzero: self.u_nonzero.to_string(),
            u_first: self.u_first.to_string(),
            full: self.full.as_ref().map(|b| b.to_record(SIG)),
            checks: self.checks.clone(),
            passed: self.passed(),
        }
    }
}

fn validate(w: &CongruenceWitness, form: &LinearForm) -> Result<()> {
    if form.k() != w.k {
        return invalid(format!("form has k = {}, witness has k = {}", form.k(), w.k));
    }
    if form.leading().is_zero() {
        return invalid("the leading coefficient a_k must be nonzero");
    }
    Ok(())
}

/// Number of scaled terms so that the tail `β^{-L}·β/(β−1)` is below
/// `2^{-tol}`, capped at `cap`; returns the count and the tail bound.
fn choose_terms(base: &Base, tol: u64, cap: u128) -> (u64, Dyadic) {
    let beta = base.beta();
    let geo = beta.div(&(&beta - &Ball::one())).expect("β > 1");
    let lb = beta.to_f64().log2();
    let mut l = ((tol as f64 + 4.0 + geo.to_f64().log2()) / lb).ceil().max(64.0) as u64;
    let goal = Dyadic::pow2(-(tol as i64));
    loop {
        if u128::from(l) >= cap {
            return (cap as u64, Dyadic::zero());
        }
        let tail = (&base.inv_pow(l) * &geo).upper();
        if tail < goal {
            return (l, tail);
        }
        l += 32;
    }
}

/// Certified evaluation of the residual sum `Σ u(j) β^{-j}` beyond `2^N` and
/// of the lower/upper bound checks it is meant to satisfy.
pub fn residual_series(
    w: &CongruenceWitness,
    form: &LinearForm,
    n: u64,
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    validate(w, form)?;
    if n < 2 {
        return invalid("N must be at least 2");
    }
    if n > 62 {
        return Err(Error::BudgetExceeded(format!("2^N for N = {n} exceeds 64-bit indices")));
    }
    let threshold = min_valid_n(w);
    let below = n < threshold;
    if below && !opts.allow_below_threshold {
        return Err(Error::BelowThreshold { n, threshold });
    }
    let lab = LemmaLab::unchecked(w, n)?;
    let prec = opts.tol_bits + 64;
    let base = Base::new(form.field(), prec)?;
    let beta = base.beta().with_prec(prec);
    let one = Ball::one();

    let lam = floor_lambda_n(w.k, n);
    let two_n = 1u64 << n;
    let span: u128 = if lam < 127 {
        (1u128 << lam) - u128::from(two_n)
    } else {
        u128::MAX
    };
    let (terms, tail, exact) = if base.is_exact() && span <= u128::from(opts.exact_budget) {
        (span as u64, Dyadic::zero(), true)
    } else {
        let (l, t) = choose_terms(&base, opts.tol_bits, span);
        (l, t, false)
    };

    let digits: Vec<i64> = (1..=terms)
        .into_par_iter()
        .map(|i| i64::from(lab.u_value(&BigUint::from(two_n + i))))
        .collect();
    let series = &base.inv_pow(1) * &base.digit_series(&digits);
    let scaled_signed = if tail.is_zero() {
        series
    } else {
        Ball::new(series.mid().clone(), series.rad() + &tail, prec)
    };
    let scaled = scaled_signed.abs();
    let s = &scaled_signed * &base.inv_pow(two_n);

    let b2 = beta.sqr();
    let b2m1 = &b2 - &one;
    let num = &(&b2.sqr() - &b2) - &one;
    let lower_const = num.div(&(&b2 * &b2m1)).expect("β² > 1");
    let corrected_const = num.div(&(&(&b2 * &beta) * &b2m1)).expect("β² > 1");
    let g = b2.div(&b2m1).expect("β² > 1");
    let far = base.inv_pow((two_n >> 2) + 2).with_prec(prec);
    let eps_n = &g * &(&base.inv_pow(5) + &far);
    let corrected_eps_n = &g * &far;

    let norm_a = coeff_norm(&base, form.coeffs()).with_prec(prec);
    let leading = base.embed(form.leading()).abs().with_prec(prec);
    let geo = beta.div(&(&beta - &one)).expect("β > 1");
    let c = &norm_a * &geo;
    let beyond = if span == u128::MAX {
        base.inv_pow_big(&(BigUint::from(1u8) << 64u32))
    } else {
        base.inv_pow_big(&BigUint::from(span))
    };
    let rem = (&norm_a * &beyond)
        .div(&(&beta - &one))
        .expect("β > 1");
    let upper_lhs = &(&leading * &scaled) + &rem;

    let shift_report = lab.shift_invariance(&JSelection::Auto {
        budget: opts.sample_budget,
        seed: opts.seed,
    })?;
    let special_report = lab.special_points();

    let mut u_profile = Vec::new();
    let mut u_nonzero = 0u64;
    for (i, &d) in digits.iter().enumerate() {
        if d != 0 {
            u_nonzero += 1;
            if u_profile.len() < PROFILE_LEN {
                u_profile.push(UTerm {
                    j: (two_n + i as u64 + 1).to_string(),
                    u: d.to_string(),
                });
            }
        }
    }
    let u_first = digits.first().copied().unwrap_or(0) as i8;

    let mut checks = Vec::new();
    checks.push(Check::new(
        "u-vanishes-up-to-2^N",
        shift_report.passed(),
        true,
        format!(
            "{} of {} tested j failed ({})",
            shift_report.j_failed.len(),
            shift_report.j_tested,
            shift_report.seed_or_plan
        ),
    ));
    checks.push(Check::new(
        "special-points",
        special_report.passed(),
        true,
        format!("u(2^N+1) = {u_first}; u(2^N+3) = 0 required"),
    ));
    let stated = &lower_const - &eps_n;
    checks.push(Check::new(
        "lower-bound",
        scaled.lower() >= stated.upper(),
        false,
        format!(
            "|S|β^(2^N) >= lowerConst - eps_N = {}",
            stated.to_record(12).center
        ),
    ));
    let corrected = &corrected_const - &corrected_eps_n;
    checks.push(Check::new(
        "lower-bound-corrected",
        scaled.lower() >= corrected.upper(),
        true,
        format!(
            "|S|β^(2^N) >= (β⁴−β²−1)/(β³(β²−1)) - β^(-2^(N-2)-2)β²/(β²−1) = {}",
            corrected.to_record(12).center
        ),
    ));
    checks.push(Check::new(
        "positivity",
        !scaled_signed.contains_zero(),
        true,
        "certified ball of S excludes 0".to_string(),
    ));
    checks.push(Check::new(
        "upper-bound",
        upper_lhs.upper() < c.lower(),
        true,
        format!(
            "|a_k||S|β^(2^N) + tail <= C = {}",
            c.to_record(12).center
        ),
    ));
    let inv_c = c.recip().expect("C > 0");
    let decay_ok = scaled.upper() <= b2.lower() && scaled.lower() >= inv_c.upper();
    let decay_offset = -scaled.to_f64().log2() / beta.to_f64().log2();
    checks.push(Check::new(
        "decay-window",
        decay_ok,
        true,
        format!("log_β(1/|S|) − 2^N = {decay_offset:.6} within [−2, log_β C]"),
    ));

    let full = if u128::from(two_n) + u128::from(terms) < u128::from(opts.full_budget) {
        let lift = (two_n as f64 * beta.to_f64().log2()).ceil() as u64;
        Some(residual_full(w, form, n, two_n + terms, opts.tol_bits + lift)?)
    } else {
        None
    };
    if let (Some(f), false) = (&full, below) {
        // q_N ξ − p_N = (1 − β^{-M}) (a_k S + Σ_{j > 2^{⌊λN⌋}} …) once the lemmas hold
        let m = &w.y << kappa(w, n);
        let factor = &one - &base.inv_pow_big(&m);
        let ak = base.embed(form.leading()).with_prec(prec);
        let expect = &factor * &(&ak * &scaled_signed);
        let widened = Ball::new(expect.mid().clone(), expect.rad() + &rem.upper(), prec);
        let scaled_full = f * &base.pow(two_n);
        checks.push(Check::new(
            "full-residual-consistent",
            scaled_full.overlaps(&widened),
            true,
            "β^(2^N)(q_N ξ − p_N) summed from j = 0 agrees with (1−β^(−M)) a_k S".to_string(),
        ));
    }

    Ok(ResidualReport {
        k: w.k,
        n,
        kappa: lab.kappa(),
        min_valid_n: threshold,
        below_threshold: below,
        beta,
        exact,
        truncation: u128::from(two_n) + u128::from(terms),
        tail,
        s,
        scaled_signed,
        scaled,
        lower_const,
        eps_n,
        corrected_const,
        corrected_eps_n,
        norm_a,
        c,
        upper_lhs,
        decay_offset,
        u_profile,
        u_nonzero,
        u_first,
        shift_report,
        special_report,
        full,
        checks,
    })
}

/// `u_s`-digits of the `i`-th power: `t((2M+j)^i) − t((M + (j mod M))^i)`.
fn us_digits(m: &BigUint, from: u64, to: u64, i: u32) -> Vec<i64> {
    let two_m = m << 1u32;
    let mm = m.to_u64();
    (from..to)
        .into_par_iter()
        .map(|j| {
            let jr = match mm {
                Some(mm) => BigUint::from(j % mm),
                None => BigUint::from(j),
            };
            tpow(&(&two_m + j), i) - tpow(&(m + jr), i)
        })
        .collect()
}

/// Enclosure of `q_N ξ − p_N = (1 − β^{-M}) Σ_{j ≥ 0} u_s(j) β^{-j}` with
/// `u_s(j) = s(2M + j) − s(M + (j mod M))`, summed to `j_max` with a
/// certified tail. Valid for every `N`; no lemma is assumed.
pub fn residual_full(
    w: &CongruenceWitness,
    form: &LinearForm,
    n: u64,
    j_max: u64,
    prec: u64,
) -> Result<Ball> {
    if form.k() != w.k {
        return invalid(format!("form has k = {}, witness has k = {}", form.k(), w.k));
    }
    let work = prec + 64;
    let base = Base::new(form.field(), work)?;
    let m = &w.y << kappa(w, n);
    let mut sum = Ball::zero();
    for i in form.support() {
        let digits = us_digits(&m, 0, j_max + 1, i);
        let a = base.embed(&form.coeffs()[i as usize - 1]);
        sum = &sum + &(&a * &base.digit_series(&digits));
    }
    let beta = base.beta();
    let one = Ball::one();
    let tail = (&coeff_norm(&base, form.coeffs()) * &base.inv_pow(j_max))
        .with_prec(work)
        .div(&(&beta - &one))
        .expect("β > 1")
        .upper();
    let sum = if tail.is_zero() {
        sum
    } else {
        Ball::new(sum.mid().clone(), sum.rad() + &tail, work)
    };
    Ok(&(&one - &base.inv_pow_big(&m)) * &sum)
}

fn pair_m(pair: &ApproxPair, t: u64) -> Result<u64> {
    let m = pair
        .half_degree_u64()
        .filter(|m| m.checked_mul(2).is_some())
        .ok_or_else(|| Error::BudgetExceeded("M = y·2^κ exceeds 63 bits".into()))?;
    if t < 2 * m {
        return invalid(format!("truncation T = {t} is below deg q_N = {}", 2 * m));
    }
    Ok(m)
}

/// `q_N ξ_T − p_N` computed through the `u_s` representation:
/// `(1−β^{-M}) Σ_{j=0}^{T−2M} u_s(j)β^{-j} − β^{2M−T−1} Σ_{i<M} s̃(T+1+i)β^{-i}`
/// where `s̃` is the `M`-periodic continuation of `s` on `[M, 2M)`. This is an
/// identity, so it must equal [`residual_direct`]'s truncated value; at β a
/// power of two both are exact dyadic rationals.
pub fn residual_truncated(pair: &ApproxPair, t: u64, prec: u64) -> Result<Ball> {
    let m = pair_m(pair, t)?;
    let form = pair.form();
    let work = prec + 64;
    let base = Base::new(form.field(), work)?;
    let mb = BigUint::from(m);
    let mut head = Ball::zero();
    let mut wrap = Ball::zero();
    for i in form.support() {
        let a = base.embed(&form.coeffs()[i as usize - 1]);
        let du = us_digits(&mb, 0, t - 2 * m + 1, i);
        head = &head + &(&a * &base.digit_series(&du));
        let dp: Vec<i64> = (0..m)
            .into_par_iter()
            .map(|r| {
                let idx = t + 1 + r;
                tpow(&BigUint::from(m + (idx - m) % m), i)
            })
            .collect();
        wrap = &wrap + &(&a * &base.digit_series(&dp));
    }
    let factor = &Ball::one() - &base.inv_pow(m);
    Ok(&(&factor * &head) - &(&base.inv_pow(t + 1 - 2 * m) * &wrap))
}

#[derive(Clone, Debug)]
pub struct DirectResidual {
    /// `q_N(β) ξ_T − p_N(β)` with `ξ_T` the series cut at `T`.
    pub truncated: Ball,
    /// Bound on `|q_N(β)|·|ξ − ξ_T|`.
    pub tail: Dyadic,
    /// Enclosure of `q_N ξ − p_N`.
    pub enclosure: Ball,
}

/// Brute-force evaluation of `q_N ξ − p_N` from the polynomials themselves.
pub fn residual_direct(pair: &ApproxPair, t: u64, prec: u64) -> Result<DirectResidual> {
    let m = pair_m(pair, t)?;
    let form = pair.form();
    let field = form.field();
    let beta_est = field.beta_ball(64)?.to_f64().log2().max(1.0);
    let two_n = 1u64 << pair.n().min(62);
    let work = prec + ((2 * m + two_n + 64) as f64 * beta_est).ceil() as u64 + 64;
    let base = Base::new(field, work)?;
    let q = &base.pow(2 * m) - &base.pow(m);
    let mut xi = Ball::zero();
    let mut p = Ball::zero();
    for i in form.support() {
        let a = base.embed(&form.coeffs()[i as usize - 1]);
        let dx: Vec<i64> = (1..=t)
            .into_par_iter()
            .map(|n| tpow(&BigUint::from(n), i))
            .collect();
        xi = &xi + &(&a * &(&base.inv_pow(1) * &base.digit_series(&dx)));
        let dp: Vec<i64> = (0..2 * m - 1)
            .into_par_iter()
            .map(|r| pair.p_digit(i, &BigUint::from(2 * m - 1 - r)))
            .collect();
        p = &p + &(&a * &(&base.pow(2 * m - 1) * &base.digit_series(&dp)));
    }
    let truncated = &(&q * &xi) - &p;
    let one = Ball::one();
    let tail = (&(&q.abs() * &coeff_norm(&base, form.coeffs())) * &base.inv_pow(t))
        .with_prec(work.max(64))
        .div(&(&base.beta() - &one))
        .expect("β > 1")
        .upper();
    let enclosure = if tail.is_zero() {
        truncated.clone()
    } else {
        Ball::new(truncated.mid().clone(), truncated.rad() + &tail, work)
    };
    Ok(DirectResidual {
        truncated,
        tail,
        enclosure,
    })
}
