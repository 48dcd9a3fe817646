//! The real algebraic number β, its conjugates, and arithmetic in `Z[β]`.
//!
//! A [`NumberField`] is built from a monic integer polynomial given constant
//! term first. Construction verifies irreducibility, isolates every complex
//! root in a certified disk, picks β as the largest real root (which must
//! exceed 1), and classifies β exactly.

mod element;
mod roots;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

pub use element::{elem_arith, ElemOp, ElementRecord, FieldElement};
pub use roots::RootDisk;

use crate::ball::{Ball, BallRecord, CBall};
use crate::dyadic::Dyadic;
use crate::error::{invalid, Error, Result};
use crate::poly::count_real_roots;
use crate::{IntPoly, RatPoly};

/// Default ceiling for adaptive precision, in bits.
pub const PRECISION_CEILING: u64 = 1 << 20;
/// Irreducibility is decided by recombining certified roots, which is
/// exponential in the degree; larger inputs are refused.
pub const MAX_DEGREE: usize = 20;

const ISOLATION_BITS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    RationalInteger,
    Pisot,
    Salem,
    Other,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::RationalInteger => "rational-integer",
            Classification::Pisot => "pisot",
            Classification::Salem => "salem",
            Classification::Other => "other",
        })
    }
}

#[derive(Debug)]
struct Inner {
    min_poly: IntPoly,
    roots: Vec<RootDisk>,
    beta: usize,
    class: Classification,
}

/// Immutable, cheaply clonable handle to a number field `Q(β)`.
#[derive(Clone, Debug)]
pub struct NumberField {
    inner: Arc<Inner>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RootRecord {
    pub re: BallRecord,
    pub im: BallRecord,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FieldRecord {
    /// Constant term first.
    pub min_poly: Vec<String>,
    pub degree: usize,
    pub classification: Classification,
    /// 1-based index into `roots`.
    pub beta_index: usize,
    pub beta: BallRecord,
    pub roots: Vec<RootRecord>,
}

impl NumberField {
    /// Builds `Q(β)` from minimal-polynomial coefficients, constant term first.
    pub fn parse<I: Into<BigInt>>(coeffs: impl IntoIterator<Item = I>) -> Result<Self> {
        NumberField::from_poly(IntPoly::new(coeffs.into_iter().map(Into::into).collect()))
    }

    /// The field `Q` with β = b.
    pub fn integer(b: impl Into<BigInt>) -> Result<Self> {
        let b: BigInt = b.into();
        NumberField::from_poly(IntPoly::new(vec![-b, BigInt::one()]))
    }

    pub fn from_poly(p: IntPoly) -> Result<Self> {
        let d = match p.degree() {
            Some(d) if d >= 1 => d,
            _ => return invalid("minimal polynomial must have degree at least 1"),
        };
        if !p.is_monic() {
            return invalid(format!("minimal polynomial {p} is not monic"));
        }
        if d > MAX_DEGREE {
            return invalid(format!("degree {d} exceeds the supported maximum {MAX_DEGREE}"));
        }
        if d == 1 {
            let b = -p.coeff(0);
            if b <= BigInt::one() {
                return Err(Error::NoRealRootAboveOne);
            }
            let root = RootDisk {
                re: Dyadic::from_int(b),
                im: Dyadic::zero(),
                radius: Dyadic::zero(),
            };
            return Ok(NumberField::build(p, vec![root], 0, Classification::RationalInteger));
        }
        let q = RatPoly::from_int(&p);
        let g = q.gcd(&q.derivative());
        if g.degree().unwrap_or(0) > 0 {
            return Err(Error::Reducible {
                factor: g.primitive_integer().to_string(),
            });
        }
        let mut roots = roots::isolate(&p, None, ISOLATION_BITS, PRECISION_CEILING)?;
        if let Some(f) = find_factor(&p, &mut roots)? {
            return Err(Error::Reducible {
                factor: f.to_string(),
            });
        }
        let beta = locate_beta(&p, &mut roots)?;
        let class = classify(&p, &mut roots, beta)?;
        Ok(NumberField::build(p, roots, beta, class))
    }

    fn build(min_poly: IntPoly, roots: Vec<RootDisk>, beta: usize, class: Classification) -> Self {
        NumberField {
            inner: Arc::new(Inner {
                min_poly,
                roots,
                beta,
                class,
            }),
        }
    }

    pub fn min_poly(&self) -> &IntPoly {
        &self.inner.min_poly
    }

    pub fn degree(&self) -> usize {
        self.inner.roots.len()
    }

    pub fn roots(&self) -> &[RootDisk] {
        &self.inner.roots
    }

    /// 1-based index of β among [`roots`](Self::roots).
    pub fn beta_index(&self) -> usize {
        self.inner.beta + 1
    }

    /// 1-based indices of the conjugates other than β.
    pub fn conjugate_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.degree()).filter(move |&i| i != self.beta_index())
    }

    pub fn classification(&self) -> Classification {
        self.inner.class
    }

    pub fn precision_ceiling(&self) -> u64 {
        PRECISION_CEILING
    }

    pub fn is_integer(&self) -> bool {
        self.degree() == 1
    }

    pub fn same_as(&self, other: &NumberField) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.min_poly == other.inner.min_poly
    }

    /// Enclosure of the root with 1-based `index`, radius at most
    /// `2^{-prec}·max(1, |ρ|)`.
    pub fn root_ball(&self, index: usize, prec: u64) -> Result<CBall> {
        if index == 0 || index > self.degree() {
            return invalid(format!("root index {index} outside 1..={}", self.degree()));
        }
        let disk = &self.inner.roots[index - 1];
        let scale = disk.abs_upper().max(Dyadic::one());
        if disk.radius <= &Dyadic::pow2(-(prec as i64)) * &scale {
            return Ok(disk.to_cball(prec));
        }
        let fine = roots::isolate(&self.inner.min_poly, Some(&self.inner.roots), prec, PRECISION_CEILING)?;
        Ok(fine[index - 1].to_cball(prec))
    }

    /// All roots refined to `prec` bits in one pass.
    pub fn all_root_balls(&self, prec: u64) -> Result<Vec<CBall>> {
        let fine = roots::isolate(&self.inner.min_poly, Some(&self.inner.roots), prec, PRECISION_CEILING)?;
        Ok(fine.iter().map(|d| d.to_cball(prec)).collect())
    }

    pub fn beta_ball(&self, prec: u64) -> Result<Ball> {
        Ok(self.root_ball(self.beta_index(), prec)?.re)
    }

    /// Whether β > √φ, decided by the sign of β⁴ − β² − 1.
    pub fn threshold_check(&self) -> bool {
        let t = IntPoly::new([-1, 0, -1, 0, 1].map(BigInt::from).to_vec());
        let g = RatPoly::from_int(self.min_poly()).gcd(&RatPoly::from_int(&t));
        if g.degree().unwrap_or(0) > 0 {
            return false;
        }
        let mut prec = 64;
        loop {
            let b = self.beta_ball(prec).expect("β refinement within the precision ceiling");
            let v = t.eval_with(&b, |c| Ball::from_int(c.clone()));
            if v.is_positive() {
                return true;
            }
            if v.is_negative() {
                return false;
            }
            prec *= 2;
        }
    }

    pub fn element(&self, coords: Vec<BigInt>) -> Result<FieldElement> {
        let d = self.degree();
        if coords.len() > d {
            return invalid(format!("{} coordinates given for a degree-{d} field", coords.len()));
        }
        let mut c = coords;
        c.resize(d, BigInt::zero());
        Ok(FieldElement::from_parts(self.clone(), c))
    }

    pub fn from_int(&self, v: impl Into<BigInt>) -> FieldElement {
        let mut c = vec![BigInt::zero(); self.degree()];
        c[0] = v.into();
        FieldElement::from_parts(self.clone(), c)
    }

    pub fn zero(&self) -> FieldElement {
        self.from_int(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// The generator β (equal to the integer β when `d = 1`).
    pub fn beta(&self) -> FieldElement {
        if self.degree() == 1 {
            return self.from_int(-self.min_poly().coeff(0));
        }
        let mut c = vec![BigInt::zero(); self.degree()];
        c[1] = BigInt::one();
        FieldElement::from_parts(self.clone(), c)
    }

    pub fn record(&self) -> FieldRecord {
        let prec = 80;
        let beta = self
            .beta_ball(prec)
            .unwrap_or_else(|_| self.inner.roots[self.inner.beta].to_cball(prec).re);
        FieldRecord {
            min_poly: self.min_poly().coeffs().iter().map(ToString::to_string).collect(),
            degree: self.degree(),
            classification: self.classification(),
            beta_index: self.beta_index(),
            beta: beta.to_record(20),
            roots: self
                .inner
                .roots
                .iter()
                .map(|r| {
                    let c = r.to_cball(prec);
                    RootRecord {
                        re: c.re.to_record(20),
                        im: c.im.to_record(20),
                    }
                })
                .collect(),
        }
    }
}

pub fn parse_field<I: Into<BigInt>>(coeffs: impl IntoIterator<Item = I>) -> Result<NumberField> {
    NumberField::parse(coeffs)
}

fn refine(p: &IntPoly, roots: &mut Vec<RootDisk>, bits: u64) -> Result<()> {
    *roots = roots::isolate(p, Some(roots), bits, PRECISION_CEILING)?;
    Ok(())
}

fn current_bits(roots: &[RootDisk]) -> u64 {
    roots
        .iter()
        .map(|r| {
            if r.radius.is_zero() {
                ISOLATION_BITS
            } else {
                (-r.radius.log2_abs()).max(ISOLATION_BITS as f64) as u64
            }
        })
        .min()
        .unwrap_or(ISOLATION_BITS)
}

/// Groups of root indices closed under complex conjugation.
fn conjugation_groups(roots: &[RootDisk]) -> Option<Vec<Vec<usize>>> {
    let mut used = vec![false; roots.len()];
    let mut groups = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        if roots[i].is_real() {
            groups.push(vec![i]);
            continue;
        }
        let mirror = RootDisk {
            im: -&roots[i].im,
            ..roots[i].clone()
        };
        let hits: Vec<usize> = (0..roots.len())
            .filter(|&j| j != i && !roots[j].is_real())
            .filter(|&j| {
                let gap = (&(&mirror.re - &roots[j].re).abs() + &(&mirror.im - &roots[j].im).abs())
                    .clone();
                gap <= (&mirror.radius + &roots[j].radius).mul_pow2(1)
            })
            .collect();
        if hits.len() != 1 || used[hits[0]] {
            return None;
        }
        used[hits[0]] = true;
        groups.push(vec![i, hits[0]]);
    }
    Some(groups)
}

enum Recombine {
    Factor(IntPoly),
    None,
    Ambiguous,
}

fn try_subset(p: &IntPoly, roots: &[CBall], idx: &[usize], prec: u64) -> Recombine {
    let one = CBall::real(Ball::one().with_prec(prec));
    let mut prod = vec![one];
    for &i in idx {
        let mut next = vec![CBall::real(Ball::zero().with_prec(prec)); prod.len() + 1];
        for (k, c) in prod.iter().enumerate() {
            next[k + 1] = &next[k + 1] + c;
            next[k] = &next[k] - &(c * &roots[i]);
        }
        prod = next;
    }
    let mut coeffs = Vec::with_capacity(prod.len());
    let mut ambiguous = false;
    let half = Dyadic::pow2(-1);
    for c in &prod {
        if !c.im.contains_zero() {
            return Recombine::None;
        }
        let cand = (c.re.mid() + &half).floor();
        if !c.re.contains(&Dyadic::from_int(cand.clone())) {
            return Recombine::None;
        }
        if c.re.rad() >= &half {
            ambiguous = true;
        }
        coeffs.push(cand);
    }
    let cand = IntPoly::new(coeffs);
    match p.rem(&cand) {
        Some(r) if r.is_zero() => Recombine::Factor(cand),
        _ if ambiguous => Recombine::Ambiguous,
        _ => Recombine::None,
    }
}

/// Searches for a proper monic factor by recombining certified roots.
fn find_factor(p: &IntPoly, roots: &mut Vec<RootDisk>) -> Result<Option<IntPoly>> {
    let d = roots.len();
    let max_mod = roots
        .iter()
        .map(|r| r.abs_upper().log2_abs().max(0.0))
        .fold(0.0, f64::max);
    let mut bits = ISOLATION_BITS + (d as f64 * (max_mod + 1.0)) as u64 + 2 * d as u64;
    loop {
        if current_bits(roots) < bits {
            refine(p, roots, bits)?;
        }
        let groups = match conjugation_groups(roots) {
            Some(g) => g,
            None => {
                bits *= 2;
                continue;
            }
        };
        let balls: Vec<CBall> = roots.iter().map(|r| r.to_cball(bits + 32)).collect();
        let mut ambiguous = false;
        let mut chosen = Vec::new();
        let mut found = None;
        search(p, &balls, &groups, 0, &mut chosen, d / 2, bits + 32, &mut ambiguous, &mut found);
        if found.is_some() {
            return Ok(found);
        }
        if !ambiguous {
            return Ok(None);
        }
        if bits >= PRECISION_CEILING {
            return Err(Error::PrecisionExhausted(PRECISION_CEILING));
        }
        bits *= 2;
    }
}

#[allow(clippy::too_many_arguments)]
fn search(
    p: &IntPoly,
    balls: &[CBall],
    groups: &[Vec<usize>],
    from: usize,
    chosen: &mut Vec<usize>,
    max_size: usize,
    prec: u64,
    ambiguous: &mut bool,
    found: &mut Option<IntPoly>,
) {
    for g in from..groups.len() {
        if found.is_some() {
            return;
        }
        if chosen.len() + groups[g].len() > max_size {
            continue;
        }
        chosen.extend(&groups[g]);
        match try_subset(p, balls, chosen, prec) {
            Recombine::Factor(f) => *found = Some(f),
            Recombine::Ambiguous => *ambiguous = true,
            Recombine::None => {}
        }
        search(p, balls, groups, g + 1, chosen, max_size, prec, ambiguous, found);
        for _ in 0..groups[g].len() {
            chosen.pop();
        }
    }
}

fn locate_beta(p: &IntPoly, roots: &mut Vec<RootDisk>) -> Result<usize> {
    let one = Dyadic::one();
    loop {
        let mut undecided = false;
        let mut best: Option<usize> = None;
        for (i, r) in roots.iter().enumerate().filter(|(_, r)| r.is_real()) {
            let lo = &r.re - &r.radius;
            let hi = &r.re + &r.radius;
            if lo > one {
                if best.is_none_or(|b| roots[b].re < r.re) {
                    best = Some(i);
                }
            } else if hi > one {
                undecided = true;
            }
        }
        if !undecided {
            return best.ok_or(Error::NoRealRootAboveOne);
        }
        let bits = current_bits(roots) * 2;
        if bits > PRECISION_CEILING {
            return Err(Error::PrecisionExhausted(PRECISION_CEILING));
        }
        refine(p, roots, bits)?;
    }
}

fn is_palindromic(p: &IntPoly) -> bool {
    p.reversed() == *p && p.coeff(0).is_one()
}

/// Trace polynomial `Q` with `x^{-h} p(x) = Q(x + 1/x)` for palindromic `p`
/// of degree `2h`.
fn trace_polynomial(p: &IntPoly) -> IntPoly {
    let h = p.degree().unwrap_or(0) / 2;
    let y = IntPoly::new(vec![BigInt::zero(), BigInt::one()]);
    let mut v_prev = IntPoly::constant(BigInt::from(2));
    let mut v = y.clone();
    let mut q = IntPoly::constant(p.coeff(h));
    for j in 1..=h {
        q = &q + &v.scale(&p.coeff(h + j));
        let next = &(&y * &v) - &v_prev;
        v_prev = v;
        v = next;
    }
    q
}

fn is_salem(p: &IntPoly) -> bool {
    let d = p.degree().unwrap_or(0);
    if d < 4 || d % 2 == 1 || !is_palindromic(p) {
        return false;
    }
    let q = RatPoly::from_int(&trace_polynomial(p));
    let two = BigRational::from_integer(BigInt::from(2));
    let mut inside = count_real_roots(&q, &-two.clone(), &two);
    if q.eval(&two).is_zero() {
        inside -= 1;
    }
    inside == d / 2 - 1
}

fn classify(p: &IntPoly, roots: &mut Vec<RootDisk>, beta: usize) -> Result<Classification> {
    if is_salem(p) {
        return Ok(Classification::Salem);
    }
    let one = Dyadic::one();
    loop {
        let mut undecided = false;
        let mut outside = false;
        for (i, r) in roots.iter().enumerate() {
            if i == beta {
                continue;
            }
            if r.abs_upper() < one {
                continue;
            }
            if r.abs_lower() > one {
                outside = true;
            } else {
                undecided = true;
            }
        }
        if outside {
            return Ok(Classification::Other);
        }
        if !undecided {
            return Ok(Classification::Pisot);
        }
        // |ρ| = 1 forces a palindromic polynomial, handled above for d ≥ 4
        if is_palindromic(p) && p.degree() != Some(2) {
            return Ok(Classification::Other);
        }
        let bits = current_bits(roots) * 2;
        if bits > PRECISION_CEILING {
            return Err(Error::PrecisionExhausted(PRECISION_CEILING));
        }
        refine(p, roots, bits)?;
    }
}
