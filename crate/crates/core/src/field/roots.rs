//! Certified isolation of all complex roots of a squarefree integer
//! polynomial.
//!
//! Approximations come from Aberth iteration in dyadic arithmetic. For
//! distinct approximations `z_i` of a monic polynomial of degree `d`, the
//! Weierstrass corrections `W_i = p(z_i) / Π_{j≠i} (z_i − z_j)` give disks
//! `|z − z_i| ≤ d·|W_i|`; when these are pairwise disjoint each holds exactly
//! one root. A disk centred on the real axis then holds a real root.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::ball::{Ball, CBall};
use crate::dyadic::{Dyadic, Round};
use crate::poly::count_all_real_roots;
use crate::{IntPoly, RatPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDisk {
    pub re: Dyadic,
    pub im: Dyadic,
    pub radius: Dyadic,
}

impl RootDisk {
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Rectangular ball containing the disk; the imaginary part is exactly
    /// zero for real roots.
    pub fn to_cball(&self, prec: u64) -> CBall {
        let re = Ball::new(self.re.clone(), self.radius.clone(), prec);
        let im = if self.is_real() {
            Ball::zero().with_prec(prec)
        } else {
            Ball::new(self.im.clone(), self.radius.clone(), prec)
        };
        CBall::new(re, im)
    }

    fn center(&self, prec: u64) -> CBall {
        CBall::exact(self.re.clone(), self.im.clone()).with_prec(prec)
    }

    /// Upper bound of `|ρ|` over the disk.
    pub fn abs_upper(&self) -> Dyadic {
        &self.center(0).abs_upper() + &self.radius
    }

    /// Lower bound of `|ρ|` over the disk (may be zero).
    pub fn abs_lower(&self) -> Dyadic {
        let v = &self.center(0).abs_lower() - &self.radius;
        if v.is_negative() {
            Dyadic::zero()
        } else {
            v
        }
    }

    fn disjoint(&self, other: &RootDisk) -> bool {
        let gap = (&self.center(0) - &other.center(0)).abs_lower();
        gap > &self.radius + &other.radius
    }
}

fn lift(c: &BigInt) -> CBall {
    CBall::real(Ball::from_int(c.clone()))
}

fn eval(p: &IntPoly, z: &CBall) -> CBall {
    p.eval_with(z, lift)
}

fn log2_rel(w: &CBall, z: &CBall) -> f64 {
    let a = w.abs_upper();
    if a.is_zero() {
        return f64::NEG_INFINITY;
    }
    let s = z.abs_upper().log2_abs().max(0.0);
    a.log2_abs() - s
}

fn initial_points(p: &IntPoly, prec: u64) -> Vec<CBall> {
    let d = p.degree().unwrap_or(0);
    // Fujiwara-style bound: 2·max |a_i|^{1/(d-i)}
    let mut r = 1.0f64;
    for (i, c) in p.coeffs().iter().enumerate().take(d) {
        if c.is_zero() {
            continue;
        }
        let bits = c.abs().bits() as f64;
        r = r.max(2f64.powf(bits / (d - i) as f64));
    }
    (0..d)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / d as f64 + 0.4;
            let re = Dyadic::from_f64(r * th.cos()).unwrap_or_else(Dyadic::zero);
            let im = Dyadic::from_f64(r * th.sin()).unwrap_or_else(Dyadic::zero);
            CBall::exact(re, im).with_prec(prec)
        })
        .collect()
}

/// Aberth sweeps at `prec` bits until corrections fall below `2^{-prec+4}`
/// relative; returns whether that happened within `max_iter`.
fn aberth(p: &IntPoly, dp: &IntPoly, zs: &mut [CBall], prec: u64, max_iter: usize) -> bool {
    let n = zs.len();
    for z in zs.iter_mut() {
        *z = z.center().with_prec(prec);
    }
    for _ in 0..max_iter {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            let pz = eval(p, &zs[i]);
            if pz.is_zero() {
                continue;
            }
            let Some(ratio) = eval(dp, &zs[i]).recip().map(|r| &pz * &r) else {
                continue;
            };
            let mut s = CBall::real(Ball::zero().with_prec(prec));
            for j in 0..n {
                if j != i {
                    if let Some(inv) = (&zs[i] - &zs[j]).recip() {
                        s = &s + &inv;
                    }
                }
            }
            let den = &CBall::real(Ball::one().with_prec(prec)) - &(&ratio * &s);
            let w = den.recip().map(|r| &ratio * &r).unwrap_or(ratio).center();
            worst = worst.max(log2_rel(&w, &zs[i]));
            zs[i] = (&zs[i] - &w).center();
        }
        if worst < -(prec as f64) + 4.0 {
            return true;
        }
    }
    false
}

/// Attempts certification at `prec` bits; `None` if the disks are not yet
/// separated.
fn certify(p: &IntPoly, zs: &[CBall], prec: u64) -> Option<Vec<RootDisk>> {
    let n = zs.len();
    let snap = Dyadic::pow2(-(prec as i64) / 2);
    let pts: Vec<CBall> = zs
        .iter()
        .map(|z| {
            let scale = z.re.mid().abs().max(Dyadic::one());
            if z.im.mid().abs() <= &snap * &scale {
                CBall::exact(z.re.mid().clone(), Dyadic::zero()).with_prec(prec)
            } else {
                z.center()
            }
        })
        .collect();
    let deg = Dyadic::from_int(n as u64);
    let mut disks = Vec::with_capacity(n);
    for i in 0..n {
        let mut den = CBall::real(Ball::one().with_prec(prec));
        for j in 0..n {
            if j != i {
                den = &den * &(&pts[i] - &pts[j]);
            }
        }
        let w = eval(p, &pts[i]).div(&den)?;
        let radius = (&deg * &w.abs_upper()).round(32, Round::Up);
        let disk = RootDisk {
            re: pts[i].re.mid().clone(),
            im: pts[i].im.mid().clone(),
            radius,
        };
        if !disk.is_real() && disk.im.abs() <= disk.radius {
            return None;
        }
        disks.push(disk);
    }
    for i in 0..n {
        for j in i + 1..n {
            if !disks[i].disjoint(&disks[j]) {
                return None;
            }
        }
    }
    Some(disks)
}

fn fine_enough(disks: &[RootDisk], target: u64) -> bool {
    disks.iter().all(|d| {
        let scale = d.abs_upper().max(Dyadic::one());
        d.radius <= &Dyadic::pow2(-(target as i64)) * &scale
    })
}

/// Isolates all roots with radii at most `2^{-target}·max(1, |ρ|)`.
///
/// `start` seeds the iteration (e.g. coarser disks); with `start` given, the
/// result keeps its order. The polynomial must be monic and squarefree.
pub(crate) fn isolate(
    p: &IntPoly,
    start: Option<&[RootDisk]>,
    target: u64,
    ceiling: u64,
) -> crate::Result<Vec<RootDisk>> {
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return Ok(Vec::new());
    }
    let dp = p.derivative();
    let mut zs: Vec<CBall> = match start {
        Some(s) => s.iter().map(|r| r.center(64)).collect(),
        None => initial_points(p, 64),
    };
    if start.is_none() {
        aberth(p, &dp, &mut zs, 64, 400 + 20 * d);
    }
    let mut work = 64u64.max(target + 32);
    let mut p_cur = 64u64;
    loop {
        while p_cur < work {
            p_cur = (2 * p_cur).min(work);
            aberth(p, &dp, &mut zs, p_cur, 8);
        }
        aberth(p, &dp, &mut zs, work, 4);
        if let Some(disks) = certify(p, &zs, work) {
            let consistent = start.is_none_or(|old| {
                disks.iter().enumerate().all(|(i, nd)| {
                    old.iter()
                        .enumerate()
                        .all(|(j, od)| i == j || nd.disjoint(od))
                })
            });
            if consistent && fine_enough(&disks, target) {
                let real = disks.iter().filter(|r| r.is_real()).count();
                if real != count_all_real_roots(&RatPoly::from_int(p)) {
                    return Err(crate::Error::Invariant(
                        "real root count disagrees with Sturm count".into(),
                    ));
                }
                return Ok(disks);
            }
        }
        if work >= ceiling {
            return Err(crate::Error::PrecisionExhausted(ceiling));
        }
        work = (2 * work).min(ceiling);
        if start.is_none() && work >= 4096 {
            // a bad start can stall; restart from fresh points at high precision
            aberth(p, &dp, &mut zs, work, 200);
        }
    }
}
