//! Acceptance criteria 1–11, one line each. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;
use tmpow::approx::{
    build_approx, norm_contradiction_check, residual_direct, residual_full, residual_series,
    residual_truncated, LinearForm, NormAuditOptions, ResidualOptions, DEFAULT_TERM_BUDGET,
};
use tmpow::betaexp::{beta_expand, reconstruct_exact};
use tmpow::dyadic::Dyadic;
use tmpow::field::{Classification, NumberField};
use tmpow::lemma::{JSelection, LemmaLab};
use tmpow::seqstats::{block_frequencies, cube_free_check, moshe_check, subword_complexity, tm_prefix};
use tmpow::witness::{
    check_tm_identities, min_valid_n, shift_witness, verify_congruence, witness_invariants_hold,
};

// Pinned tolerances and budgets.
const WITNESS_TIME: Duration = Duration::from_secs(1);
const LEMMA22_TIME: Duration = Duration::from_secs(30);
const LEMMA23_TIME: Duration = Duration::from_secs(5);
const LEMMA24_TIME: Duration = Duration::from_secs(600);
const RESIDUAL_TIME: Duration = Duration::from_secs(300);
const STATS_TIME: Duration = Duration::from_secs(600);
const RESIDUAL_TOL_BITS: u64 = 64;
const MAX_PRECISION_BITS: u64 = 32_768;
const LEMMA24_SAMPLES: u64 = 1_000_000;
const ORACLE_TOL_BITS: u64 = 96;
const ORACLE_EXTRA_TERMS: u64 = 256;
const NORM_PRECISION: u64 = 128;

fn golden() -> NumberField {
    NumberField::parse([-1, -1, 1]).unwrap()
}

fn two() -> NumberField {
    NumberField::integer(2).unwrap()
}

fn single_thread<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(f)
}

fn c1() -> (bool, String) {
    let t = Instant::now();
    let bad: Vec<u32> = (2..=64)
        .filter(|&k| {
            let w = shift_witness(k).unwrap();
            !(verify_congruence(k, w.m, w.n, &w.x) && witness_invariants_hold(&w) && check_tm_identities(&w))
        })
        .collect();
    let dt = t.elapsed();
    (
        bad.is_empty() && dt < WITNESS_TIME,
        format!("witness suite k = 2..64, failures {bad:?}, {:.3} s (< 1 s)", dt.as_secs_f64()),
    )
}

fn c2() -> (bool, String) {
    let w = shift_witness(2).unwrap();
    let t = Instant::now();
    let r = single_thread(|| {
        LemmaLab::new(&w, 15)
            .unwrap()
            .shift_invariance(&JSelection::Auto {
                budget: u64::MAX,
                seed: 0,
            })
            .unwrap()
    });
    let dt = t.elapsed();
    let expect = (1u64 << 15) + (1 << 12) + 1;
    (
        min_valid_n(&w) == 15 && !r.sampled && r.j_tested == expect && r.passed() && dt < LEMMA22_TIME,
        format!(
            "shift invariance k = 2, N = 15 exhaustive: {} j, {} failures, {:.2} s single-threaded (< 30 s)",
            r.j_tested,
            r.j_failed.len(),
            dt.as_secs_f64()
        ),
    )
}

fn c3() -> (bool, String) {
    let t = Instant::now();
    let mut ok = true;
    let mut signs = Vec::new();
    for k in [2, 3, 4, 5, 8] {
        let w = shift_witness(k).unwrap();
        let r = LemmaLab::new(&w, min_valid_n(&w)).unwrap().special_points();
        ok &= r.passed();
        signs.push(format!("k={k}:N={},u={}", r.n, r.observed_sign.unwrap()));
    }
    let dt = t.elapsed();
    (
        ok && dt < LEMMA23_TIME,
        format!("special points {}, {:.2} s (< 5 s)", signs.join(" "), dt.as_secs_f64()),
    )
}

fn c4() -> (bool, String) {
    let t = Instant::now();
    let w2 = shift_witness(2).unwrap();
    let a = LemmaLab::new(&w2, 15)
        .unwrap()
        .lower_powers(
            1,
            &JSelection::Auto {
                budget: u64::MAX,
                seed: 0,
            },
        )
        .unwrap();
    let full = !a.sampled && a.j_tested == (1 << 22) + 1;
    let w3 = shift_witness(3).unwrap();
    let lab3 = LemmaLab::new(&w3, min_valid_n(&w3)).unwrap();
    let sel = JSelection::Auto {
        budget: LEMMA24_SAMPLES,
        seed: 0,
    };
    let b: Vec<_> = [1, 2].iter().map(|&r| lab3.lower_powers(r, &sel).unwrap()).collect();
    let dt = t.elapsed();
    let ok = full
        && a.passed()
        && b.iter().all(|r| r.passed() && r.j_tested == LEMMA24_SAMPLES)
        && dt < LEMMA24_TIME;
    (
        ok,
        format!(
            "lower powers k = 2 r = 1 N = 15: {} j, {} failures; k = 3 N = {} r = 1, 2: {} + {} samples, {} failures; {:.1} s",
            a.j_tested,
            a.j_failed.len(),
            lab3.n(),
            b[0].j_tested,
            b[1].j_tested,
            b[0].j_failed.len() + b[1].j_failed.len(),
            dt.as_secs_f64()
        ),
    )
}

fn c5() -> (bool, String) {
    let w = shift_witness(2).unwrap();
    let form = LinearForm::from_ints(&golden(), &[0, 1]).unwrap();
    let opts = ResidualOptions {
        tol_bits: RESIDUAL_TOL_BITS,
        ..ResidualOptions::default()
    };
    let t = Instant::now();
    let r = residual_series(&w, &form, 15, &opts).unwrap();
    let dt = t.elapsed();
    let lower = r.check("lower-bound").unwrap();
    let pos = r.check("positivity").unwrap();
    let threshold = &r.lower_const - &r.eps_n;
    (
        lower.passed
            && pos.passed
            && r.scaled.prec() <= MAX_PRECISION_BITS
            && r.s.prec() <= MAX_PRECISION_BITS
            && dt < RESIDUAL_TIME,
        format!(
            "golden k = 2 N = 15: |S|φ^(2^N) ∈ {} ≥ lowerConst − ε_N = {:.12}, S excludes 0: {}, {:.2} s",
            fmt_ball(&r.scaled),
            threshold.to_f64(),
            pos.passed,
            dt.as_secs_f64()
        ),
    )
}

fn fmt_ball(b: &tmpow::ball::Ball) -> String {
    let r = b.to_record(14);
    format!("{} ± {}", r.center, r.radius)
}

fn c6() -> (bool, String) {
    let w = shift_witness(2).unwrap();
    let opts = ResidualOptions {
        allow_below_threshold: true,
        ..ResidualOptions::default()
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for f in [two(), golden()] {
        let form = LinearForm::from_ints(&f, &[0, 1]).unwrap();
        for n in 12..=15 {
            let r = residual_series(&w, &form, n, &opts).unwrap();
            let log_c = r.c.to_f64().ln() / r.beta.to_f64().ln();
            let in_window = r.decay_offset >= -2.0 && r.decay_offset <= log_c;
            ok &= r.check("upper-bound").unwrap().passed && r.check("decay-window").unwrap().passed && in_window;
            parts.push(format!("β={:.3} N={n}: {:.4}", r.beta.to_f64(), r.decay_offset));
        }
    }
    (ok, format!("|S|β^(2^N) ≤ C and log_β(1/|S|) − 2^N in [−2, log_β C]: {}", parts.join(", ")))
}

fn c7() -> (bool, String) {
    let w = shift_witness(2).unwrap();
    let mut ok = true;
    let mut exact = true;
    for f in [two(), golden()] {
        let form = LinearForm::from_ints(&f, &[0, 1]).unwrap();
        for n in 3..=5 {
            let pair = build_approx(&w, &form, n, DEFAULT_TERM_BUDGET).unwrap();
            let t = 2 * pair.half_degree_u64().unwrap() + ORACLE_EXTRA_TERMS;
            let direct = residual_direct(&pair, t, ORACLE_TOL_BITS).unwrap();
            let lift = ((1u64 << n) as f64 * f.beta_ball(64).unwrap().to_f64().log2()).ceil() as u64;
            let series = residual_full(&w, &form, n, ORACLE_EXTRA_TERMS, ORACLE_TOL_BITS + lift).unwrap();
            ok &= direct.enclosure.overlaps(&series);
            let trunc = residual_truncated(&pair, t, ORACLE_TOL_BITS).unwrap();
            if f.is_integer() {
                exact &= trunc.is_exact() && direct.truncated.is_exact() && trunc.mid() == direct.truncated.mid();
            } else {
                ok &= trunc.overlaps(&direct.truncated);
            }
        }
    }
    (
        ok && exact,
        format!("direct vs series enclosures overlap for β ∈ {{2, φ}}, N = 3..5: {ok}; bit-equal dyadics at β = 2: {exact}"),
    )
}

fn c8() -> (bool, String) {
    let g = golden();
    let p = NumberField::parse([-1, -1, 0, 1]).unwrap();
    let l = NumberField::parse([1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]).unwrap();
    let i = two();
    let ok = g.classification() == Classification::Pisot
        && g.threshold_check()
        && p.classification() == Classification::Pisot
        && p.threshold_check()
        && l.classification() == Classification::Salem
        && !l.threshold_check()
        && i.classification() == Classification::RationalInteger
        && g.beta().norm() == BigInt::from(-1);
    (
        ok,
        format!(
            "golden {}/{}, plastic {}/{}, Lehmer {}/{}, x−2 {}, N(β) = {} in golden field",
            g.classification(),
            g.threshold_check(),
            p.classification(),
            p.threshold_check(),
            l.classification(),
            l.threshold_check(),
            i.classification(),
            g.beta().norm()
        ),
    )
}

fn c9() -> (bool, String) {
    let w = shift_witness(2).unwrap();
    let form = LinearForm::from_ints(&golden(), &[0, 1]).unwrap();
    let audit = |a: i64, b: i64, n: u64, budget: u64| {
        norm_contradiction_check(
            &w,
            &form,
            n,
            &NormAuditOptions {
                xi_coords: vec![BigInt::from(a), BigInt::from(b)],
                precision: NORM_PRECISION,
                term_budget: budget,
                ..NormAuditOptions::default()
            },
        )
        .unwrap()
    };
    let base = audit(10, 10, 15, 0);
    let mut ok = base.passed();
    let mut worst = 0;
    for a in -10..=10 {
        for b in -10..=10 {
            let r = audit(a, b, 4, 1 << 12);
            let n0 = r.n0.unwrap_or(u64::MAX);
            worst = worst.max(n0);
            ok &= r.passed()
                && r.lhs_at_n0.as_ref().unwrap().upper() < Dyadic::one()
                && n0 <= base.n0.unwrap();
        }
    }
    (
        ok,
        format!(
            "golden, |A_i| ≤ 10: N₀ = {:?} (max over grid {worst}), 1 > lhs(N₀) ∈ {}, valid from N = {:?}",
            base.n0,
            fmt_ball(base.lhs_at_n0.as_ref().unwrap()),
            base.n0_valid
        ),
    )
}

fn c10() -> (bool, String) {
    let t = Instant::now();
    let m2 = moshe_check(2, 8, 1 << 26).unwrap();
    let all_words = m2.rows.iter().all(|r| r.count == 1 << r.m);
    let tw = tm_prefix(1, 1 << 20).unwrap();
    let ct = subword_complexity(&tw, 16).unwrap();
    let linear = ct.rows.iter().all(|r| r.count <= 4 * r.m as u64);
    let cube_free = cube_free_check(1_000_000).unwrap();
    let mut trend = true;
    let mut devs = Vec::new();
    for m in 1..=6 {
        let small = block_frequencies(2, m, 1 << 16).unwrap().max_deviation;
        let large = block_frequencies(2, m, 1 << 24).unwrap().max_deviation;
        trend &= large < small;
        devs.push(format!("m={m}: {small:.2e}→{large:.2e}"));
    }
    let dt = t.elapsed();
    (
        all_words && linear && cube_free && trend && dt < STATS_TIME,
        format!(
            "p_t²(m) = 2^m for m ≤ 8: {all_words}; p_t(m) ≤ 4m for m ≤ 16: {linear}; cube-free 10⁶: {cube_free}; deviation 2^16→2^24 {}; {:.1} s",
            devs.join(" "),
            dt.as_secs_f64()
        ),
    )
}

fn c11() -> (bool, String) {
    let b = two();
    let third = beta_expand(&b.from_int(1), &BigInt::from(3), 1000).unwrap();
    let ok1 = third.detect_period() == Some((0, 2))
        && reconstruct_exact(&b.from_int(1), &BigInt::from(3), &third).unwrap();
    let g = golden();
    let x = g.element(vec![BigInt::from(-1), BigInt::one()]).unwrap();
    let e = beta_expand(&x, &BigInt::one(), 1000).unwrap();
    let ok2 = e.digits.first() == Some(&BigInt::one())
        && e.terminating
        && e.detect_period() == Some((1, 1))
        && reconstruct_exact(&x, &BigInt::one(), &e).unwrap();
    (
        ok1 && ok2,
        format!(
            "1/3 base 2: digits {:?} period {:?}; β − 1 at φ: digits {:?} period {:?}; reconstruction exact",
            third.digits.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            third.detect_period(),
            e.digits.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            e.detect_period()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> (bool, String)); 11] = [
        (1, c1),
        (2, c2),
        (3, c3),
        (4, c4),
        (5, c5),
        (6, c6),
        (7, c7),
        (8, c8),
        (9, c9),
        (10, c10),
        (11, c11),
    ];
    let filter: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (i, f) in criteria {
        if !filter.is_empty() && !filter.contains(&i) {
            continue;
        }
        let (ok, detail) = f();
        println!("criterion {i:>2}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
