use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};
use tmpow::approx::{norm_contradiction_check, residual_series, NormAuditOptions, ResidualOptions};
use tmpow::betaexp::{beta_expand, reconstruct_exact};
use tmpow::lemma::{JSelection, LemmaLab};
use tmpow::seqstats::{
    affine_complexity_compare, block_frequencies, cube_free_check, find_cube, moshe_check,
    subword_complexity, tm_prefix,
};
use tmpow::witness::{cached_witness, check_tm_identities, shift_witness, verify_congruence, witness_invariants_hold, CongruenceWitness};
use tmpow::{Error, Result};

use crate::{parse, Command, Format, LemmaArgs, LemmaChoice, StatsCommand};

pub struct Outcome {
    pub report: Value,
    pub passed: bool,
    pub csv: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn outcome(report: Value, passed: bool) -> Result<Outcome> {
    Ok(Outcome {
        report,
        passed,
        csv: None,
    })
}

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Witness(_) => "witness",
        Command::VerifyLemmas(_) => "verify-lemmas",
        Command::Residual(_) => "residual",
        Command::NormAudit(_) => "norm-audit",
        Command::BetaExpand(_) => "beta-expand",
        Command::Stats(_) => "stats",
    }
}

fn witness(k: u32) -> Result<CongruenceWitness> {
    match cached_witness(k) {
        Ok(w) => Ok(w.clone()),
        Err(_) => shift_witness(k),
    }
}

pub fn dispatch(c: &Command, format: Format) -> Result<Outcome> {
    match c {
        Command::Witness(a) => {
            let w = witness(a.k)?;
            let checks = json!({
                "congruence": verify_congruence(w.k, w.m, w.n, &w.x),
                "invariants": witness_invariants_hold(&w),
                "binaryForms": check_tm_identities(&w),
            });
            let passed = checks.as_object().unwrap().values().all(|v| v == &Value::Bool(true));
            outcome(json!({ "witness": to_value(&w.to_record()), "checks": checks }), passed)
        }
        Command::VerifyLemmas(a) => lemmas(a),
        Command::Residual(a) => {
            let f = parse::field(&a.field)?;
            let form = parse::form(&f, &a.coeffs)?;
            let w = witness(a.k)?;
            let opts = ResidualOptions {
                tol_bits: parse::tol_bits(&a.tol)?,
                sample_budget: a.sample_budget,
                seed: a.seed,
                allow_below_threshold: !a.strict,
                ..ResidualOptions::default()
            };
            let r = residual_series(&w, &form, a.n, &opts)?;
            outcome(
                json!({
                    "field": to_value(&f.record()),
                    "form": to_value(&form.record()),
                    "thresholdCheck": f.threshold_check(),
                    "residual": to_value(&r.record()),
                }),
                r.passed(),
            )
        }
        Command::NormAudit(a) => {
            let f = parse::field(&a.field)?;
            let form = parse::form(&f, &a.coeffs)?;
            let w = witness(a.k)?;
            let opts = NormAuditOptions {
                xi_coords: parse::ints(&a.xi)?,
                precision: a.precision,
                max_n: a.max_n,
                term_budget: a.term_budget,
            };
            let r = norm_contradiction_check(&w, &form, a.n, &opts)?;
            outcome(
                json!({
                    "field": to_value(&f.record()),
                    "form": to_value(&form.record()),
                    "audit": to_value(&r.record()),
                }),
                r.passed(),
            )
        }
        Command::BetaExpand(a) => {
            let f = parse::field(&a.field)?;
            let num = parse::element(&f, &a.num)?;
            let den: BigInt = a
                .den
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("not an integer: {:?}", a.den)))?;
            let e = beta_expand(&num, &den, a.digits)?;
            let ok = reconstruct_exact(&num, &den, &e)?;
            outcome(
                json!({
                    "field": to_value(&f.record()),
                    "expansion": to_value(&e),
                    "reconstructionExact": ok,
                }),
                ok,
            )
        }
        Command::Stats(s) => stats(s, format),
    }
}

fn lemmas(a: &LemmaArgs) -> Result<Outcome> {
    let w = witness(a.k)?;
    let n = a.n.unwrap_or_else(|| tmpow::witness::min_valid_n(&w));
    let lab = if a.allow_below_threshold {
        LemmaLab::unchecked(&w, n)?
    } else {
        LemmaLab::new(&w, n)?
    };
    let sel = JSelection::Auto {
        budget: a.budget,
        seed: a.seed,
    };
    let mut reports = Vec::new();
    let all = a.lemma == LemmaChoice::All;
    if all || a.lemma == LemmaChoice::Shift {
        reports.push(lab.shift_invariance(&sel)?);
    }
    if all || a.lemma == LemmaChoice::Special {
        reports.push(lab.special_points());
    }
    if all || a.lemma == LemmaChoice::Lower {
        let rs: Vec<u32> = match a.r {
            Some(r) => vec![r],
            None => (1..a.k).collect(),
        };
        for r in rs {
            reports.push(lab.lower_powers(r, &sel)?);
        }
    }
    let passed = reports.iter().all(|r| r.passed());
    outcome(
        json!({ "witness": to_value(&w.to_record()), "N": n.to_string(), "reports": to_value(&reports) }),
        passed,
    )
}

fn csv_of(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(header).expect("in-memory write");
    for r in rows {
        wtr.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn stats(s: &StatsCommand, format: Format) -> Result<Outcome> {
    let want_csv = format == Format::Csv;
    match s {
        StatsCommand::Complexity { k, m_max, prefix_len } => {
            if *k >= 2 {
                let r = moshe_check(*k, *m_max, *prefix_len)?;
                let csv = want_csv.then(|| {
                    csv_of(
                        &["m", "count", "bound", "margin"],
                        r.rows.iter().map(|x| {
                            vec![x.m.to_string(), x.count.to_string(), x.bound.to_string(), x.margin.to_string()]
                        }),
                    )
                });
                Ok(Outcome {
                    report: to_value(&r),
                    passed: r.passed,
                    csv,
                })
            } else {
                let word = tm_prefix(*k, *prefix_len)?;
                let r = subword_complexity(&word, *m_max)?;
                let csv = want_csv.then(|| {
                    csv_of(
                        &["m", "count", "bound", "margin"],
                        r.rows.iter().map(|x| {
                            vec![
                                x.m.to_string(),
                                x.count.to_string(),
                                x.bound.to_string(),
                                (x.bound as i64 - x.count as i64).to_string(),
                            ]
                        }),
                    )
                });
                Ok(Outcome {
                    passed: r.bounds_hold,
                    report: to_value(&r),
                    csv,
                })
            }
        }
        StatsCommand::Frequencies { k, m, prefix_len } => {
            let t = block_frequencies(*k, *m, *prefix_len)?;
            let passed = t.counts.iter().sum::<u64>() == t.windows;
            let csv = want_csv.then(|| {
                csv_of(
                    &["block", "count", "frequency"],
                    t.counts.iter().enumerate().map(|(b, c)| {
                        vec![
                            format!("{b:0width$b}", width = *m),
                            c.to_string(),
                            format!("{:.9}", t.frequency(b)),
                        ]
                    }),
                )
            });
            Ok(Outcome {
                report: to_value(&t),
                passed,
                csv,
            })
        }
        StatsCommand::Cubefree { prefix_len } => {
            let free = cube_free_check(*prefix_len)?;
            let cube = if free {
                None
            } else {
                find_cube(&tm_prefix(1, *prefix_len)?.bits)
            };
            outcome(
                json!({ "prefixLen": prefix_len.to_string(), "cubeFree": free, "cube": to_value(&cube) }),
                free,
            )
        }
        StatsCommand::Affine { q1, q2, base, k, digits, m_max } => {
            let xi = tm_prefix(*k, *digits)?.bits;
            let r = affine_complexity_compare(&parse::rational(q1)?, &parse::rational(q2)?, *base, &xi, *m_max)?;
            let csv = want_csv.then(|| {
                csv_of(
                    &["m", "p_xi", "p_affine", "ratio"],
                    r.rows.iter().map(|x| {
                        vec![x.m.to_string(), x.p_xi.to_string(), x.p_affine.to_string(), x.ratio.clone()]
                    }),
                )
            });
            Ok(Outcome {
                report: to_value(&r),
                passed: true,
                csv,
            })
        }
    }
}
