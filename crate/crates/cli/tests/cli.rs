use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_tmpow"))
        .args(args)
        .arg("--quiet")
        .output()
        .unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

fn strip_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn witness_k3() {
    let (code, v) = run(&["witness", "--k", "3"]);
    assert_eq!(code, 0);
    let w = &v["report"]["witness"];
    assert_eq!(w["m"], "2");
    assert_eq!(w["n"], "2");
    assert_eq!(w["x"], "23");
    assert_eq!(w["y"], "349");
    assert_eq!(w["z"], "1047");
    assert_eq!(v["config"]["command"]["k"], "3");
}

#[test]
fn special_points_k2() {
    let (code, v) = run(&["verify-lemmas", "--k", "2", "--lemma", "2.3"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["reports"].as_array().unwrap().len(), 1);
    assert_eq!(v["report"]["N"], "15");
}

#[test]
fn residual_at_two_is_exact() {
    let (code, v) = run(&["residual", "--k", "2", "--field", "2", "--coeffs", "0,1", "--N", "12"]);
    assert_eq!(code, 0);
    let r = &v["report"]["residual"];
    assert_eq!(r["exact"], true);
    assert_eq!(r["belowThreshold"], true);
    // an exact dyadic; the radius only covers the decimal rounding of the center
    let exp = |s: &Value| s.as_str().unwrap().split('e').nth(1).unwrap().parse::<i64>().unwrap();
    assert!(exp(&r["S"]["radius"]) <= exp(&r["S"]["center"]) - 18);
}

#[test]
fn strict_rejects_below_threshold() {
    let (code, _) = run(&["residual", "--k", "2", "--field", "2", "--coeffs", "0,1", "--N", "12", "--strict"]);
    assert_eq!(code, 2);
}

#[test]
fn negative_coefficients_parse() {
    let (code, v) = run(&["residual", "--k", "2", "--field", "-1,-1,1", "--coeffs", "1,-1:1", "--N", "15"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["field"]["classification"], "pisot");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["witness"]).0, 2);
    assert_eq!(run(&["witness", "--k", "1"]).0, 2);
    assert_eq!(run(&["residual", "--k", "2", "--field", "1,0,1", "--coeffs", "0,1", "--N", "15"]).0, 2);
}

#[test]
fn norm_audit_golden() {
    let (code, v) = run(&["norm-audit", "--k", "2", "--field", "golden", "--coeffs", "0,1", "--N", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["audit"]["N0"], "6");
}

#[test]
fn beta_expand_third() {
    let (code, v) = run(&["beta-expand", "--field", "2", "--num", "1", "--den", "3", "--digits", "50"]);
    assert_eq!(code, 0);
    let e = &v["report"]["expansion"];
    assert_eq!(e["preperiod"], "0");
    assert_eq!(e["period"], "2");
}

#[test]
fn stats_csv() {
    let out = Command::new(env!("CARGO_BIN_EXE_tmpow"))
        .args(["stats", "complexity", "--k", "3", "--m-max", "4", "--prefix-len", "4096", "--format", "csv", "-q"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,count,bound,margin"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn stats_json_subcommands() {
    let (code, v) = run(&["stats", "cubefree", "--prefix-len", "10000"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["cubeFree"], true);
    let (code, v) = run(&["stats", "frequencies", "--k", "2", "--m", "2", "--prefix-len", "1000"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["windows"], "999");
    let (code, v) = run(&["stats", "affine", "--q1", "1", "--q2", "1/2", "--digits", "2000", "--m-max", "8"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["rows"].as_array().unwrap().len(), 8);
}

#[test]
fn deterministic_apart_from_timings() {
    let args = ["residual", "--k", "2", "--field", "golden", "--coeffs", "0,1", "--N", "15"];
    let (_, a) = run(&args);
    let mut with_workers = args.to_vec();
    with_workers.extend(["--workers", "1"]);
    let (_, b) = run(&with_workers);
    let a = strip_timings(a);
    let mut b = strip_timings(b);
    b["config"]["workers"] = Value::Null;
    assert_eq!(a, b);
}
