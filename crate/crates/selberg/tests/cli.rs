use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selberg"))
        .args(args)
        .env_remove("SELBERG_CONFIG")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn eval_w_at_half() {
    let out = run(&["eval", "--fn", "W", "--x", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let v: f64 = row[1].parse().unwrap();
    assert!((v - 8.0 / std::f64::consts::PI.powi(2)).abs() < 1e-12);
    assert!(row[2].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn eval_k_at_one_is_zero() {
    let out = run(&["eval", "--kernel", "K", "--x", "1", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["measurements"][0]["value"].as_f64(), Some(0.0));
}

#[test]
fn table_b_has_thirteen_rows() {
    let out = run(&[
        "table", "--fn", "B", "--from", "-3", "--to", "3", "--step", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,value,err_est");
    assert_eq!(lines.len(), 14);
    let origin: Vec<f64> = lines[7].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(origin[0], 0.0);
    assert!((origin[1] - 1.0).abs() < 1e-14);
}

#[test]
fn verify_kernels_passes_and_tiny_tolerance_fails() {
    let ok = run(&["verify", "--suite", "kernels"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json(&ok);
    for key in [
        "manifest",
        "checks",
        "bounds",
        "measurements",
        "verdicts",
        "runtime_ms",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let bad = run(&["verify", "--suite", "kernels", "--tol", "1e-300"]);
    assert_eq!(bad.status.code(), Some(1));
    let failed = json(&bad)["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .count();
    assert!(failed > 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        run(&["eval", "--fn", "nope", "--x", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(
        run(&["table", "--fn", "K", "--from", "1", "--to", "0", "--step", "0.1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "demo",
            "--scenario",
            "esseen1d-binomial",
            "--constant",
            "c1=0.1"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn demo_binomial_verdict() {
    let out = run(&[
        "demo",
        "--scenario",
        "esseen1d-binomial",
        "--n",
        "100",
        "--omega",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdicts"][0]["passed"], true);
    assert_eq!(v["manifest"]["parameters"]["n"], 100);
}

#[test]
fn demo_is_deterministic() {
    let args = [
        "demo",
        "--scenario",
        "clt-haar",
        "--N",
        "400",
        "--samples",
        "5000",
        "--seed",
        "7",
    ];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["runtime_ms"], Value::Null);
    let gap = &v["bounds"][0];
    assert!(gap["gap"].as_f64().unwrap() <= 1.0 / 30.0);
    assert!((gap["bound"].as_f64().unwrap() - 1.0 / 30.0).abs() < 1e-12);
}

#[test]
fn esseen_k_reduces_for_k_one() {
    let out = run(&["demo", "--scenario", "esseen-k", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .all(|x| x["passed"] == true));
}
