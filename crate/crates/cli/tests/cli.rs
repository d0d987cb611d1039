use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spectral-sk"));
    cmd.args(args).env_remove("SPECTRAL_SK_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run_config(task: &str, config: &str, extra: &[&str]) -> Output {
    let path = configs().join(config);
    let mut args = vec![task, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args, &[])
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stderr)
        .lines()
        .map(|l| serde_json::from_str(l).expect("stderr lines are JSON"))
        .collect()
}

#[test]
fn classify_branch_pair() {
    let out = run_config("classify", "classify-b2.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["result"]["kind"], "B2-branch-pair");
    assert_eq!(v["result"]["normalization_genus"], 3);
    assert_eq!(v["result"]["component_label"], serde_json::json!([1, 2]));
}

#[test]
fn classify_node() {
    let out = run_config("classify", "classify-b1.json", &["--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(1), Some("B1-node,5,4,1,1"));
}

#[test]
fn zero_potential() {
    let out = run_config("potential", "potential-zero.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_stdout(&out)["result"]["value"], 0.0);
}

#[test]
fn rank_one_potential_reports_both_routes() {
    let out = run_config("potential", "potential-n1.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_stdout(&out)["result"];
    let (a, b) = (r["value"].as_f64().unwrap(), r["k_periods"].as_f64().unwrap());
    assert!((a - b).abs() <= 1e-6 * (1.0 + a));
}

#[test]
fn metric_csv_has_square_rows() {
    let out = run_config("metric", "metric-sl2.json", &["--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "j,k,re,im,err");
    assert_eq!(lines.len(), 1 + 9);
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), 5);
    }
}

#[test]
fn periods_report_symmetric_tau() {
    let out = run_config("periods", "periods.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_stdout(&out)["result"];
    assert!(r["symmetry_defect"].as_f64().unwrap() <= 1e-8);
    assert!(r["im_tau_eigenvalues"][0].as_f64().unwrap() > 0.0);
}

#[test]
fn outputs_are_byte_identical() {
    let a = run_config("potential", "potential-gl2.json", &[]);
    let b = run_config("potential", "potential-gl2.json", &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn embedded_config_reproduces_the_report() {
    let first = run_config("potential", "potential-sl2.json", &["--tol", "1e-8"]);
    let report = json_stdout(&first);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("again.json");
    std::fs::write(&path, serde_json::to_string(&report["config"]).unwrap()).unwrap();
    let second = run(&["potential", "--config", path.to_str().unwrap()], &[]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.csv");
    let out = run_config("potential", "potential-zero.json", &["--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("route,value"));
}

#[test]
fn unknown_field_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"curve": {"branch_points": []}, "colour": "red"}"#).unwrap();
    let out = run(&["classify", "--config", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(4));
    let recs = stderr_records(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["exit_code"], 4);
}

#[test]
fn invalid_curve_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("five.json");
    std::fs::write(
        &path,
        r#"{"curve": {"branch_points": [[1,0],[2,0],[3,0],[4,0],[5,0]]}, "family": {"rank": 2, "a2": [[1,0]]}}"#,
    )
    .unwrap();
    let out = run(&["classify", "--config", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn exhausted_budget_is_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tiny.json");
    let base = std::fs::read_to_string(configs().join("potential-sl2.json")).unwrap();
    let mut v: Value = serde_json::from_str(&base).unwrap();
    v["numeric"] = serde_json::json!({"tol": 1e-10, "max_cells": 10});
    std::fs::write(&path, v.to_string()).unwrap();
    let out = run(&["potential", "--config", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_records(&out)[0]["kind"], "non-convergence");
}

#[test]
fn thread_cap_is_validated() {
    let path = configs().join("potential-zero.json");
    let p = path.to_str().unwrap();
    let bad = run(&["potential", "--config", p], &[("SPECTRAL_SK_THREADS", "0")]);
    assert_eq!(bad.status.code(), Some(4));
    let good = run(&["potential", "--config", p], &[("SPECTRAL_SK_THREADS", "2")]);
    assert_eq!(good.status.code(), Some(0));
}

#[test]
fn tolerance_flag_out_of_range() {
    let out = run_config("potential", "potential-zero.json", &["--tol", "1e-14"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn validate_shipped_fixtures() {
    let out = run_config("validate", "validate.json", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &json_stdout(&out)["result"];
    let summary = r["summary"].as_array().unwrap();
    for id in 1..=11 {
        let tag = format!("criterion {id:>2} ");
        assert!(summary.iter().any(|l| l.as_str().unwrap().starts_with(&tag)), "missing {tag}");
    }
    assert!(r["goldens"].as_array().unwrap().iter().all(|g| g["passed"] == true));
}
