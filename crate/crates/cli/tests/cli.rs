//! End-to-end checks of the `qpartial` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qpartial(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpartial")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fair_coin_terminates() {
    let dir = TempDir::new().unwrap();
    let prog = write(&dir, "coin.ql", "qubit q;\nh q;\nwhile q in |1> { h q; }\n");
    let out = qpartial(&["run", s(&prog)]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert!(report["residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(report["converged"], true);
    assert_eq!(report["output"]["dim"], 2);
    assert_eq!(report["iterations_per_loop"].as_array().unwrap().len(), 1);
}

#[test]
fn diverging_loop_keeps_all_mass_missing() {
    let dir = TempDir::new().unwrap();
    let prog = write(&dir, "spin.ql", "qubit q; while q in |0> { skip; }");
    let out = qpartial(&["run", s(&prog)]);
    assert_eq!(json(&out)["residual"].as_f64(), Some(1.0));
}

#[test]
fn explicit_input_state() {
    let dir = TempDir::new().unwrap();
    let prog = write(&dir, "x.ql", "qubit q; x q;");
    let input = write(&dir, "in.json", r#"{"dim": 2, "re": [[0.25, 0], [0, 0.5]]}"#);
    let out = qpartial(&["run", s(&prog), "--input", s(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let re = &json(&out)["output"]["re"];
    assert_eq!(re[0][0].as_f64(), Some(0.5));
    assert_eq!(re[1][1].as_f64(), Some(0.25));
}

#[test]
fn malformed_program_reports_position() {
    let dir = TempDir::new().unwrap();
    let prog = write(&dir, "bad.ql", "qubit q;\nfoo q;\n");
    let out = qpartial(&["run", s(&prog)]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("error: "), "{stderr}");
    assert!(stderr.contains("bad.ql") && stderr.contains("2:"), "{stderr}");
    assert!(out.stdout.is_empty());
}

#[test]
fn invalid_state_is_rejected() {
    let dir = TempDir::new().unwrap();
    let obs = write(&dir, "z.json", r#"{"dim": 2, "re": [[1, 0], [0, -1]]}"#);
    let state = write(&dir, "f.json", r#"{"dim": 2, "re": [[0.8, 0], [0, 0.7]]}"#);
    assert_eq!(qpartial(&["expect", s(&obs), s(&state)]).status.code(), Some(1));
}

#[test]
fn pauli_z_expectation() {
    let dir = TempDir::new().unwrap();
    let obs = write(&dir, "z.json", r#"{"dim": 2, "re": [[1, 0], [0, -1]]}"#);
    let state = write(&dir, "f.json", r#"{"dim": 2, "re": [[0.5, 0], [0, 0.25]]}"#);
    let out = qpartial(&["expect", s(&obs), s(&state)]);
    assert_eq!(out.status.code(), Some(0));
    let e = json(&out);
    let close = |key: &str, want: f64| assert!((e[key].as_f64().unwrap() - want).abs() < 1e-12, "{key}: {e}");
    close("lo", 0.0);
    close("hi", 0.5);
    close("e0", 0.25);
    close("missing", 0.25);
    close("m", -1.0);
    close("M", 1.0);
}

#[test]
fn zero_state_gives_spectral_range() {
    let dir = TempDir::new().unwrap();
    let obs = write(&dir, "a.json", r#"{"dim": 2, "re": [[2, 1], [1, 2]]}"#);
    let state = write(&dir, "zero.json", r#"{"dim": 2, "re": [[0, 0], [0, 0]]}"#);
    let e = json(&qpartial(&["expect", s(&obs), s(&state)]));
    assert!((e["lo"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((e["hi"].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "gleason", "--dims", "2,3", "--trials", "5", "--seed", "11"];
    let first = qpartial(&args);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stdout));
    assert_eq!(first.stdout, qpartial(&args).stdout);
    let report = json(&first);
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 11);
}

#[test]
fn every_suite_passes_small_runs() {
    for suite in ["dcpo", "interval", "qlang"] {
        let out = qpartial(&["verify", suite, "--dims", "2,4", "--trials", "3"]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn negative_control_fails_with_witness() {
    let out = qpartial(&["verify", "dcpo", "--dims", "3", "--trials", "4", "--negative-control"]);
    assert_eq!(out.status.code(), Some(2));
    let report = json(&out);
    assert_eq!(report["passed"], false);
    let monotone = report["invariants"]
        .as_array()
        .unwrap()
        .iter()
        .find(|i| i["name"] == "chain_monotone")
        .unwrap();
    let witness = monotone["witness_index"].as_u64().unwrap();
    assert!((2..=5).contains(&witness));
}

#[test]
fn bad_arguments_are_errors() {
    assert_ne!(qpartial(&["verify", "nosuch"]).status.code(), Some(0));
    let out = qpartial(&["verify", "gleason", "--dims", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qpartial(&["verify", "qlang", "--dims", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let prog = write(&dir, "coin.ql", "qubit q; h q; while q in |1> { h q; }");
    let target = dir.path().join("report.json");
    let out = qpartial(&["run", s(&prog), "--out", s(&target)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(report["converged"], true);
}

#[test]
fn iteration_budget_limits_convergence() {
    let dir = TempDir::new().unwrap();
    let prog = write(&dir, "coin.ql", "qubit q; h q; while q in |1> { h q; }");
    let out = qpartial(&["run", s(&prog), "--max-iter", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["converged"], false);
}
