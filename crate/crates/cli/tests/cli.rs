use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn walklab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walklab"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn read(dir: &Path, path: &str) -> String {
    fs::read_to_string(dir.join(path)).unwrap_or_else(|e| panic!("{path}: {e}"))
}

#[test]
fn walk_writes_exact_rational_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = config(dir, "walk.json", r#"{"task": "walk", "group": "lattice:d=1", "measure": "ball:r=1", "nMax": 4}"#);
    let out = walklab(dir, &["walk", "--config", &cfg, "--out", "run"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir, "run/series.csv");
    assert!(csv.contains("2,1/3,1/3"), "{csv}");
    assert!(csv.contains("4,19/81,19/81"), "{csv}");
    let report: Value = serde_json::from_str(&read(dir, "run/report.json")).unwrap();
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(report["walklab_version"], env!("CARGO_PKG_VERSION"));
    assert!(read(dir, "run/summary.txt").starts_with("walklab walk PASS"));
}

#[test]
fn verify_sandwich_reports_zero_violations() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = config(dir, "v.json", r#"{"suite": "sandwich"}"#);
    let out = walklab(dir, &["verify", "--config", &cfg, "--out", "run"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&read(dir, "run/report.json")).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["result"]["measured"]["violations"], 0);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let configs = [
        ("walk", r#"{"task": "walk", "group": "lamplighter:d=1", "measure": "ball:r=1", "n_max": 8, "method": "exact"}"#),
        (
            "mc",
            r#"{"task": "mc", "group": "lamplighter:d=1", "measure": "switchwalk:base=(ball:r=1)", "ns": [2, 4], "samples": 4000}"#,
        ),
        ("spectral", r#"{"task": "spectral", "group": "lattice:d=1", "quotient": "quotient:lattice:d=1:m=16", "measure": "ball:r=1", "n_max": 8}"#),
    ];
    for (task, text) in configs {
        let cfg = config(dir, &format!("{task}.json"), text);
        let mut runs = Vec::new();
        for out_dir in ["a", "b"] {
            let out_dir = format!("{task}-{out_dir}");
            let out = walklab(dir, &[task, "--config", &cfg, "--seed", "7", "--out", &out_dir]);
            assert_eq!(out.status.code(), Some(0), "{task}: {}", String::from_utf8_lossy(&out.stderr));
            let mut files: Vec<_> = fs::read_dir(dir.join(&out_dir)).unwrap().map(|e| e.unwrap().file_name()).collect();
            files.sort();
            let contents: Vec<(String, Vec<u8>)> = files
                .iter()
                .map(|f| (f.to_string_lossy().into_owned(), fs::read(dir.join(&out_dir).join(f)).unwrap()))
                .collect();
            runs.push(contents);
        }
        assert!(!runs[0].is_empty());
        assert_eq!(runs[0], runs[1], "{task} outputs differ between runs");
    }
    assert!(dir.join(".walklab-cache").is_dir());
}

#[test]
fn failed_checks_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = config(
        dir,
        "fit.json",
        r#"{"task": "fit", "group": "lattice:d=1", "measure": "ball:r=1", "model": "power", "n_range": [16, 256], "expected": 2.0, "tolerance": 0.05}"#,
    );
    let out = walklab(dir, &["fit", "--config", &cfg, "--out", "run"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(read(dir, "run/summary.txt").starts_with("walklab fit FAIL"));
    assert!(read(dir, "run/fit.csv").lines().count() >= 2);
}

#[test]
fn usage_errors_exit_two_with_locations() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = config(dir, "bad.json", "{\"task\": \"walk\", \"group\": \"lattice:d=1\",\n  \"measure\": \"ball:r=1\", \"n_max\": 5}");
    let out = walklab(dir, &["walk", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("n_max"), "{err}");

    let cfg = config(dir, "typo.json", r#"{"task": "walk", "gruop": "lattice:d=1"}"#);
    let out = walklab(dir, &["walk", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gruop"));

    let cfg = config(dir, "mc.json", r#"{"task": "mc", "group": "lattice:d=1", "measure": "ball:r=1", "ns": [2]}"#);
    let out = walklab(dir, &["mc", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));

    let out = walklab(dir, &["verify", "--config", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = walklab(dir, &["bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_suites_are_listed() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = config(dir, "v.json", r#"{"suite": "nope"}"#);
    let out = walklab(dir, &["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("srw-z2-power"));
}
