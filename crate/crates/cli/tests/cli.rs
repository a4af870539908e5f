use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BASELINE: &str = r#"{"lambda1": 1.0, "lambda2": 1.0, "c1": 1.0, "c2": 2.0, "alpha": 0.5}"#;
const UNSTABLE: &str = r#"{"lambda1": 1.0, "lambda2": 2.0, "c1": 2.0, "c2": 1.0, "alpha": 0.5}"#;

fn write_params(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn telegraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_telegraph")).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) -> Output {
    let out = telegraph(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn decay_baseline_damped() {
    let dir = TempDir::new().unwrap();
    let params = write_params(dir.path(), "baseline.json", BASELINE);
    let out_dir = dir.path().join("out");
    let out = run_ok(&[
        "decay",
        "--params",
        params.to_str().unwrap(),
        "--process",
        "damped",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["w_closed"], 1.0);
    assert!((report["w_numeric"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"], serde_json::json!(["decay.json"]));
    assert_eq!(manifest["params"]["c2"], 2.0);
}

#[test]
fn rate_grid_ends_at_c1() {
    let dir = TempDir::new().unwrap();
    let params = write_params(dir.path(), "baseline.json", BASELINE);
    let out_dir = dir.path().join("out");
    run_ok(&[
        "rate",
        "--params",
        params.to_str().unwrap(),
        "--grid",
        "-2:1:0.01",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(out_dir.join("rate.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,I_D,I_S");
    assert_eq!(lines.len(), 302);
    assert_eq!(lines[1], "-2,1,1");
    assert_eq!(*lines.last().unwrap(), "1,1,1");
}

#[test]
fn rate_off_support_is_inf() {
    let dir = TempDir::new().unwrap();
    let params = write_params(dir.path(), "baseline.json", BASELINE);
    let out_dir = dir.path().join("out");
    run_ok(&[
        "rate",
        "--params",
        params.to_str().unwrap(),
        "--grid",
        "1:2:1",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(out_dir.join("rate.csv")).unwrap();
    assert_eq!(text.lines().last().unwrap(), "2,inf,inf");
}

#[test]
fn unstable_decay_exits_one() {
    let dir = TempDir::new().unwrap();
    let params = write_params(dir.path(), "unstable.json", UNSTABLE);
    let out = telegraph(&[
        "decay",
        "--params",
        params.to_str().unwrap(),
        "--process",
        "damped",
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("stab"), "{stderr}");
    assert_eq!(stderr.lines().count(), 1);
}

#[test]
fn validation_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = write_params(dir.path(), "bad.json", r#"{"lambda1": -1.0, "lambda2": 1.0, "c1": 1.0, "c2": 2.0, "alpha": 0.5}"#);
    let missing = write_params(dir.path(), "missing.json", r#"{"lambda1": 1.0, "lambda2": 1.0, "c1": 1.0, "c2": 2.0}"#);
    for p in [&bad, &missing] {
        let out = telegraph(&["rate", "--params", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1));
    }
    // missing --params, unknown subcommand, malformed grid
    assert_eq!(telegraph(&["rate"]).status.code(), Some(1));
    assert_eq!(telegraph(&["frobnicate"]).status.code(), Some(1));
    let out = telegraph(&["rate", "--params", bad.to_str().unwrap(), "--grid", "1:0:1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_two() {
    // a damped horizon of 100 overflows the switch cap
    let dir = TempDir::new().unwrap();
    let params = write_params(dir.path(), "baseline.json", BASELINE);
    let out = telegraph(&[
        "simulate",
        "--params",
        params.to_str().unwrap(),
        "--horizon",
        "100",
        "--n",
        "1",
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

fn outputs_of(args: &[&str], params: &Path, threads: &str) -> Vec<(String, Vec<u8>)> {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("out");
    let mut full: Vec<&str> = args.to_vec();
    full.extend_from_slice(&[
        "--params",
        params.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--threads",
        threads,
    ]);
    run_ok(&full);
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_identical_across_runs_and_threads() {
    let dir = TempDir::new().unwrap();
    let params = write_params(dir.path(), "baseline.json", BASELINE);
    let commands: [&[&str]; 6] = [
        &["density", "--t", "2"],
        &["simulate", "--process", "standard", "--n", "50", "--horizon", "20", "--seed", "3"],
        &["simulate", "--process", "damped", "--n", "50", "--horizon", "6", "--seed", "3"],
        &["ldp-verify", "--t", "10,20"],
        &["crossing", "--process", "standard", "--n", "20000", "--seed", "4"],
        &["compare", "--lln-paths", "2000", "--crossing-paths", "5000", "--seed", "5"],
    ];
    for args in commands {
        let one = outputs_of(args, &params, "1");
        let again = outputs_of(args, &params, "1");
        let eight = outputs_of(args, &params, "8");
        assert!(!one.is_empty());
        assert_eq!(one, again, "{args:?} differs between runs");
        assert_eq!(one, eight, "{args:?} differs between 1 and 8 threads");
    }
}

#[test]
fn density_and_paths_csv_shapes() {
    let dir = TempDir::new().unwrap();
    let params = write_params(dir.path(), "baseline.json", BASELINE);
    let out_dir = dir.path().join("out");
    run_ok(&[
        "density",
        "--params",
        params.to_str().unwrap(),
        "--t",
        "1",
        "--grid",
        "-3:2:0.5",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(out_dir.join("density.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,t,p,log_p");
    assert_eq!(lines[1], "-3,1,0,-inf");
    assert_eq!(lines.len(), 12);

    run_ok(&[
        "simulate",
        "--params",
        params.to_str().unwrap(),
        "--n",
        "3",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(out_dir.join("paths.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "path_id,epoch_index,time,position,velocity");
    let manifest = std::fs::read_to_string(out_dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("paths.csv") && !manifest.contains("density.csv"));
}
