use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epigeom")).env("EPIGEOM_WORKERS", "1").args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const DISK: &str = r#"{"family":"uniform","dim":2,"params":{"body":{"kind":"ball","radius":1}}}"#;

#[test]
fn alpha_csv_has_one_row_per_step() {
    let out = run(&["alpha", "--p-min", "1.1", "--p-max", "10", "--steps", "20", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,alpha,alpha_opt,bm16,lower_bound,argmax_lambda");
    assert_eq!(lines.len(), 21);
    let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 1.1);
}

#[test]
fn identity_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let disk = write(dir.path(), "disk.json", DISK);
    let out_path = dir.path().join("c1.json");
    let out =
        run(&["check", "identity-c1", "--density", &disk, "--directions", "64", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["verdict"], "holds");
    assert_eq!(report["details"]["values"].as_array().unwrap().len(), 64);
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("c1.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 0);
    assert!(manifest["config_digest"].as_str().unwrap().len() == 64);
}

#[test]
fn nonconvex_body_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let radii: Vec<String> =
        (0..360).map(|i| format!("{}", 1.0 + 0.5 * (4.0 * i as f64 * std::f64::consts::PI / 180.0).cos())).collect();
    let body = format!(
        r#"{{"directions":{{"kind":"circle","count":360}},"radii":[{}],"label":{{"kind":"sampled"}},"symmetric":true}}"#,
        radii.join(",")
    );
    let path = write(dir.path(), "petals.json", &body);
    let out = run(&["check", "convexity", "--body", &path, "--out", dir.path().join("r.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn malformed_density_reports_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"family":"gaussian","dim":1,"params":{"sigma":"wide"}}"#);
    let out = run(&["entropy", "--density", &bad, "--p", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.json") && err.contains("params.sigma"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["check", "identity-c1", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["alpha", "--p-min", "0.5", "--p-max", "2"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn single_worker_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let disk = write(dir.path(), "disk.json", DISK);
    let args = ["check", "reverse-epi", "--density", &disk, "--p", "2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn conjectural_reverse_epi_is_informational() {
    let dir = tempfile::tempdir().unwrap();
    let disk = write(dir.path(), "disk.json", DISK);
    let out = run(&["check", "reverse-epi", "--density", &disk, "--p", "5"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn tolerance_override_can_fail_a_transform_check() {
    let out = run(&["transform-check", "--which", "tr-limit", "--eps", "0.1", "--tolerance", "1e-6"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["within_tolerance"], false);
}
