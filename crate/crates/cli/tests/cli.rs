//! Runs the built binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gg-spectra"))
        .args(args)
        .env_remove("GG_SPECTRA_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn constants_supercritical() {
    let o = run(&["constants", "--n", "1", "--beta", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for line in ["d_H = 3", "beta_c = 2", "C_beta = 2", "regime = supercritical"] {
        assert!(text.lines().any(|l| l == line), "missing `{line}` in\n{text}");
    }
}

#[test]
fn grushin_spectrum_first_row() {
    let o = run(&["spectrum", "--n", "1", "--beta", "2", "--base", "circle:6.283185307", "--lambda-max", "2000", "--tol", "1e-6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,k,j,multiplicity"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let lambda: f64 = row[0].parse().unwrap();
    assert!((lambda - 14.681_970_6).abs() < 1e-5, "{lambda}");
    assert_eq!(&row[1..], ["0", "1", "1"]);
}

#[test]
fn manifest_digests_match() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(&["heat-trace", "--beta", "4", "--lambda-max", "400", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = manifest(&out);
    assert_eq!(m["command"], "heat-trace");
    assert_eq!(m["derived_constants"]["regime"], "supercritical");
    assert_eq!(m["certificates"]["certified"], true);
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 1);
    for rec in outputs {
        let bytes = std::fs::read(out.join(rec["file"].as_str().unwrap())).unwrap();
        assert_eq!(rec["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
    let csv = std::fs::read_to_string(out.join("heat_trace.csv")).unwrap();
    assert!(csv.starts_with("t,value,tail_bound\n"));
}

#[test]
fn outputs_are_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut digests = Vec::new();
    for (i, workers) in ["1", "1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("r{i}"));
        let o = run(&["spectrum", "--beta", "4", "--lambda-max", "600", "--workers", workers, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        digests.push(manifest(&out)["outputs"][0]["sha256"].clone());
    }
    assert_eq!(digests[0], digests[1]);
    assert_eq!(digests[0], digests[2]);
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"n": 1, "alpha": 1.0, "lambda_max": 300, "format": "json"}"#).unwrap();
    let out = dir.path().join("out");
    let o = run(&["counting", "--config", cfg.to_str().unwrap(), "--points", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = manifest(&out);
    assert_eq!(m["config"]["alpha"], 1.0);
    assert_eq!(m["model"]["beta"], 2.0);
    let rows: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("counting.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 5);

    // A flag for beta replaces alpha from the file.
    let o = run(&["constants", "--config", cfg.to_str().unwrap(), "--beta", "1"]);
    assert!(stdout(&o).contains("regime = subcritical"));
}

#[test]
fn validation_errors_exit_1() {
    let o = run(&["constants", "--alpha", "1", "--beta", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("alpha/beta"));

    let o = run(&["spectrum", "--beta", "2", "--lambda-max", "100", "--tol=-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`tol`"));

    let o = run(&["quasi-isometry", "--beta", "2", "--eps", "0.7"]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["spectrum", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"bta": 2}"#).unwrap();
    let o = run(&["constants", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bta"));
}

#[test]
fn convergence_failure_exits_2_and_leaves_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["solve1d", "--beta", "2", "--omega", "0", "--lambda-max", "100", "--tol", "1e-13", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unwritable_output_is_cleaned_up() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    std::fs::create_dir(&out).unwrap();
    // A directory where the manifest should go makes the last write fail.
    std::fs::create_dir(out.join("manifest.json")).unwrap();
    let o = run(&["spectrum", "--beta", "4", "--lambda-max", "100", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.join("spectrum.csv").exists());
}

#[test]
fn environment_sets_workers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_gg-spectra"))
        .args(["spectrum", "--beta", "1", "--lambda-max", "100", "--out", out.to_str().unwrap()])
        .env("GG_SPECTRA_WORKERS", "2")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(manifest(&out)["workers"], 2);
}

#[test]
fn grushin_suite_passes() {
    let o = run(&["verify", "--suite", "grushin"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 2);
}
