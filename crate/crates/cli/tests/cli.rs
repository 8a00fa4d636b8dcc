use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn frax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frax"))
        .args(args)
        .env_remove("FRAX_THREADS")
        .output()
        .expect("frax binary should run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn write_slab(dir: &Path, extent: i64) -> String {
    let path = dir.join("slab.csv");
    let mut text = String::new();
    for i in -extent..=extent {
        text.push_str(&format!("{},1.0,0.25\n", i as f64 * 0.25));
    }
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn identity_dt_at_s_one_passes() {
    let out = frax(&["verify", "--check", "identity-dt", "--n", "1", "--s", "1", "--beta", "1", "--f", "gaussian"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["name"], "identity-dt");
    assert_eq!(report["status"], "pass");
    assert!((report["ratio"].as_f64().unwrap() - 1.0).abs() < 0.01);
    assert!((report["predicted_constant"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn moment_constant_at_s_one_is_a_quarter() {
    let out = frax(&["constants", "--n", "1", "--s", "1", "--a", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!((doc["moment_constant"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn slab_condition_above_threshold_is_finite() {
    let dir = TempDir::new().unwrap();
    let slab = write_slab(dir.path(), 400);
    let out = frax(&["carleson", "--condition", "vi", "--measure", &slab, "--p", "1", "--beta", "0.5", "--q0", "5"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let sup = report["ratio"].as_f64().unwrap();
    assert!(sup.is_finite() && sup > 0.0);
    assert!(report["extras"]["witness_radius"].as_f64().unwrap() > 1.0);
}

#[test]
fn failing_check_exits_with_two() {
    let out = frax(&["verify", "--check", "identity-dt", "--s", "1", "--beta", "1", "--tol", "1e-14"]);
    assert_eq!(out.status.code(), Some(2));
    let report: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["status"], "fail");
}

#[test]
fn usage_and_domain_errors_exit_with_one() {
    assert_eq!(frax(&["verify"]).status.code(), Some(1));
    assert_eq!(frax(&["verify", "--check", "nope"]).status.code(), Some(1));
    assert_eq!(frax(&["kernel", "--unknown-flag"]).status.code(), Some(1));
    assert_eq!(frax(&["kernel", "--check", "identity-dt"]).status.code(), Some(1));
    assert_eq!(frax(&["kernel", "--s", "2.5"]).status.code(), Some(1));
    // beta at 2s is outside the identity window.
    assert_eq!(frax(&["verify", "--check", "identity-grad", "--s", "1", "--beta", "1.5"]).status.code(), Some(0));
    assert_eq!(frax(&["verify", "--check", "identity-grad", "--s", "1", "--beta", "2"]).status.code(), Some(1));
}

#[test]
fn help_lists_every_flag() {
    let out = frax(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for flag in [
        "--n", "--s", "--beta", "--gamma", "--p", "--q", "--q0", "--alpha", "--grid-N", "--grid-L", "--t-min",
        "--t-max", "--t-count", "--quad-count", "--tol", "--f", "--measure", "--out", "--format", "--config",
    ] {
        assert!(text.contains(&format!("{flag} ")), "missing {flag}");
    }
}

#[test]
fn repeated_runs_are_byte_identical_across_thread_counts() {
    let args = ["verify", "--check", "all", "--n", "1", "--s", "0.8", "--beta", "0.6", "--gamma", "0.7"];
    let a = frax(&args);
    let b = frax(&args);
    let c = Command::new(env!("CARGO_BIN_EXE_frax"))
        .args(args)
        .env("FRAX_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), b.status.code());
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let names: Vec<String> = stdout(&a)
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["name"].as_str().unwrap().to_string())
        .collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_frax"))
        .args(["kernel"])
        .env("FRAX_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_is_strict_and_flags_override_it() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"command":"constants","n":1,"s":1.0,"a":1.0}"#).unwrap();
    let out = frax(&["constants", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!((doc["moment_constant"].as_f64().unwrap() - 0.25).abs() < 1e-12);

    let out = frax(&["constants", "--config", cfg.to_str().unwrap(), "--s", "1.5"]);
    let doc: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(doc["s"].as_f64().unwrap(), 1.5);

    fs::write(&cfg, r#"{"n":1,"colour":"blue"}"#).unwrap();
    assert_eq!(frax(&["constants", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
    fs::write(&cfg, r#"{"command":"kernel"}"#).unwrap();
    assert_eq!(frax(&["constants", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
    fs::write(&cfg, r#"{"p":1.5,"q":"inf","beta":0.5}"#).unwrap();
    assert_eq!(frax(&["capacity", "--config", cfg.to_str().unwrap(), "--r", "1"]).status.code(), Some(1));
}

#[test]
fn output_file_and_csv_format() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("summary.csv");
    let out = frax(&[
        "verify", "--check", "moment-identity", "--s", "1.5", "--a", "0.5", "--format", "csv", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,ratio,status"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.ends_with(",pass")));
}

#[test]
fn extend_emits_a_decodable_field() {
    let out = frax(&["extend", "--n", "1", "--s", "0.6", "--grid-N", "64", "--grid-L", "8", "--t-count", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let u = frax_core::field::ExtensionField::from_json(stdout(&out).trim()).unwrap();
    assert_eq!(u.level_count(), 9);
    assert_eq!(u.values().len(), 9 * 64);
}

#[test]
fn kernel_rows_follow_the_requested_radii() {
    let out = frax(&["kernel", "--s", "1", "--r", "0.5,2"]);
    let doc: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    // G_1(r) = √π e^(-r) at s = 1.
    let g = rows[1]["g"].as_f64().unwrap();
    assert!((g - std::f64::consts::PI.sqrt() * (-2.0f64).exp()).abs() < 1e-9);
}

#[test]
fn capacity_of_balls_tracks_the_power_law() {
    let out = frax(&["capacity", "--n", "2", "--p", "1", "--beta", "0.5", "--r", "0.25,0.5,1"]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines() {
        let r: Value = serde_json::from_str(line).unwrap();
        let ratio = r["ratio"].as_f64().unwrap();
        assert!((0.25..=4.0).contains(&ratio), "{line}");
    }
}

#[test]
fn minimizing_function_from_the_cli_is_nondecreasing() {
    let dir = TempDir::new().unwrap();
    let slab = write_slab(dir.path(), 16);
    let out = frax(&["carleson", "--condition", "minimizing", "--measure", &slab, "--p", "1", "--beta", "0.5", "--q0", "2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(doc["nondecreasing"], true);
}
