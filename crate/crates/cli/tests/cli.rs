use std::process::{Command, Output};

use serde_json::Value;

use suzuki_core::f2la::write_szcm;
use suzuki_core::BitMatrix;

fn suzuki(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_suzuki"))
        .args(args)
        .env_remove("SUZUKI_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = suzuki(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn a_number_and_rank_profile_m1() {
    let v = json(&["--m", "1", "a-number", "--format", "json"]);
    assert_eq!(v["a_number"], 5);
    assert_eq!(
        (v["m"].as_u64(), v["q0"].as_u64(), v["q"].as_u64(), v["g"].as_u64()),
        (Some(1), Some(2), Some(8), Some(14))
    );
    let v = json(&["--m", "1", "rank-profile", "--format", "json"]);
    assert_eq!(v["rank_profile"], serde_json::json!([9, 4, 0]));
}

#[test]
fn points_k4() {
    let v = json(&["--m", "1", "points", "--k", "4", "--format", "json"]);
    assert_eq!(v["points"]["4"], 5889);
    assert_eq!(v["maximal"]["4"], true);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["--m", "1", "all", "--format", "json"];
    let a = suzuki(&args);
    let b = suzuki(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["final_types"].as_array().map(Vec::len), Some(5));
    assert_eq!(v["verified"], true);
}

#[test]
fn verify_m2_succeeds() {
    let out = suzuki(&["--m", "2", "verify"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS] dual_path"));
}

#[test]
fn eo_enumerate_m2_reports_cap() {
    let v = json(&["--m", "2", "eo-enumerate", "--format", "json"]);
    assert!(v["final_types"].is_null());
    assert_eq!(v["heuristic"], true);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(suzuki(&["--m", "1", "bogus"]).status.code(), Some(2));
    assert_eq!(suzuki(&["a-number"]).status.code(), Some(2));
    assert_eq!(suzuki(&["--m", "0", "params"]).status.code(), Some(2));
    assert_eq!(suzuki(&["--m", "5", "a-number"]).status.code(), Some(2));
}

#[test]
fn corrupt_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    // header claims m = 1 but carries a 15 x 15 matrix
    let mut f = std::fs::File::create(dir.path().join("suzuki_m1.szcm")).unwrap();
    write_szcm(&mut f, 1, &BitMatrix::zeros(15, 15)).unwrap();
    drop(f);
    let out = Command::new(env!("CARGO_BIN_EXE_suzuki"))
        .args(["--m", "1", "a-number", "--format", "json"])
        .env("SUZUKI_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["a_number"], 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    // the fresh matrix replaced the bad file
    let (m, matrix) = suzuki_cli::cache::load_matrix(&dir.path().join("suzuki_m1.szcm")).unwrap();
    assert_eq!((m, matrix.rows()), (1, 14));
}

#[test]
fn flag_overrides_env_cache_dir() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_suzuki"))
        .args(["--m", "1", "matrix", "--cache-dir"])
        .arg(flag_dir.path())
        .env("SUZUKI_CACHE_DIR", env_dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(flag_dir.path().join("suzuki_m1.szcm").exists());
    assert!(!env_dir.path().join("suzuki_m1.szcm").exists());
}

#[test]
fn csv_basis_has_one_row_per_form() {
    let out = suzuki(&["--m", "1", "basis", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 14);
}
