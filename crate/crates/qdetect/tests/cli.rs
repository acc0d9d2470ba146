//! End-to-end CLI tests: exit codes, report contents, file round-trips.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qdetect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdetect"))
        .args(args)
        .output()
        .expect("failed to launch qdetect")
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is not JSON")
}

#[test]
fn lsm_on_reflected_pair_reports_optimal_condition() {
    let out = qdetect(&["lsm", example("reflected_pair.json").to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["condition"]["condition_holds"], Value::Bool(true));
    let p = v["p_correct"].as_f64().unwrap();
    assert!((p - 0.5).abs() < 1e-10);
    // condition held, so the certificate section is present and verified
    assert_eq!(v["certificate"]["verification"]["optimal"], Value::Bool(true));
    // LSM factor of the first state is (1/2)(1, 1)
    let f = &v["factors"][0];
    assert!((f[0][0][0].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert!((f[1][0][0].as_f64().unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn optimal_reduced_cgu_matches_lsm_on_two_group_orbit() {
    let file = example("two_group_orbit.json");
    let lsm = qdetect(&["lsm", file.to_str().unwrap()]);
    assert!(lsm.status.success());
    let p_lsm = stdout_json(&lsm)["p_correct"].as_f64().unwrap();

    let opt = qdetect(&["optimal", file.to_str().unwrap(), "--reduced", "cgu"]);
    assert!(opt.status.success(), "{}", String::from_utf8_lossy(&opt.stderr));
    let v = stdout_json(&opt);
    assert_eq!(v["reduction"], Value::String("cgu".into()));
    let p_opt = v["p_correct"].as_f64().unwrap();
    assert!((p_opt - p_lsm).abs() < 1e-6, "{p_opt} vs {p_lsm}");
    // reduced problem size: r n^2 = 2 * 4 vs full l r n^2 = 16
    assert_eq!(v["unknowns"].as_u64(), Some(8));
    assert_eq!(v["full_unknowns"].as_u64(), Some(16));
}

#[test]
fn helstrom_pair_solves_to_one_tenth_error() {
    let out = qdetect(&["optimal", example("helstrom_pair.json").to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let p = v["p_correct"].as_f64().unwrap();
    assert!((p - 0.9).abs() < 1e-6);
    assert_eq!(v["certificate"]["verification"]["optimal"], Value::Bool(true));
}

#[test]
fn malformed_priors_exit_2_with_field_message() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{
            "schema_version": "1",
            "dim": 2,
            "states": [
                [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
                [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
            ],
            "priors": [0.5, 0.6]
        }"#,
    )
    .unwrap();
    let out = qdetect(&["lsm", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("priors must sum to 1"), "{stderr}");
}

#[test]
fn reduced_gu_without_group_data_exits_2() {
    let out = qdetect(&[
        "optimal",
        example("helstrom_pair.json").to_str().unwrap(),
        "--reduced",
        "gu",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_accepts_lsm_certificate_and_rejects_bogus_one() {
    let dir = tempfile::tempdir().unwrap();
    let povm_path = dir.path().join("povm.json");
    let cert_path = dir.path().join("cert.json");
    let file = example("reflected_pair.json");

    let out = qdetect(&[
        "lsm",
        file.to_str().unwrap(),
        "--povm-out",
        povm_path.to_str().unwrap(),
        "--cert-out",
        cert_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = qdetect(&[
        "verify",
        file.to_str().unwrap(),
        "--povm",
        povm_path.to_str().unwrap(),
        "--cert",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["optimal"], Value::Bool(true));

    // a dual-feasible but non-optimal certificate: the identity (slacks
    // PSD, complementary slackness badly violated) -> exit 1
    std::fs::write(
        &cert_path,
        r#"{"dim": 2, "x": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}"#,
    )
    .unwrap();
    let out = qdetect(&[
        "verify",
        file.to_str().unwrap(),
        "--povm",
        povm_path.to_str().unwrap(),
        "--cert",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["optimal"], Value::Bool(false));
}

#[test]
fn dimension_mismatched_povm_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let povm_path = dir.path().join("povm3.json");
    let cert_path = dir.path().join("cert.json");
    std::fs::write(
        &povm_path,
        r#"{"dim": 3, "operators": [
            [[[1.0,0.0],[0.0,0.0],[0.0,0.0]],
             [[0.0,0.0],[1.0,0.0],[0.0,0.0]],
             [[0.0,0.0],[0.0,0.0],[1.0,0.0]]]
        ]}"#,
    )
    .unwrap();
    std::fs::write(
        &cert_path,
        r#"{"dim": 2, "x": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}"#,
    )
    .unwrap();
    let out = qdetect(&[
        "verify",
        example("reflected_pair.json").to_str().unwrap(),
        "--povm",
        povm_path.to_str().unwrap(),
        "--cert",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_reports_structure_and_phase_commutation() {
    let out = qdetect(&["validate", example("two_group_orbit.json").to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["kind"], Value::String("cgu".into()));
    assert_eq!(v["state_count"].as_u64(), Some(4));
    assert_eq!(v["group_order"].as_u64(), Some(2));
    assert_eq!(v["second_group_phase_commutes"], Value::Bool(true));

    let out = qdetect(&["validate", example("helstrom_pair.json").to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["kind"], Value::String("explicit".into()));
}

#[test]
fn emitted_matrices_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let povm_path = dir.path().join("povm.json");
    let file = example("helstrom_pair.json");
    let out = qdetect(&[
        "optimal",
        file.to_str().unwrap(),
        "--povm-out",
        povm_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report = stdout_json(&out);

    // the written POVM file holds the same operators as the report, and a
    // second pass through serde is bit-identical
    let written: Value =
        serde_json::from_str(&std::fs::read_to_string(&povm_path).unwrap()).unwrap();
    assert_eq!(&written["operators"], &report["operators"]);
    let reser = serde_json::to_string(&written).unwrap();
    let reparsed: Value = serde_json::from_str(&reser).unwrap();
    assert_eq!(written, reparsed);
}

#[test]
fn log_env_var_enables_stderr_diagnostics() {
    let out = Command::new(env!("CARGO_BIN_EXE_qdetect"))
        .env("QDETECT_LOG", "info")
        .args(["lsm", example("reflected_pair.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("LSM built"), "{stderr}");
}
