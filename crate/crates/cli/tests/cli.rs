use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn gyro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gyro"))
        .args(args)
        .env_remove("GYR_S")
        .env_remove("GYR_DIM")
        .env_remove("GYR_MODEL")
        .env_remove("GYR_TOL")
        .env_remove("GYR_SEED")
        .env_remove("GYR_FORMAT")
        .output()
        .expect("binary runs")
}

fn gyro_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gyro"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn vec_of(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn add_einstein_collinear() {
    let v = json(&gyro(&["add", "--model", "einstein", "0.6,0,0", "0.6,0,0"]));
    let r = vec_of(&v["result"]);
    assert!((r[0] - 1.2 / 1.36).abs() < 1e-15);
    assert_eq!(&r[1..], &[0.0, 0.0]);
    assert!((f(&v["gamma_direct"]) - 2.125).abs() < 1e-12);
    assert!((f(&v["gamma_identity"]) - 2.125).abs() < 1e-14);
}

#[test]
fn scalar_and_gamma_examples() {
    let v = json(&gyro(&["scalar", "2", "0.5,0"]));
    let r = vec_of(&v["result"]);
    assert!((r[0] - 0.8).abs() < 1e-15 && r[1] == 0.0);
    let v = json(&gyro(&["gamma", "0,0,0"]));
    assert_eq!(f(&v["gamma"]), 1.0);
}

#[test]
fn vectors_accept_json_and_negative_components() {
    let a = json(&gyro(&["add", "-0.5,0.25", "0.1,-0.3"]));
    let b = json(&gyro(&["add", "[-0.5, 0.25]", "[0.1,-0.3]"]));
    assert_eq!(a, b);
    let v = json(&gyro(&["scalar", "-1", "0.3,0.4"]));
    let r = vec_of(&v["result"]);
    assert!((r[0] + 0.3).abs() < 1e-15 && (r[1] + 0.4).abs() < 1e-15);
}

#[test]
fn coadd_and_gyr() {
    let v = json(&gyro(&["coadd", "0.5,0", "0,0"]));
    assert!((vec_of(&v["result"])[0] - 0.5).abs() < 1e-15);
    let v = json(&gyro(&["gyr", "0.5,0", "0,0.3", "0.1,0.1"]));
    let r = vec_of(&v["result"]);
    // rotation of z by the unimodular factor (1 − 0.15i)/(1 + 0.15i)
    let (c, s) = ((1.0 - 0.0225) / 1.0225, -0.3 / 1.0225);
    assert!((r[0] - (0.1 * c - 0.1 * s)).abs() < 1e-14);
    assert!((r[1] - (0.1 * s + 0.1 * c)).abs() < 1e-14);
}

#[test]
fn exit_codes() {
    assert_eq!(gyro(&["add", "1,x", "0,0"]).status.code(), Some(2));
    assert_eq!(gyro(&["add", "0.1,0.2", "0.1"]).status.code(), Some(2));
    assert_eq!(
        gyro(&["add", "--dim", "3", "0.1,0.2", "0.1,0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(gyro(&["bogus"]).status.code(), Some(2));
    let out = gyro(&["add", "1.5,0", "0,0"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert_eq!(gyro(&["scalar", "100", "0.9,0"]).status.code(), Some(3));
    assert_eq!(gyro(&["fidelity", "0.1,0", "0,0"]).status.code(), Some(3));
    assert_eq!(
        gyro(&["curve", "gyroline", "0.2,0.1", "0.2,0.1"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn radius_flag_and_environment() {
    let v = json(&gyro(&["add", "--s", "2", "1.5,0", "0,0"]));
    assert_eq!(vec_of(&v["result"]), vec![1.5, 0.0]);
    let out = Command::new(env!("CARGO_BIN_EXE_gyro"))
        .args(["add", "1.5,0", "0,0"])
        .env("GYR_S", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    // flags win over the environment
    let out = Command::new(env!("CARGO_BIN_EXE_gyro"))
        .args(["add", "--s", "1", "1.5,0", "0,0"])
        .env("GYR_S", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_gyro"))
        .args(["add", "0.6,0,0", "0.6,0,0"])
        .env("GYR_MODEL", "einstein")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((vec_of(&v["result"])[0] - 1.2 / 1.36).abs() < 1e-15);
}

#[test]
fn curve_rows_hit_endpoints_and_midpoint() {
    let v = json(&gyro(&[
        "curve",
        "gyroline",
        "0,0",
        "0.5,0",
        "--samples",
        "2",
    ]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let ts: Vec<f64> = rows.iter().map(|r| f(&r["t"])).collect();
    assert_eq!(ts, vec![0.0, 0.5, 1.0]);
    assert_eq!(vec_of(&rows[0]["x"]), vec![0.0, 0.0]);
    // gyromidpoint of 0 and B is ½ ⊗ B = tanh(atanh(0.5)/2)
    let mid = (0.5f64.atanh() / 2.0).tanh();
    assert!((vec_of(&rows[1]["x"])[0] - mid).abs() < 1e-15);
    assert!((vec_of(&rows[2]["x"])[0] - 0.5).abs() < 1e-15);
}

#[test]
fn cogyroline_starts_at_a_and_reports_diagnostics() {
    let v = json(&gyro(&[
        "curve",
        "cogyroline",
        "0.3,-0.2",
        "-0.1,0.6",
        "--samples",
        "8",
    ]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert_eq!(vec_of(&rows[0]["x"]), vec![0.3, -0.2]);
    assert!(f(&v["diagnostics"]["boundary_residual"]) <= 1e-6);

    let v = json(&gyro(&["curve", "gyroline", "0.3,-0.2", "-0.1,0.6"]));
    assert!(f(&v["diagnostics"]["boundary_residual"]) <= 1e-6);

    let v = json(&gyro(&["curve", "gyroline", "0.3,-0.2,0", "-0.1,0.6,0.1"]));
    assert!(v["diagnostics"].is_null());
}

#[test]
fn curve_csv_layout() {
    let out = gyro(&[
        "curve",
        "gyroline",
        "0,0",
        "0.5,0",
        "--samples",
        "2",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x1,x2");
    assert!(lines[1].starts_with("0.0,"));
    assert!(lines[4..].iter().all(|l| l.starts_with("# ")));
    assert!(lines.iter().any(|l| l.starts_with("# boundary_residual=")));
}

#[test]
fn audit_passes_and_is_deterministic() {
    let a = gyro(&[
        "audit",
        "--model",
        "mobius",
        "--dim",
        "3",
        "--samples",
        "1000",
        "--seed",
        "42",
    ]);
    assert_eq!(a.status.code(), Some(0));
    let b = gyro(&[
        "audit",
        "--model",
        "mobius",
        "--dim",
        "3",
        "--samples",
        "1000",
        "--seed",
        "42",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["op"], "mobius");
    assert_eq!(v["seed"], 42);
    assert!(v["identities"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["pass"] == true));

    let e = gyro(&[
        "audit",
        "--model",
        "einstein",
        "--dim",
        "5",
        "--samples",
        "1000",
    ]);
    assert_eq!(e.status.code(), Some(0));
}

#[test]
fn audit_negative_control_fails() {
    let out = gyro(&["audit", "--control", "--samples", "200"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let closure = v["identities"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "closure")
        .unwrap();
    assert_eq!(closure["pass"], false);
    assert_eq!(gyro(&["audit", "--samples", "0"]).status.code(), Some(2));
}

#[test]
fn invmass_from_file_and_stdin() {
    let sys = r#"{"s": 1, "particles": [{"m": 1, "v": [0.6, 0, 0]}, {"m": 1, "v": [-0.6, 0, 0]}]}"#;
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(sys.as_bytes()).unwrap();
    let v = json(&gyro(&[
        "invmass",
        "--input",
        file.path().to_str().unwrap(),
    ]));
    assert!((f(&v["m0"]) - 2.5).abs() <= 1e-12);
    assert!((f(&v["fictitious"]) - 0.5).abs() <= 1e-12);
    assert!(f(&v["residual"]) <= 1e-12);

    let v = json(&gyro_stdin(&["invmass"], sys));
    assert!((f(&v["m0"]) - 2.5).abs() <= 1e-12);

    assert_eq!(gyro_stdin(&["invmass"], "{not json").status.code(), Some(2));
    let escaped = r#"{"s": 1, "particles": [{"m": 1, "v": [1.5, 0]}]}"#;
    assert_eq!(gyro_stdin(&["invmass"], escaped).status.code(), Some(3));
    assert_eq!(
        gyro(&["invmass", "--input", "/nonexistent/system.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn fidelity_examples() {
    let v = json(&gyro(&["fidelity", "0,0,0", "0,0,0"]));
    assert_eq!(f(&v["gyro"]), 1.0);
    assert!(f(&v["residual"]) <= 1e-12);
    let v = json(&gyro(&["fidelity", "0.3,-0.2,0.5", "[0.1,0.6,-0.4]"]));
    assert!(f(&v["residual"]) <= 1e-9);
    assert_eq!(v["agree"], true);
}

#[test]
fn aberration_with_resting_observer() {
    let v = json(&gyro(&["aberrate", "0.2,0.5", "0,0"]));
    assert_eq!(f(&v["angular_gap"]), 0.0);
    assert_eq!(v["classical"]["direction"], v["relativistic"]["direction"]);
}

#[test]
fn twosum_routes_agree() {
    let v = json(&gyro(&["twosum", "0.1,0.2,0.3", "-0.4,0.1,0"]));
    assert_eq!(v["agree"], true);
    assert!(f(&v["matrix_residual"]) <= 1e-9);
}
