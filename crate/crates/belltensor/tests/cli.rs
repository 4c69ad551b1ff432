use std::path::Path;
use std::process::{Command, Output};

use belltensor::core::compat::joint_povm_from_decomposition;
use belltensor::core::measurements::pauli_pair;
use belltensor::core::sdp;
use belltensor::dump::SdpDump;
use belltensor::format::{read_json, write_json, CertificateJson, RealMatrixJson, TupleJson};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_belltensor")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn documented_examples() {
    assert_eq!(json(&["bias", "--game", "chsh"]), serde_json::json!({ "classical_bias": 1.0 }));
    let g = json(&["gamma", "--tuple", "pauli:1,1,0"]);
    assert!((num(&g, "gamma") - 0.5f64.sqrt()).abs() < 1e-6);
    let u = json(&["uncertainty", "--game", "mt:3"]);
    assert!(num(&u, "product") > 1.0);
    assert_eq!(u["hadamard"], Value::Bool(false));
}

#[test]
fn norms_and_biases() {
    let m = json(&["norm-m", "--game", "chsh", "--tuple", "pauli:1,1"]);
    assert!((num(&m, "norm_m") - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(m["bell_local"], Value::Bool(false));
    assert_eq!(m["method"], "closed_form");

    let m = json(&["norm-m", "--game", "mt:0", "--normalize", "--tuple", "pauli:1,1"]);
    assert_eq!(m["bell_local"], Value::Bool(true));

    let c = json(&["norm-c", "--tuple", "pauli:1,0.5"]);
    assert!((num(&c, "norm_c") - 1.25f64.sqrt()).abs() < 1e-6);

    let q = json(&["qbias", "--game", "chsh"]);
    assert!((num(&q, "quantum_bias") - 2f64.sqrt()).abs() < 1e-6);

    let g = json(&["gamma", "--tuple", "pauli:1,1"]);
    assert!((num(&g, "epsilon_star") - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-6);
}

#[test]
fn tuple_and_game_files() {
    let dir = tempfile::tempdir().unwrap();
    let tuple = dir.path().join("tuple.json");
    write_json(&tuple, &TupleJson::from(&pauli_pair(1.0, 1.0))).unwrap();
    let game = dir.path().join("game.json");
    write_json(
        &game,
        &RealMatrixJson {
            rows: 2,
            cols: 2,
            entries: vec![vec![1.0, 1.0], vec![1.0, -1.0]],
        },
    )
    .unwrap();
    let m = json(&["norm-m", "--game", game.to_str().unwrap(), "--tuple", tuple.to_str().unwrap()]);
    assert!((num(&m, "norm_m") - 2.0 * 2f64.sqrt()).abs() < 1e-12);

    std::fs::write(dir.path().join("bad.json"), "{\"dim\": 2}").unwrap();
    let out = run(&["norm-c", "--tuple", dir.path().join("bad.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));
}

#[test]
fn certificate_is_emitted_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let v = json(&["compatible", "--tuple", "pauli:0.5,0.5", "--emit-certificate", path.to_str().unwrap()]);
    assert_eq!(v["compatible"], Value::Bool(true));
    let cert: CertificateJson = read_json(&path).unwrap();
    cert.validate_keys().unwrap();
    let keys: Vec<&str> = cert.elements.keys().map(String::as_str).collect();
    assert_eq!(keys, ["++", "+-", "-+", "--"]);
    joint_povm_from_decomposition(&pauli_pair(0.5, 0.5), cert.blocks().unwrap()).unwrap();

    let other = dir.path().join("none.json");
    let v = json(&["compatible", "--tuple", "pauli:1,1", "--emit-certificate", other.to_str().unwrap()]);
    assert_eq!(v["compatible"], Value::Bool(false));
    assert_eq!(v["certificate"], Value::Null);
    assert!(!other.exists());
}

#[test]
fn sdp_dump_replays() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sdp.json");
    let v = json(&["norm-c", "--tuple", "pauli:1,1,1", "--dump-sdp", path.to_str().unwrap()]);
    let dump: SdpDump = read_json(&path).unwrap();
    assert_eq!(dump.blocks.len(), 8);
    let sol = sdp::solve(&dump.to_problem().unwrap()).unwrap();
    assert!((sol.primal_value - num(&v, "norm_c")).abs() < 1e-8);
}

fn lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().map(String::from).collect()
}

#[test]
fn scans_write_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("mt.csv");
    let svg = dir.path().join("mt.svg");
    let v = json(&[
        "scan", "mt", "--y", "-1:1:0.5", "--t", "0,1,2", "--out", csv.to_str().unwrap(), "--svg",
        svg.to_str().unwrap(), "--kind", "curves",
    ]);
    assert_eq!(num(&v, "points"), 15.0);
    let rows = lines(&csv);
    assert_eq!(rows.len(), 16);
    assert_eq!(rows[0], "y,t,norm_m,norm_c,ratio,violated,invertible");
    assert_eq!(rows[1], "-1,0,0.804737854124,1.41421356237,0.569035593729,false,true");
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches("<polyline").count(), 3);

    let csv = dir.path().join("gpq.csv");
    let svg = dir.path().join("gpq.svg");
    json(&[
        "scan", "gpq", "--y", "1", "--p", "0.5", "--q", "0:1:0.25", "--out", csv.to_str().unwrap(), "--svg",
        svg.to_str().unwrap(),
    ]);
    let rows = lines(&csv);
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[3], "1,0.5,0.5,1.41421356237,1.41421356237,1,true,true");
}

#[test]
fn seesaw_is_reproducible_across_thread_counts() {
    let args = ["seesaw", "--game", "i3322", "--tuple", "pauli:1,1,1", "--restarts", "6", "--seed", "7"];
    let a = Command::new(env!("CARGO_BIN_EXE_belltensor"))
        .args(args)
        .env("BELLTENSOR_THREADS", "1")
        .output()
        .unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_belltensor"))
        .args(args)
        .env("BELLTENSOR_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!((num(&v, "value") - (2.0 * 3f64.sqrt() + 2f64.sqrt()) / 4.0).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["bias"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["compatible", "--tuple", "pauli:2"]).status.code(), Some(1));
    assert_eq!(run(&["uncertainty", "--game", "mt:-1"]).status.code(), Some(1));
    assert_eq!(run(&["scan", "mt", "--y", "1:0:0.1", "--out", "/dev/null"]).status.code(), Some(1));
}

#[test]
fn verify_reports_and_fails_on_tight_tolerances() {
    let v = json(&["verify", "--only", "6"]);
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["criteria"][0]["id"], 6);

    let out = run(&["verify", "--only", "8", "--tolerance-scale", "1e-12"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["criteria"][0]["passed"], Value::Bool(false));
}
