use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_egn-bounds"));
    cmd.env_remove("EGN_MAX_QUBITS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const GHZ3: &str = r#"{"n_qubits": 3, "tensor": [
    {"alpha": [3,3,0], "value": 1}, {"alpha": [0,3,3], "value": 1}, {"alpha": [3,0,3], "value": 1},
    {"alpha": [1,1,1], "value": 1}, {"alpha": [1,2,2], "value": -1},
    {"alpha": [2,1,2], "value": -1}, {"alpha": [2,2,1], "value": -1}]}"#;

fn mixed(n: usize) -> String {
    let dim = 1usize << n;
    let rows: Vec<Vec<f64>> =
        (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 / dim as f64 } else { 0.0 }).collect()).collect();
    serde_json::json!({"n_qubits": n, "matrix": {"re": rows}}).to_string()
}

#[test]
fn region_thresholds() {
    for (n, m, expected) in [
        ("3", "2", "tetra_minus"),
        ("3", "3", "octahedron"),
        ("5", "3", "tetra_plus"),
        ("5", "4", "octahedron"),
        ("4", "3", "ball"),
    ] {
        let out = run(&["region", "--n", n, "--m", m]);
        assert!(out.status.success());
        let v = json_of(&out);
        assert_eq!(v["region"], expected, "N={n} M={m}");
        assert_eq!(v["schema"], "egn-bounds/1");
    }
    let out = run(&["region", "--n", "3", "--m", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json_of(&out)["error"].is_string());
}

#[test]
fn ghz_table_sums() {
    let out = run(&["ghz-table", "--n-min", "3", "--n-max", "7"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,d1,d2,d3,abs_sum,theta,psi,phi"));
    let sums: Vec<f64> = lines.map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    let s2 = 2f64.sqrt();
    for (got, want) in sums.iter().zip([3.0, s2, 3.0, s2, 3.0]) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
    assert_eq!(sums.len(), 5);
}

#[test]
fn bound_on_mixed_state_is_zero() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "mixed.json", &mixed(3));
    let out = run(&["bound", "--state", path.to_str().unwrap(), "--m", "3"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["robustness_lower_bound"], 0.0);
    assert_eq!(v["trace_distance_lower_bound"], 0.0);
    assert_eq!(v["nontrivial"], true);
}

#[test]
fn bound_on_ghz3() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "ghz3.json", GHZ3);
    let p = path.to_str().unwrap();

    let v = json_of(&run(&["bound", "--state", p, "--m", "3"]));
    assert!((v["robustness_lower_bound"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["trace_distance_lower_bound"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((v["abs_sum"].as_f64().unwrap() - 3.0).abs() < 1e-9);

    let v = json_of(&run(&["bound", "--state", p, "--m", "3", "--no-optimize"]));
    assert_eq!(v["triple"]["d3"], 1.0);
    assert_eq!(v["robustness_lower_bound"], 0.0);
    assert_eq!(v["optimized"], false);

    let v = json_of(&run(&["bound", "--state", p, "--m", "2"]));
    assert_eq!(v["nontrivial"], false);
    assert_eq!(v["robustness_lower_bound"], 0.0);

    let v = json_of(&run(&["bound", "--state", p, "--m", "3", "--per-qubit", "--grid", "8"]));
    assert!((v["abs_sum"].as_f64().unwrap() - 3.0).abs() < 1e-6);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "ghz3.json", GHZ3);
    let args = ["bound", "--state", path.to_str().unwrap(), "--m", "3", "--seed", "4"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn project_ghz3() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "ghz3.json", GHZ3);
    let out = run(&["project", "--state", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json_of(&out);
    let tensor = v["tensor"].as_array().unwrap();
    assert_eq!(tensor.len(), 4);
    for entry in tensor {
        let alpha: Vec<u64> = entry["alpha"].as_array().unwrap().iter().map(|a| a.as_u64().unwrap()).collect();
        let expected = if alpha == [0, 0, 0] || alpha == [3, 3, 0] { 1.0 } else { 0.0 };
        assert_eq!(entry["value"].as_f64().unwrap(), expected, "{alpha:?}");
    }
    assert_eq!(v["triple"]["d3"], 1.0);
}

#[test]
fn verify_enip_standard_and_custom() {
    for n in ["2", "3", "4"] {
        let out = run(&["verify-enip", "--n", n]);
        assert!(out.status.success());
        assert_eq!(json_of(&out)["passed"], true);
    }
    let dir = TempDir::new().unwrap();
    // σ1 on the first qubit anticommutes with (3,3,0), which is listed as surviving
    let bad = write(&dir, "bad.json", r#"{"n_qubits": 3, "surviving": [[0,0,0],[3,3,0]], "generators": [[1,0,0]]}"#);
    let out = run(&["verify-enip", "--n", "3", "--spec", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["passed"], false);
    let out = run(&["verify-enip", "--n", "4", "--spec", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn domain_and_usage_errors() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"n_qubits": 1, "matrix": {"re": [[1, 0], [0, 1]]}}"#);
    let out = run(&["bound", "--state", bad.to_str().unwrap(), "--m", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json_of(&out)["error"].is_string());

    let out = run(&["project", "--state", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json_of(&out)["error"].is_string());

    assert_eq!(run(&["bound"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["region", "--n", "x", "--m", "2"]).status.code(), Some(2));
}

#[test]
fn size_guard_from_environment() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "ghz3.json", GHZ3);
    let out = bin().args(["project", "--state", path.to_str().unwrap()]).env("EGN_MAX_QUBITS", "2").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(json_of(&out)["error"].as_str().unwrap().contains("maximum"));
    let out = bin().args(["region", "--n", "3", "--m", "2"]).env("EGN_MAX_QUBITS", "lots").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn self_check_quick_passes() {
    let out = run(&["self-check", "--quick", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json_of(&out);
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_object().unwrap().len() >= 4);
}
