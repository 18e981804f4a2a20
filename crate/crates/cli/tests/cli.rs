use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symsecant")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn classify_w3_is_tangent_of_rank_three() {
    let o = run(&["classify", "--state", "w", "--n", "3"]);
    assert_eq!(code(&o), 0);
    let t = stdout(&o);
    assert!(t.contains("tangent(2)") && t.contains("τ_2"), "{t}");
    assert!(t.contains("symmetric rank: 3"));

    let j = json(&run(&["classify", "--state", "w", "--n", "3", "--format", "json"]));
    assert_eq!(j["schema"], 1);
    assert_eq!(j["label"], "tangent(2)");
    assert_eq!(j["symmetric_rank"], 3);
    assert_eq!(j["witness"]["kind"], "tangent");
}

#[test]
fn classify_ghz5_is_proper_secant() {
    let o = run(&["classify", "--state", "ghz", "--n", "5", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["label"], "proper-secant(2)");
    assert_eq!(j["taxonomy"], "σ_2*");
    assert_eq!(j["witness"]["decomposition"]["rank"], 2);
}

#[test]
fn classify_float_mode_agrees() {
    for (state, label) in [("ghz", "proper-secant(2)"), ("w", "tangent(2)")] {
        let j = json(&run(&["classify", "--state", state, "--n", "4", "--mode", "float", "--format", "json"]));
        assert_eq!(j["label"], label);
        assert_eq!(j["mode"], "float");
    }
}

#[test]
fn x_state_with_w_and_z() {
    let j = json(&run(&["classify", "--state", "x", "--n", "4", "--w", "1", "--format", "json"]));
    assert_eq!(j["label"], "proper-secant(3)");
    let j = json(&run(&["classify", "--state", "x", "--n", "4", "--z", "1/2", "--format", "json"]));
    assert_eq!(j["label"], "proper-secant(3)");
}

#[test]
fn separable_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "sep.json", r#"{"N": 4, "decomposition": [{"weight": 1, "vector": [1, 2]}]}"#);
    let o = run(&["classify", "--file", &f]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("separable"));
}

#[test]
fn json_output_is_byte_deterministic() {
    for args in [
        &["classify", "--state", "x", "--n", "5", "--w", "3", "--format", "json"][..],
        &["classify", "--state", "w", "--n", "4", "--mode", "float", "--format", "json"][..],
        &["parent-ham", "--state", "w", "--n", "4", "--sparse"][..],
        &["secant-dim", "--n", "5", "--k", "2", "--format", "json"][..],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{not json");
    assert_eq!(code(&run(&["classify", "--file", &bad])), 2);
    assert_eq!(code(&run(&["classify", "--state", "dicke", "--dicke", "1,1,1"])), 2);
    assert_eq!(code(&run(&["classify", "--state", "ghz"])), 2);
    assert_eq!(code(&run(&["classify"])), 2);
    assert_eq!(code(&run(&["sweep", "--eps-grid", ""])), 2);
    assert_eq!(code(&run(&["sweep", "--eps-grid", "0.1,-1"])), 2);
    assert_eq!(code(&run(&["nonsense"])), 2);
    assert_eq!(code(&run(&["parent-ham", "--state", "w", "--n", "4", "--j", "two"])), 2);
}

#[test]
fn sweep_csv_columns() {
    let o = run(&["sweep", "--eps-grid", "0.1,0.01,0.001"]);
    assert_eq!(code(&o), 0);
    let t = stdout(&o);
    let mut lines = t.lines();
    assert_eq!(lines.next().unwrap(), "epsilon,chordal_distance,fidelity,p,p_over_eps2");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    let last = &rows[2];
    assert!((last[4] - 0.1875).abs() < 1e-5);
    assert!(last[2] > 1.0 - 1e-5);
}

#[test]
fn parent_ham_auto_lengths() {
    let j = json(&run(&["parent-ham", "--state", "w", "--n", "6", "--j", "auto"]));
    assert_eq!(j["schema"], 1);
    assert_eq!(j["hamiltonian"]["j"], 2);
    assert_eq!(j["hamiltonian"]["verification"]["passed"], true);
    assert!(j.get("triplets").is_none());

    let j = json(&run(&["parent-ham", "--state", "x", "--n", "4", "--w", "1", "--j", "auto"]));
    assert_eq!(j["hamiltonian"]["j"], 3);
    assert_eq!(j["hamiltonian"]["terms"], serde_json::json!([1, 2]));
}

#[test]
fn parent_ham_without_kernel_is_domain_error() {
    assert_eq!(code(&run(&["parent-ham", "--state", "ghz", "--n", "4", "--j", "1"])), 4);
}

#[test]
fn parent_ham_sparse_triplets() {
    let j = json(&run(&["parent-ham", "--state", "w", "--n", "3", "--sparse"]));
    let t = j["triplets"].as_array().unwrap();
    assert!(!t.is_empty());
    assert!(t.iter().all(|e| e["row"].as_u64().unwrap() < 8 && e["col"].as_u64().unwrap() < 8));
}

#[test]
fn secant_dim_matches_prediction() {
    for (n, k, d) in [("4", "2", 3), ("4", "3", 4), ("7", "4", 7)] {
        let o = run(&["secant-dim", "--n", n, "--k", k, "--format", "json"]);
        assert_eq!(code(&o), 0);
        let j = json(&o);
        assert_eq!(j["estimate"]["estimated"], d);
        assert_eq!(j["matches"], true);
    }
}

#[test]
fn slocc_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"[[1, "1/3"], [0, 2]]"#);
    let out = dir.path().join("out.json");
    let o = run(&["slocc", "--state", "w", "--n", "3", "--matrix", &a, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("labels match"));
    let o = run(&["classify", "--file", out.to_str().unwrap(), "--format", "json"]);
    assert_eq!(json(&o)["label"], "tangent(2)");
}

#[test]
fn slocc_identity_leaves_state_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(dir.path(), "id.json", r#"{"matrix": [[1, 0], [0, 1]]}"#);
    let src = write(dir.path(), "s.json", r#"{"N": 3, "coeffs": [["1/2", 0], [0, 1], 3, [0, "-2/7"]]}"#);
    let out = dir.path().join("out.json");
    assert_eq!(code(&run(&["slocc", "--file", &src, "--matrix", &id, "--out", out.to_str().unwrap()])), 0);
    let got: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(got["coeffs"], serde_json::json!([["1/2", "0"], ["0", "1"], ["3", "0"], ["0", "-2/7"]]));
}

#[test]
fn slocc_singular_matrix_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", "[[1, 2], [2, 4]]");
    assert_eq!(code(&run(&["slocc", "--state", "w", "--n", "3", "--matrix", &a])), 2);
}
