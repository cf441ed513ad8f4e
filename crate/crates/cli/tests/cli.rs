use std::process::{Command, Output};

use serde_json::Value;

use rescode::codesim::monte_carlo_achievability;
use rescode::entropy::relative_entropy;
use rescode::qcore::PureState;
use rescode::twirl::{dephasing_channel, z_group};

fn rescode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rescode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn exit_codes() {
    assert_eq!(rescode(&["entropy", "--rho", "plus", "--sigma", "dephased"]).status.code(), Some(0));
    // usage and parse errors
    assert_eq!(rescode(&["entropy", "--rho", "plus"]).status.code(), Some(2));
    assert_eq!(rescode(&["entropy", "--rho", "nosuchstate", "--sigma", "dephased"]).status.code(), Some(2));
    assert_eq!(rescode(&["schurweyl", "table", "--n", "0", "--d", "2"]).status.code(), Some(2));
    assert_eq!(rescode(&["bound", "--rho", "plus", "--eps", "1.5"]).status.code(), Some(2));
    assert_eq!(rescode(&["bound", "--rho", "bell", "--rdm", "dephasing(3)"]).status.code(), Some(2));
    assert_eq!(rescode(&["--format", "csv", "entropy", "--rho", "plus", "--sigma", "dephased"]).status.code(), Some(2));
    assert_eq!(rescode(&["entropy", "--rho", "/nonexistent/state.json", "--sigma", "dephased"]).status.code(), Some(2));
    // numerical domain: the ground projector of diag(0;1) misses part of |+>
    let out = rescode(&["bound", "--rho", "plus", "--hamiltonian", "diag(0;1)", "--beta", "inf"]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn entropy_matches_library() {
    let v = stdout_json(&rescode(&["entropy", "--rho", "qubit(0.3)", "--sigma", "dephased"]));
    let rho = PureState::from_real(&[0.3f64.cos(), 0.3f64.sin()]).unwrap().density();
    let d = relative_entropy(&rho, &dephasing_channel(2).unwrap().apply(&rho).unwrap()).unwrap().value();
    let reported = v["values"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["quantity"] == "D")
        .unwrap()["value"]
        .as_f64()
        .unwrap();
    assert_eq!(reported, d);
}

#[test]
fn simulation_is_deterministic_and_matches_library() {
    let args = ["simulate", "--rho", "uniform(4)", "--rdm", "dephasing", "--M", "3", "--trials", "25", "--seed", "17"];
    let a = stdout_json(&rescode(&args));
    let b = stdout_json(&rescode(&args));
    assert_eq!(a, b);
    let mut threaded = vec!["--threads", "1"];
    threaded.extend_from_slice(&args);
    assert_eq!(stdout_json(&rescode(&threaded)), a);

    let lib = monte_carlo_achievability(&PureState::uniform_superposition(4).density(), &z_group(4).unwrap(), 3, 25, 17).unwrap();
    assert_eq!(a["mean_success"].as_f64().unwrap(), lib.mean_success);
    assert_eq!(a["M"], 3);
    assert_eq!(a["seed"], 17);
}

#[test]
fn csv_headers() {
    let out = rescode(&["--format", "csv", "bound", "--rho", "qubit(0.5)", "--N", "1,4,16"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,first_order,second_order,lower,upper"));
    assert_eq!(lines.count(), 3);

    let out = rescode(&["--format", "csv", "simulate", "--rho", "bell", "--rdm", "local", "--M", "2,4", "--trials", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("M,mean_success,stderr"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    let out = rescode(&["--out", path.to_str().unwrap(), "schurweyl", "table", "--n", "3", "--d", "2"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["n"], 3);
}

#[test]
fn state_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    std::fs::write(&path, r#"{"dim": 2, "re": [[0.5, 0.5], [0.5, 0.5]], "im": [[0, 0], [0, 0]]}"#).unwrap();
    let v = stdout_json(&rescode(&["entropy", "--rho", path.to_str().unwrap(), "--sigma", "dephased"]));
    assert_eq!(v["dim"], 2);
}

#[test]
fn superdense_codebook_is_perfect() {
    let v = stdout_json(&rescode(&["simulate", "--rho", "bell", "--rdm", "local", "--codebook", "0,1,2,3"]));
    assert!((v["mean_success"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}
