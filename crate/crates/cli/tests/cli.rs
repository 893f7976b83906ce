//! End-to-end runs of the binary: exit codes, report bodies, determinism.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_multilin"))
}

fn run_with_stdin(args: &[&str], payload: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .expect("stdin is piped")
        .write_all(payload.as_bytes())
        .expect("payload fits the pipe");
    child.wait_with_output().expect("binary exits")
}

fn report(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is one JSON report")
}

#[test]
fn verify_runs_are_deterministic_per_seed() {
    let first = bin().args(["verify", "--suite", "duality", "--seed", "7"]).output().unwrap();
    let second = bin().args(["verify", "--suite", "duality", "--seed", "7"]).output().unwrap();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let third = bin().args(["verify", "--suite", "duality", "--seed", "8"]).output().unwrap();
    assert!(third.status.success());
    assert_ne!(first.stdout, third.stdout, "the seed is embedded in the report");
}

#[test]
fn unknown_suite_exits_two_with_an_error_report() {
    let out = bin().args(["verify", "--suite", "foo"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let body = report(&out);
    assert_eq!(body["status"], "error");
    assert!(body["message"].as_str().unwrap().contains("foo"));
}

#[test]
fn unknown_tolerance_name_exits_two() {
    let out = bin().args(["verify", "--tol", "bogus=1e-3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["status"], "error");
}

#[test]
fn unknown_family_exits_two() {
    let out = bin().args(["verify", "--family", "sub"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn add_family_calculus_fails_with_exit_one() {
    let out = bin()
        .args(["verify", "--suite", "calculus", "--family", "add", "--seed", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let body = report(&out);
    assert_eq!(body["status"], "fail");
    assert!(body["residuals"]["compatibility"].as_f64().unwrap() > 1e-3);
    let failed: Vec<_> = body["artifacts"]["failed"].as_array().unwrap().to_vec();
    assert!(failed.contains(&serde_json::json!("compatibility")));
}

#[test]
fn tolerance_overrides_flip_the_verdict() {
    let out = bin()
        .args(["verify", "--suite", "axioms", "--tol", "multilinearity=-1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let body = report(&out);
    assert_eq!(body["status"], "fail");
    assert_eq!(body["artifacts"]["tolerance_overrides"]["multilinearity"], -1.0);
}

#[test]
fn malformed_json_exits_two_naming_line_and_column() {
    let out = run_with_stdin(&["spectrum"], "{\"matrix\": [[[0,1],[1,\n 1j]]]}");
    assert_eq!(out.status.code(), Some(2));
    let body = report(&out);
    assert_eq!(body["status"], "error");
    let message = body["message"].as_str().unwrap();
    assert!(message.contains("line 2"), "got: {message}");
    assert!(message.contains("column"), "got: {message}");
}

#[test]
fn spectrum_reports_sorted_eigenvalues() {
    let out = run_with_stdin(&["spectrum"], r#"{"matrix":[[[2,0],[1,0]],[[1,0],[2,0]]]}"#);
    assert_eq!(out.status.code(), Some(0));
    let body = report(&out);
    let values = body["artifacts"]["eigenvalues"].as_array().unwrap();
    assert_eq!(values.len(), 2);
    assert!((values[0][0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((values[1][0].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!(values[0][1].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn spectrum_of_the_identity_is_flat() {
    let out = run_with_stdin(&["spectrum"], r#"{"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#);
    assert_eq!(out.status.code(), Some(0));
    let body = report(&out);
    let values = body["artifacts"]["eigenvalues"].as_array().unwrap();
    for v in values {
        assert!((v[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!(v[1].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn spectrum_returns_an_orthonormal_eigenbasis_on_request() {
    let out = run_with_stdin(&["spectrum"], r#"{"matrix":[[[2,0],[1,0]],[[1,0],[2,0]]],"basis":true}"#);
    assert_eq!(out.status.code(), Some(0));
    let body = report(&out);
    let basis = body["artifacts"]["basis"].as_array().unwrap();
    // Columns are eigenvectors of [[2,1],[1,2]]: (1,-1)/sqrt(2) and (1,1)/sqrt(2).
    let s = 0.5f64.sqrt();
    let col = |j: usize| -> Vec<f64> {
        (0..2).map(|i| basis[i][j][0].as_f64().unwrap()).collect()
    };
    let c0 = col(0);
    let c1 = col(1);
    assert!((c0[0].abs() - s).abs() < 1e-9 && (c0[1].abs() - s).abs() < 1e-9);
    assert!((c0[0] * c0[1] + s * s).abs() < 1e-9, "first column alternates signs");
    assert!((c1[0] - s).abs() < 1e-9 && (c1[1] - s).abs() < 1e-9);
}

#[test]
fn non_normal_matrices_are_refused_with_the_commutator_entry() {
    let out = run_with_stdin(&["spectrum"], r#"{"matrix":[[[0,0],[1,0]],[[0,0],[0,0]]]}"#);
    assert_eq!(out.status.code(), Some(2));
    let body = report(&out);
    assert_eq!(body["status"], "error");
    assert!(body["message"].as_str().unwrap().contains("commutator"));
}

#[test]
fn eval_applies_the_product_rule_on_a_diagonal_operator() {
    // P(z, w) = zw lifts to (x, y) -> (Ax) .* (Ay); on A = diag(1, 2) and
    // x = y = (1, 1) the node values are the squared eigenvalues.
    let payload = r#"{
        "operator": [[[1,0],[0,0]],[[0,0],[2,0]]],
        "poly": {"nvars":2,"terms":[{"c":[1,0],"k":[1,1]}]},
        "inputs": [[[1,0],[1,0]],[[1,0],[1,0]]]
    }"#;
    let out = run_with_stdin(&["eval"], payload);
    assert_eq!(out.status.code(), Some(0));
    let body = report(&out);
    let y = body["artifacts"]["output"].as_array().unwrap();
    assert!((y[0][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((y[1][0].as_f64().unwrap() - 4.0).abs() < 1e-12);
    let bracket = &body["artifacts"]["norm_bracket"];
    assert!(bracket["lower"].as_f64().unwrap() <= bracket["upper"].as_f64().unwrap());
}

#[test]
fn eval_of_the_identity_polynomial_reproduces_the_operator() {
    let payload = r#"{
        "operator": [[[2,0],[1,0]],[[1,0],[2,0]]],
        "poly": {"nvars":1,"terms":[{"c":[1,0],"k":[1]}]},
        "inputs": [[[1,0],[-1,0]]]
    }"#;
    let out = run_with_stdin(&["eval"], payload);
    assert_eq!(out.status.code(), Some(0));
    let y = report(&out)["artifacts"]["output"].as_array().unwrap().to_vec();
    assert!((y[0][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((y[1][0].as_f64().unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn eval_on_a_grid_multiplier_matches_the_closed_form() {
    // Multiplication by x on the 4-point midpoint grid of (0, 1) with
    // P(z, w) = z^2 + zw + w^2 and g = h = 1 gives node values 3 x_i^2.
    let nodes = [0.125f64, 0.375, 0.625, 0.875];
    let multiplier: Vec<String> = nodes.iter().map(|x| format!("[{x},0]")).collect();
    let payload = format!(
        r#"{{
            "grid": {{"interval": [0,1], "npoints": 4, "multiplier": [{}]}},
            "poly": {{"nvars":2,"terms":[{{"c":[1,0],"k":[2,0]}},{{"c":[1,0],"k":[1,1]}},{{"c":[1,0],"k":[0,2]}}]}},
            "inputs": [[[1,0],[1,0],[1,0],[1,0]],[[1,0],[1,0],[1,0],[1,0]]]
        }}"#,
        multiplier.join(",")
    );
    let out = run_with_stdin(&["eval"], &payload);
    assert_eq!(out.status.code(), Some(0));
    let y = report(&out)["artifacts"]["output"].as_array().unwrap().to_vec();
    for (i, x) in nodes.iter().enumerate() {
        assert!((y[i][0].as_f64().unwrap() - 3.0 * x * x).abs() < 1e-12);
        assert!(y[i][1].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn eval_payload_family_overrides_the_flag() {
    // The additive family materializes through its multilinear stand-in
    // T_2 = 2 (entrywise product), so P(z, w) = zw maps (x, y) to
    // 2 (Ax) .* (Ay): double the mult-family answer.
    let payload = r#"{
        "operator": [[[1,0],[0,0]],[[0,0],[2,0]]],
        "poly": {"nvars":2,"terms":[{"c":[1,0],"k":[1,1]}]},
        "family": "add",
        "inputs": [[[1,0],[1,0]],[[1,0],[1,0]]]
    }"#;
    let out = run_with_stdin(&["eval"], payload);
    assert_eq!(out.status.code(), Some(0));
    let y = report(&out)["artifacts"]["output"].as_array().unwrap().to_vec();
    assert!((y[0][0].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((y[1][0].as_f64().unwrap() - 8.0).abs() < 1e-12);
}

#[test]
fn eval_dimension_mismatch_exits_two_with_status_error() {
    let payload = r#"{
        "operator": [[[1,0],[0,0]],[[0,0],[2,0]]],
        "poly": {"nvars":1,"terms":[{"c":[1,0],"k":[1]}]},
        "inputs": [[[1,0]]]
    }"#;
    let out = run_with_stdin(&["eval"], payload);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["status"], "error");
}

#[test]
fn norm_brackets_a_rank_one_bilinear_form() {
    // coeffs e_1 x e_1: a rank-one bilinear map with injective norm 1.
    let payload = r#"{
        "domain": [2, 2],
        "codomain": 1,
        "coeffs": [[1,0],[0,0],[0,0],[0,0]]
    }"#;
    let out = run_with_stdin(&["norm", "--seed", "5"], payload);
    assert_eq!(out.status.code(), Some(0));
    let body = report(&out);
    let lower = body["artifacts"]["lower"].as_f64().unwrap();
    let upper = body["artifacts"]["upper"].as_f64().unwrap();
    assert!((lower - 1.0).abs() < 1e-9, "lower = {lower}");
    assert!((upper - 1.0).abs() < 1e-9, "upper = {upper}");
    assert!(body["residuals"]["bracket_gap"].as_f64().unwrap() >= 0.0);
}

#[test]
fn reports_go_to_the_out_path_when_asked() {
    let dir = std::env::temp_dir().join("multilin-cli-out-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let _ = std::fs::remove_file(&path);
    let out = bin()
        .args(["verify", "--suite", "axioms", "--seed", "11", "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty(), "report should not also hit stdout");
    let twin = bin().args(["verify", "--suite", "axioms", "--seed", "11"]).output().unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), twin.stdout);
    let _ = std::fs::remove_file(&path);
}

#[test]
fn payloads_read_from_files_match_stdin_runs() {
    let dir = std::env::temp_dir().join("multilin-cli-payload-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("payload.json");
    let payload = r#"{"matrix":[[[2,0],[1,0]],[[1,0],[2,0]]]}"#;
    std::fs::write(&path, payload).unwrap();
    let from_file = bin().args(["spectrum", path.to_str().unwrap()]).output().unwrap();
    let from_stdin = run_with_stdin(&["spectrum"], payload);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_stdin.stdout);
    let _ = std::fs::remove_file(&path);
}

#[test]
fn missing_payload_files_exit_two() {
    let out = bin().args(["spectrum", "/nonexistent/payload.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["status"], "error");
}
