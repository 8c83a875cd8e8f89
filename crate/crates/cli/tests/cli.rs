use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quiver-bb")).args(args).output().expect("binary runs")
}

fn golden(command: &str, extra: &[&str]) -> Output {
    let quiver = data("kronecker3.json");
    let mut args = vec![command, "--quiver", &quiver, "--dim", "2,3", "--theta", "1,0"];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn poincare_prints_polynomial() {
    let o = golden("poincare", &["--generic"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("1 + t^2 + 3t^4 + 3t^6 + 3t^8 + t^10 + t^12"), "{text}");
    assert!(text.contains("config "));
    assert!(text.contains("invariants: balance ok"));
}

#[test]
fn fixed_points_has_thirteen_rows() {
    let o = golden("fixed-points", &["--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 14, "{text}");
}

#[test]
fn json_report_is_deterministic() {
    let a = golden("attractors", &["--format", "json", "--seed", "3"]);
    let b = golden("attractors", &["--format", "json", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["result"]["components"].as_array().unwrap().len(), 13);
    assert_eq!(doc["config_hash"].as_str().unwrap().len(), 64);
    assert!(doc["invariants"].as_array().unwrap().iter().all(|c| c["ok"] == true));
    let c = golden("attractors", &["--format", "json", "--seed", "4"]);
    let other: serde_json::Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_ne!(doc["config_hash"], other["config_hash"]);
}

#[test]
fn explicit_weights_match_generic() {
    let w = data("kronecker3_weights.json");
    let a = golden("poincare", &["--weights", &w, "--format", "json"]);
    let b = golden("poincare", &["--format", "json"]);
    let a: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(a["result"]["betti"], b["result"]["betti"]);
    let torus = data("kronecker3_torus.json");
    let c = golden("poincare", &["--weights", &torus, "--format", "json"]);
    let c: serde_json::Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_eq!(c["result"]["betti"], b["result"]["betti"]);
}

#[test]
fn non_coprime_exits_three() {
    let quiver = data("kronecker3.json");
    let o = run(&["poincare", "--quiver", &quiver, "--dim", "2,2", "--theta", "1,0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    let diag: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["error"]["kind"], "unsupported");
}

#[test]
fn validation_errors_exit_two() {
    let o = run(&["fixed-points", "--dim", "2,3", "--theta", "1,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["fixed-points", "--quiver", "/nonexistent.json", "--dim", "2,3", "--theta", "1,0"]);
    assert_eq!(o.status.code(), Some(2));
    let quiver = data("kronecker3.json");
    let o = run(&["fixed-points", "--quiver", &quiver, "--dim", "2,x", "--theta", "1,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cells_and_normal_form() {
    let o = golden("cells", &["--format", "latex"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("\\ast"));
    assert!(text.contains("3232 & 6"));
    let o = golden("normal-form", &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("dim 6"));
    assert!(text.contains("unique ok"));
}

#[test]
fn count_matches_polynomial() {
    let o = golden("count", &["--field", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("183"), "{text}");
    assert!(text.contains("matches-polynomial ok"));
}

#[test]
fn kronecker_closed_forms() {
    let o = run(&["kronecker", "--l", "2", "--r", "1", "--check", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["result"]["betti"], serde_json::json!([1, 1, 3, 3, 3, 1, 1]));
    assert_eq!(doc["result"]["labels"].as_array().unwrap().len(), 13);
    let o = run(&["kronecker", "--l", "1", "--r", "2"]);
    assert_eq!(o.status.code(), Some(2));
}
