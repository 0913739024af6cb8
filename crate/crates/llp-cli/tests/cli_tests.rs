//! End-to-end tests of the `llp` binary: output shapes, golden values,
//! exit codes, and determinism.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn llp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_llp"))
}

fn write_instance(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut file = std::fs::File::create(&path).unwrap();
    file.write_all(body.as_bytes()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    llp().args(args).output().unwrap()
}

fn stdout_json(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).unwrap()
}

#[test]
fn lis_example_all_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "lis.json",
        r#"{"problem": "lis", "A": [35, 38, 27, 45, 32]}"#,
    );
    let output = run(&[
        "solve",
        path.to_str().unwrap(),
        "--mode",
        "rounds",
        "--workers",
        "2",
    ]);
    let json = stdout_json(&output);
    assert_eq!(json["G"], serde_json::json!([1, 2, 1, 3, 2]));
    assert_eq!(json["optimum"], 3);
    assert_eq!(json["witness"], serde_json::json!([1, 2, 4]));
    assert!(json["rounds"].is_u64());
    assert!(json["advances"].is_u64());
    assert!(json.get("verified").is_none(), "only present with --verify");
    assert!(json.get("trace").is_none(), "only present with --trace");
}

#[test]
fn sequential_output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "lis.json",
        r#"{"problem": "lis", "A": [35, 38, 27, 45, 32]}"#,
    );
    let first = run(&["solve", path.to_str().unwrap()]);
    let second = run(&["solve", path.to_str().unwrap()]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn knapsack_verify_example() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "ks.json",
        r#"{"problem": "knapsack", "w": [2, 3, 4], "v": [3, 4, 5], "W": 5}"#,
    );
    let output = run(&["solve", path.to_str().unwrap(), "--verify"]);
    let json = stdout_json(&output);
    assert_eq!(json["optimum"], 7);
    assert_eq!(json["verified"], true);
    assert_eq!(json["witness"], serde_json::json!([1, 2]));
    // Grid rows are 1..=n by capacities 0..=W.
    assert_eq!(json["G"][2], serde_json::json!([0, 0, 3, 4, 5, 7]));
}

#[test]
fn single_key_tree() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(dir.path(), "obst.json", r#"{"problem": "obst", "p": [7]}"#);
    let output = run(&["solve", path.to_str().unwrap()]);
    let json = stdout_json(&output);
    assert_eq!(json["optimum"], 7);
    assert_eq!(
        json["witness"],
        serde_json::json!({"key": 1, "left": null, "right": null})
    );
}

#[test]
fn chain_witness_shape() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "chain.json",
        r#"{"problem": "chain", "dims": [10, 30, 5, 60]}"#,
    );
    let output = run(&["solve", path.to_str().unwrap(), "--verify"]);
    let json = stdout_json(&output);
    assert_eq!(json["optimum"], 4500);
    assert_eq!(
        json["witness"],
        serde_json::json!({
            "left": {"left": {"matrix": 1}, "right": {"matrix": 2}},
            "right": {"matrix": 3},
        })
    );
}

#[test]
fn contradictory_obst_constraints_exit_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "bad.json",
        r#"{"problem": "obst", "p": [1, 2, 3], "forbidden_root": 2, "balanced": true}"#,
    );
    let output = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("infeasible"), "stderr: {stderr}");
}

#[test]
fn malformed_json_exits_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(dir.path(), "broken.json", r#"{"problem": "lis", "A": [1,"#);
    let output = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("invalid instance"), "stderr: {stderr}");
}

#[test]
fn unknown_problem_tag_exits_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "odd.json",
        r#"{"problem": "tsp", "cities": [1, 2]}"#,
    );
    let output = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn duplicate_lis_values_exit_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(dir.path(), "dup.json", r#"{"problem": "lis", "A": [5, 5]}"#);
    let output = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn implications_reject_round_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "imp.json",
        r#"{"problem": "knapsack", "w": [3, 2], "v": [4, 10], "W": 5,
            "implications": [[2, 1]]}"#,
    );
    let output = run(&["solve", path.to_str().unwrap(), "--mode", "rounds"]);
    assert_eq!(output.status.code(), Some(3));
    let sequential = run(&["solve", path.to_str().unwrap(), "--verify"]);
    let json = stdout_json(&sequential);
    assert_eq!(json["optimum"], 14);
    assert_eq!(json["witness"], serde_json::json!([1, 2]));
}

#[test]
fn oversized_verify_exits_validation() {
    let values: Vec<String> = (0..21).map(|x| (x * 3).to_string()).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "big.json",
        &format!(r#"{{"problem": "lis", "A": [{}]}}"#, values.join(", ")),
    );
    let plain = run(&["solve", path.to_str().unwrap()]);
    assert!(plain.status.success(), "solving itself is fine");
    let verify = run(&["solve", path.to_str().unwrap(), "--verify"]);
    assert_eq!(verify.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&verify.stderr);
    assert!(stderr.contains("too large"), "stderr: {stderr}");
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "lis.json",
        r#"{"problem": "lis", "A": [3, 1, 4]}"#,
    );
    let out = dir.path().join("result.json");
    let output = run(&[
        "solve",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    assert!(output.stdout.is_empty());
    let json: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["optimum"], 2);
}

#[test]
fn trace_flag_includes_replayable_events() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "lis.json",
        r#"{"problem": "lis", "A": [35, 38, 27, 45, 32]}"#,
    );
    let output = run(&["solve", path.to_str().unwrap(), "--trace"]);
    let json = stdout_json(&output);
    let trace = json["trace"].as_array().unwrap();
    assert_eq!(trace.len(), json["advances"].as_u64().unwrap() as usize);
    for event in trace {
        assert!(event["new"].as_i64().unwrap() > event["old"].as_i64().unwrap());
    }
}

#[test]
fn async_matches_sequential() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "ks.json",
        r#"{"problem": "knapsack", "w": [2, 3, 4], "v": [3, 4, 5], "W": 7}"#,
    );
    let sequential = stdout_json(&run(&["solve", path.to_str().unwrap()]));
    let asynchronous = stdout_json(&run(&[
        "solve",
        path.to_str().unwrap(),
        "--mode",
        "async",
        "--workers",
        "3",
        "--staleness",
        "2",
        "--seed",
        "7",
    ]));
    assert_eq!(sequential["G"], asynchronous["G"]);
    assert_eq!(sequential["optimum"], asynchronous["optimum"]);
}

#[test]
fn check_linearity_counterexample() {
    let output = run(&["check-linearity", "sum-ge-1", "1", "1"]);
    assert_eq!(output.status.code(), Some(5));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert_eq!(stdout, "counterexample: (0, 0)\n");
}

#[test]
fn check_linearity_ok_for_builtins() {
    for (name, dims) in [
        ("jobs", vec!["4", "4", "4"]),
        ("lis", vec!["3", "3", "3"]),
        ("obst", vec!["4", "4", "4"]),
        ("knapsack", vec!["3", "3", "3", "3"]),
    ] {
        let mut args = vec!["check-linearity", name];
        args.extend(dims);
        let output = run(&args);
        assert_eq!(output.status.code(), Some(0), "{name}");
        assert_eq!(String::from_utf8_lossy(&output.stdout), "ok\n", "{name}");
    }
}

#[test]
fn check_linearity_rejects_unknown_and_bad_arity() {
    let unknown = run(&["check-linearity", "subset-sum", "1", "1"]);
    assert_eq!(unknown.status.code(), Some(3));
    let arity = run(&["check-linearity", "lis", "3", "3"]);
    assert_eq!(arity.status.code(), Some(3));
}

#[test]
fn bench_reports_without_asserting() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "ks.json",
        r#"{"problem": "knapsack", "w": [2, 3, 4], "v": [3, 4, 5], "W": 5}"#,
    );
    let output = run(&[
        "bench",
        path.to_str().unwrap(),
        "--mode",
        "rounds",
        "--workers",
        "2",
        "--repeat",
        "3",
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("rounds="), "stdout: {stdout}");
    assert!(stdout.contains("best"), "stdout: {stdout}");
}
