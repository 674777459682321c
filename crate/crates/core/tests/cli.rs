//! End-to-end tests of the `bioamb` binary: output formats, exit codes, stdin.

use std::io::Write;
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_bioamb");

fn corpus(name: &str) -> String {
    format!("{}/tests/corpus/{name}.bioamb", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child.stdin.as_mut().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn fmt_is_idempotent() {
    let first = run(&["fmt", &corpus("cell_mol")]);
    assert!(first.status.success(), "{}", stderr(&first));
    let second = run_stdin(&["fmt", "-"], &stdout(&first));
    assert!(second.status.success(), "{}", stderr(&second));
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn parse_errors_report_position_and_exit_1() {
    let out = run_stdin(&["fmt", "-"], "[0]^a |");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("1:7"), "stderr: {}", stderr(&out));
}

#[test]
fn open_terms_exit_1() {
    let out = run_stdin(&["analyze", "-"], "rec X. enter n. Y");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Y"), "stderr: {}", stderr(&out));
}

#[test]
fn conflicting_format_flags_exit_1() {
    let out = run(&["analyze", "--json", "--dot", &corpus("cell_mol")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_file_exits_1() {
    let out = run(&["analyze", "/nonexistent.bioamb"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_json_envelope() {
    let out = run(&["analyze", "--json", &corpus("enter_accept")]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(doc["schema_version"], "1");
    assert_eq!(doc["command"], "analyze");
    assert_eq!(doc["input_digest"].as_str().unwrap().len(), 64);
    let payload = &doc["payload"];
    for key in ["top", "ambients", "contents", "bindings", "stats"] {
        assert!(payload.get(key).is_some(), "payload missing {key}");
    }
    assert_eq!(payload["top"], "⊤");
    // a may end up inside b.
    let b = payload["contents"]["b"].as_array().unwrap();
    assert!(b.iter().any(|v| v == "a"));
}

#[test]
fn analyze_empty_process() {
    let out = run_stdin(&["analyze", "-", "--json"], "0");
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["payload"]["contents"], serde_json::json!({"⊤": []}));
    assert_eq!(doc["payload"]["bindings"], serde_json::json!({}));
}

#[test]
fn analyze_dot_is_wellformed() {
    let out = run(&["analyze", "--dot", &corpus("cell_mol")]);
    assert!(out.status.success());
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches('{').count(), dot.matches('}').count());
    assert!(dot.contains("shape=oval"));
    assert!(dot.contains("shape=box"));
    assert!(dot.contains("color=black"));
    assert!(dot.contains("color=red"));
}

#[test]
fn simulate_trace_lists_transitions() {
    let out = run(&["simulate", "--trace", &corpus("cell_mol")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("6 states, 7 transitions"));
    assert!(text.contains("s0 --rec_unfold--> s1"));
    assert!(text.contains("s2 --exit_expel--> s3"));
}

#[test]
fn simulate_truncation_warns_but_succeeds() {
    let out = run(&["simulate", "--depth", "1", &corpus("cell_mol")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("truncated"));
    assert!(stdout(&out).contains("truncated"));
}

#[test]
fn simulate_json_counts_match() {
    let out = run(&["simulate", "--json", &corpus("enter_accept")]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["payload"]["stats"]["states"], 2);
    assert_eq!(doc["payload"]["stats"]["edges"], 1);
    assert_eq!(doc["payload"]["edges"][0]["rule"], "enter_accept");
}

#[test]
fn verify_clean_file_exits_0() {
    let out = run(&["verify", &corpus("merge")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("violations: none"));
}

#[test]
fn verify_without_input_exits_1() {
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_random_covers_families() {
    let out = run(&["verify", "--random", "16", "--seed", "42", "--depth", "5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["payload"]["total_violations"], 0);
    assert_eq!(doc["payload"]["families"].as_array().unwrap().len(), 8);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        vec!["analyze", "--json"],
        vec!["analyze", "--dot"],
        vec!["simulate", "--json"],
        vec!["verify", "--json"],
    ] {
        let mut full = args.clone();
        let path = corpus("cell_mol");
        full.push(&path);
        let a = run(&full);
        let b = run(&full);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "args {args:?} differ between runs");
    }
}
