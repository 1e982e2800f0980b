//! End-to-end tests of the command-line interface: exit-code contract,
//! JSON report schema, batch mode, and hint handling.

use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output, Stdio};

const EXAMPLE_31: &str = "(6*p/u + 3/x)*q - 6*p^3/u^2 - 6*p^2/(x*u) - 6*p/x^2 - 6*u/x^3";

fn maxsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxsym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn maxsym_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_maxsym"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary finishes")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_maximally_symmetric_exits_zero() {
    let out = maxsym(&["classify", "3*u''^2/(1+u')"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("MaximallySymmetric"), "{text}");
}

#[test]
fn classify_six_symmetry_exits_three() {
    let out = maxsym(&["classify", "3/2*u''^2/u'", "--json"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json_stdout(&out);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["verdict"], "NotMaximallySymmetric");
    assert_eq!(v["witness"], "I2");
    assert_eq!(v["invariants"]["i2"], "-9/(p^2)");
    assert_eq!(v["vanishing"][0], true);
    assert_eq!(v["vanishing"][1], false);
}

#[test]
fn classify_parse_error_exits_two() {
    let out = maxsym(&["classify", "("]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn json_expressions_reparse_canonically() {
    let out = maxsym(&["classify", "3*u''^2/(1+u')", "--json"]);
    let v = json_stdout(&out);
    // The echoed input is the canonical form and re-parsing is stable.
    assert_eq!(v["input"], "3*q^2/(1+p)");
    let out2 = maxsym(&["classify", v["input"].as_str().unwrap(), "--json"]);
    assert_eq!(json_stdout(&out2)["input"], v["input"]);
}

#[test]
fn synthesize_first_example_reports_stages() {
    let out = maxsym(&["synthesize", EXAMPLE_31, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["transformation"]["phi"], "x");
    assert_eq!(v["auxiliaries"]["a3"], "1/(x*u^2)");
    assert_eq!(v["auxiliaries"]["a1"], "1/(x*u^2)");
    let trace = v["trace"].as_array().unwrap();
    assert!(trace.len() >= 6);
    for step in trace {
        assert_eq!(step["residual-check"], "zero");
        assert!(step["stage"].is_string());
        assert!(step["equation"].is_string());
        assert!(step["ansatz"].is_string());
        assert!(step["result"].is_string());
    }
    assert_eq!(trace.last().unwrap()["stage"], "VERIFIED");
}

#[test]
fn synthesize_completion_case() {
    let out = maxsym(&["synthesize", "x", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["transformation"]["phi"], "x");
    assert_eq!(v["transformation"]["psi"], "u-1/24*x^4");
    let stages: Vec<&str> = v["trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["stage"].as_str().unwrap())
        .collect();
    assert!(stages.contains(&"COMPLETION"));
}

#[test]
fn synthesize_not_applicable_exits_three() {
    let out = maxsym(&["synthesize", "3/2*u''^2/u'", "--json"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json_stdout(&out);
    assert_eq!(v["status"], "not-applicable");
    assert_eq!(v["witness"], "I2");
}

#[test]
fn synthesize_with_valid_hints() {
    let out = maxsym(&[
        "synthesize",
        "3*q^2/(1+p)",
        "--hint",
        "a3=1/(1+p)^2",
        "--hint",
        "f2=0",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["status"], "ok");
    // Canonical printing expands the denominator.
    assert_eq!(v["auxiliaries"]["a2"], "-q/(1+3*p+3*p^2+p^3)");
}

#[test]
fn synthesize_rejects_bad_hint_with_partial() {
    let out = maxsym(&["synthesize", "3*q^2/(1+p)", "--hint", "a3=x", "--json"]);
    assert_eq!(out.status.code(), Some(4));
    let v = json_stdout(&out);
    assert_eq!(v["status"], "partial");
    assert_eq!(v["blocking_stage"], "A3");
    let msg = v["error"]["message"].as_str().unwrap();
    assert!(msg.contains("hint"), "{msg}");
    assert!(msg.contains("residual"), "{msg}");
}

#[test]
fn verify_published_transformation() {
    let out = maxsym(&["verify", EXAMPLE_31, "--phi", "x", "--psi", "-1/(x*u)"]);
    assert_eq!(out.status.code(), Some(0));

    let out = maxsym(&["verify", "0", "--phi", "x", "--psi", "u"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_failure_exits_three() {
    let out = maxsym(&["verify", "3*q^2/(1+p)", "--phi", "x", "--psi", "u", "--json"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json_stdout(&out);
    assert_eq!(v["verified"], false);
}

#[test]
fn verify_degenerate_transformation_reported_distinctly() {
    let out = maxsym(&["verify", "0", "--phi", "x", "--psi", "x", "--json"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_stdout(&out);
    assert_eq!(v["status"], "error");
    assert_eq!(v["error"]["kind"], "degenerate-transformation");
}

#[test]
fn pullback_reproduces_worked_examples() {
    let out = maxsym(&["pullback", "--phi", "x", "--psi", "-1/(x*u)"]);
    assert_eq!(out.status.code(), Some(0));
    let printed = String::from_utf8_lossy(&out.stdout);
    let expected = maxsym(&["classify", EXAMPLE_31, "--json"]);
    let canonical = json_stdout(&expected)["input"].as_str().unwrap().to_string();
    assert_eq!(printed.trim(), canonical);

    let out = maxsym(&["pullback", "--phi", "x+u", "--psi", "-x"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "3*q^2/(1+p)");

    let out = maxsym(&["pullback", "--phi", "x", "--psi", "u"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0");
}

#[test]
fn pullback_nonzero_target() {
    let out = maxsym(&[
        "pullback",
        "--phi",
        "x+u",
        "--psi",
        "-x",
        "--target",
        "3/2*q^2/p",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    let f = v["pullback"].as_str().unwrap();
    // The pulled-back equation stays in the six-symmetry class.
    let check = maxsym(&["classify", f]);
    assert_eq!(check.status.code(), Some(3));
}

#[test]
fn batch_mode_reports_one_json_line_each() {
    let input = "0\n3/2*q^2/p\nq-q\n";
    let out = maxsym_stdin(&["classify", "-"], input);
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines.len(), 3);
    let first: Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(first["verdict"], "MaximallySymmetric");
    let second: Value = serde_json::from_str(lines[1]).unwrap();
    assert_eq!(second["verdict"], "NotMaximallySymmetric");
    let third: Value = serde_json::from_str(lines[2]).unwrap();
    assert_eq!(third["input"], "0");
    // Non-ok lines propagate the first failing exit code.
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn quiet_prints_single_line() {
    let out = maxsym(&["classify", "0", "--quiet"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.trim().lines().count(), 1);
    assert!(text.contains("MaximallySymmetric"));
}
