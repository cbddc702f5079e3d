use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfactorial")).args(args).output().expect("run qfactorial")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const RR: &[&str] = &["--basis", "C(1,0;0;1)", "--operator", "E^2 - E - q^2*qn", "--initials", "1,1+q"];

#[test]
fn transform_over_falling_basis() {
    let o = run(&["transform", "--basis", "F", "--operator", "qn"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "S^(-1) + q^k");
}

#[test]
fn solve_json_is_deterministic() {
    let args: Vec<&str> = ["solve"].iter().chain(RR).chain(&["--json"]).copied().collect();
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["guessed_operator"], "S^2 + q^(k+1)*S - q^(k+2)");
    assert_eq!(v["certificate"]["valid"], true);
    assert_eq!(v["initial_coefficients"][1], "q");
}

#[test]
fn verify_accepts_and_rejects_candidates() {
    let good: Vec<&str> =
        ["verify"].iter().chain(RR).chain(&["--candidate", "S^2 + q^(k+1)*S - q^(k+2)"]).copied().collect();
    assert_eq!(run(&good).status.code(), Some(0));
    let bad: Vec<&str> =
        ["verify"].iter().chain(RR).chain(&["--candidate", "S^2 + q^(k+2)*S - q^(k+1)"]).copied().collect();
    let o = run(&bad);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("INVALID"));
}

#[test]
fn exit_codes_for_errors() {
    let o = run(&["corpus", "--corpus", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error[usage]"));
    let o = run(&["transform", "--basis", "F", "--operator", "E^2 -"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["solve", "--basis", "F", "--operator", "E^2 - E - q^2*qn", "--initials", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing_initial"));
}

#[test]
fn corpus_single_case() {
    let o = run(&["corpus", "--corpus", "rr1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS rr1"));
    let o = run(&["corpus", "--corpus", "sills_control_odd", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["error"]["code"], "inconsistent_initials");
}

#[test]
fn batch_reports_one_line_per_job() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qfactorial"))
        .arg("batch")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let input = concat!(
        r#"{"name":"rr2","operator":"E^2 - E - q^2*qn","initials":["1","1"],"basis":"C(1,0;0;1)"}"#,
        "\n",
        "not json\n"
    );
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["initial_coefficients"][1], "0");
    assert_eq!(lines[1]["code"], "parse_error");
}
