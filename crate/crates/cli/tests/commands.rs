use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use patchalg_cli::commands::{cmd_algebra, cmd_presheaf, cmd_ring, cmd_space, Options};
use patchalg_cli::report::Report;
use patchalg_cli::spec::{Input, Selection};

const GF16: &str = r#"{"kind":"gf","p":2,"k":4}"#;

fn opts() -> Options {
    Options { cap: 4096, seed: 0 }
}

fn input(text: &str) -> Input {
    Input::parse(text).unwrap()
}

fn run(dir: &Path, body: &str, args: &[&str]) -> Output {
    let path = dir.join("input.json");
    fs::write(&path, body).unwrap();
    let mut full: Vec<&str> = args.to_vec();
    full.push(path.to_str().unwrap());
    Command::new(env!("CARGO_BIN_EXE_patchalg")).args(&full).env_remove("PATCHALG_CAP").output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn gf16_has_one_subring_per_divisor_of_four() {
    let out = cmd_ring(&input(GF16), opts()).unwrap();
    assert_eq!(out.report.data["subrings"].as_array().unwrap().len(), 3);
    assert!(out.report.passed());
    assert!(out.dot.unwrap().starts_with("digraph"));
}

#[test]
fn gf16_full_space_algebra_is_product_of_stalks() {
    let out = cmd_algebra(&input(GF16), &Selection::default(), opts()).unwrap();
    assert_eq!(out.report.data["size"], 2 * 4 * 16);
    assert!(out.report.passed());
}

#[test]
fn singleton_selection_gives_that_subring() {
    let sel = Selection::Members(vec![vec![0, 1]]);
    let out = cmd_algebra(&input(GF16), &sel, opts()).unwrap();
    assert_eq!(out.report.data["size"], 2);
}

#[test]
fn space_and_presheaf_reports_round_trip() {
    let inp = input(GF16);
    for out in [
        cmd_ring(&inp, opts()).unwrap(),
        cmd_space(&inp, &Selection::default(), opts()).unwrap(),
        cmd_presheaf(&inp, &Selection::default(), opts()).unwrap(),
        cmd_algebra(&inp, &Selection::default(), opts()).unwrap(),
    ] {
        let text = serde_json::to_string(&out.report).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, out.report);
    }
}

#[test]
fn zero_ring_is_an_admissibility_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), r#"{"kind":"zmod","n":1}"#, &["ring"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("zero ring"));
}

#[test]
fn malformed_json_and_missing_fields_are_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), r#"{"kind":"#, &["ring"]).status.code(), Some(2));
    let out = run(dir.path(), r#"{"kind":"zmod","m":3}"#, &["ring"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`n`"));
}

#[test]
fn missing_file_exits_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_patchalg")).args(["ring", "/nonexistent/spec.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_subring_names_the_element_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), GF16, &["space", "--select", "[[0,1,5]]"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("[0, 1, 5]"));
}

#[test]
fn invalid_sections_report_the_pair() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"kind":"gf","p":2,"k":2,"sections":[[0,1,2,3],[0,1],[0,1],[0,1,2,3]]}"#;
    let out = run(dir.path(), body, &["presheaf"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("e = 0b1, f = 0b10"));
}

#[test]
fn cap_from_environment_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gf16.json");
    fs::write(&path, GF16).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_patchalg"))
        .args(["algebra", path.to_str().unwrap()])
        .env("PATCHALG_CAP", "16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let flag = Command::new(env!("CARGO_BIN_EXE_patchalg"))
        .args(["algebra", path.to_str().unwrap(), "--cap", "16"])
        .output()
        .unwrap();
    assert_eq!(flag.status.code(), Some(4));
}

#[test]
fn dot_and_json_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("out.dot");
    let json = dir.path().join("out.json");
    let out = run(dir.path(), GF16, &["ring", "--dot", dot.to_str().unwrap(), "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&dot).unwrap().matches("->").count(), 2);
    let written: Report = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let printed: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(written, printed);
}

#[test]
fn valid_fixture_passes_verify() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"suites":["fixtures"],"fixtures":[{"name":"f2 on one atom","ring":{"kind":"gf","p":2,"k":2},"sections":[[0,1,2,3],[0,1]]}]}"#;
    let out = run(dir.path(), body, &["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.certificates.len(), 1);
}
