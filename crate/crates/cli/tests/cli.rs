use std::path::PathBuf;
use std::process::{Command, Output};

fn pdmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdmlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    pdmlab(args).status.code().expect("exit code")
}

fn schema() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let text = std::fs::read_to_string(path).expect("schema is shipped");
    let schema: serde_json::Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_valid(json: &str) {
    let value: serde_json::Value = serde_json::from_str(json).expect("report is JSON");
    let v = schema();
    let errors: Vec<String> = v.iter_errors(&value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn passing_checks_exit_zero() {
    assert_eq!(code(&["catalog", "verify", "--entry", "17"]), 0);
    assert_eq!(code(&["casimir", "--system", "so4"]), 0);
    assert_eq!(code(&["algebra", "--check", "c3"]), 0);
    assert_eq!(code(&["spectrum", "--system", "so4", "--l", "1"]), 0);
    assert_eq!(code(&["expr", "normalize", "(- (^ (+ x1 1) 2) (^ x1 2))"]), 0);
}

#[test]
fn expressions_use_the_shared_definitions() {
    let out = pdmlab(&["expr", "normalize", "(- $r2 $rt2)"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("(^ x3 2)"));
    let out = pdmlab(&["expr", "diff", "--var", "x1", "(* x1 (fn F x1 x2))"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("(d F (1 0) x1 x2)"));
}

#[test]
fn failing_check_exits_one() {
    let out = pdmlab(&["casimir", "--system", "so13"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(code(&["catalog", "verify", "--entry", "99"]), 2);
    assert_eq!(code(&["spectrum", "--system", "so4", "--grid", "8"]), 2);
    assert_eq!(code(&["catalog", "verify", "--entry", "1", "--points", "0"]), 2);
    assert_eq!(code(&["algebra", "--check", "so5"]), 2);
    assert_eq!(code(&["expr", "parse", "x1 +* 2"]), 2);
    assert_eq!(code(&[]), 2);
}

#[test]
fn json_reports_follow_the_schema() {
    for args in [
        vec!["catalog", "verify", "--entry", "3", "--json", "-"],
        vec!["casimir", "--system", "so13", "--json", "-"],
        vec!["spectrum", "--system", "scale", "--kappa", "1", "--json", "-"],
        vec!["transform", "--kind", "inversion", "--entry", "18", "--json", "-"],
    ] {
        let out = pdmlab(&args);
        let text = String::from_utf8(out.stdout).unwrap();
        let start = text.find("\n{").expect("JSON follows the text report") + 1;
        assert_valid(&text[start..]);
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let out = pdmlab(&["algebra", "--check", "so4", "--json", "-"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let start = text.find("\n{").unwrap() + 1;
    let mut value: serde_json::Value = serde_json::from_str(&text[start..]).unwrap();
    assert!(schema().is_valid(&value));
    value["sections"][0]["checks"][0]["status"] = "maybe".into();
    assert!(!schema().is_valid(&value));
    value.as_object_mut().unwrap().remove("summary");
    assert!(!schema().is_valid(&value));
}

#[test]
fn json_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let p = path.to_str().unwrap();
    assert_eq!(code(&["algebra", "--check", "so4", "--json", p]), 0);
    assert_valid(&std::fs::read_to_string(&path).unwrap());
}

#[test]
fn seeded_reruns_are_identical() {
    let args = ["catalog", "verify", "--entry", "4", "--seed", "11", "--points", "60", "--json", "-"];
    let a = pdmlab(&args);
    let b = pdmlab(&args);
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("pdmlab "));
    assert!(text.contains("seed=11 points=60"));
}

#[test]
fn parallel_runs_match_serial_runs() {
    let serial = pdmlab(&["--jobs", "1", "catalog", "verify", "--all", "--json", "-"]);
    let parallel = pdmlab(&["--jobs", "4", "catalog", "verify", "--all", "--json", "-"]);
    assert_eq!(serial.stdout, parallel.stdout);
}
