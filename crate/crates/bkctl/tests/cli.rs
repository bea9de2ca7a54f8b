use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SPEC: &str = r#"{
  "format_version": 1,
  "ring": {"p": 3, "p_prec": 4, "u_prec": 64},
  "eisenstein": {"kind": "default", "e": 4},
  "modules": {
    "k2": [{"kind": "PUr", "a": 1, "r": 2}],
    "ideal": {"generators": 2, "relations": [[[0, 1], [-3]]]}
  },
  "ledgers": {
    "bad": {"degree": 2, "l_crys": [2, 2], "l_dR": [4, 4]},
    "good": {"degree": 2, "l_crys": [2, 2], "l_dR": [4, 8]}
  }
}"#;

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn spec_file(name: &str) -> PathBuf {
    let path = scratch(name).join("spec.json");
    fs::write(&path, SPEC).unwrap();
    path
}

fn bkctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bkctl"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn lengths_of_pur_1_2() {
    let spec = spec_file("lengths");
    let out = bkctl(&["--spec", spec.to_str().unwrap(), "lengths", "k2"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<Vec<u64>> = stdout(&out)
        .lines()
        .filter(|l| l.trim_end().ends_with("yes"))
        .map(|l| l.split_whitespace().filter_map(|w| w.parse().ok()).collect())
        .collect();
    assert_eq!(
        rows,
        vec![vec![0, 2, 2, 2, 2], vec![1, 4, 4, 4, 4], vec![2, 4, 4, 4, 4]]
    );
}

#[test]
fn precision_shortfall_exits_3() {
    let spec = spec_file("precision");
    let out = bkctl(&[
        "--spec",
        spec.to_str().unwrap(),
        "--n-max",
        "2",
        "lengths",
        "ideal",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precision"));
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(bkctl(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(bkctl(&["lengths", "k2"]).status.code(), Some(2));
    assert_eq!(
        bkctl(&["--spec", "/nonexistent/spec.json", "lengths", "k2"])
            .status
            .code(),
        Some(2)
    );
    let spec = spec_file("input");
    let s = spec.to_str().unwrap();
    assert_eq!(bkctl(&["--spec", s, "lengths", "missing"]).status.code(), Some(2));
    let bad = scratch("input").join("bad.json");
    fs::write(&bad, SPEC.replace("\"p\": 3", "\"p\": 9")).unwrap();
    assert_eq!(
        bkctl(&["--spec", bad.to_str().unwrap(), "lengths", "k2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn ledger_verdicts() {
    let spec = spec_file("ledger");
    let s = spec.to_str().unwrap();
    assert_eq!(bkctl(&["--spec", s, "ledger", "good"]).status.code(), Some(0));
    assert_eq!(bkctl(&["--spec", s, "ledger", "bad"]).status.code(), Some(1));
}

#[test]
fn worked_examples_pass() {
    for p in ["2", "3", "5"] {
        assert_eq!(
            bkctl(&["example", "li-petrov", p]).status.code(),
            Some(0),
            "p = {p}"
        );
    }
    assert_eq!(bkctl(&["example", "li-petrov", "4"]).status.code(), Some(2));
}

fn sweep(dir: &Path, extra: &[&str]) -> (Option<i32>, String, String) {
    let base = dir.join("sweep");
    let mut args = vec![
        "sweep-beta",
        "--primes",
        "2",
        "--max-summands",
        "2",
        "--out",
        base.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = bkctl(&args);
    let csv = fs::read_to_string(base.with_extension("csv")).unwrap();
    let json = fs::read_to_string(base.with_extension("json")).unwrap();
    (out.status.code(), csv, json)
}

fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("generated_at"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn sweep_reports_are_deterministic() {
    let (c1, csv1, json1) = sweep(&scratch("det1"), &["--jobs", "1"]);
    let (c2, csv2, json2) = sweep(&scratch("det2"), &["--jobs", "4"]);
    assert_eq!((c1, c2), (Some(0), Some(0)));
    assert!(csv1.starts_with("# generated_at: "));
    assert_eq!(csv1.lines().nth(1), Some("p,e,module,n,check,values,verdict"));
    assert_eq!(without_timestamp(&csv1), without_timestamp(&csv2));
    assert_eq!(without_timestamp(&json1), without_timestamp(&json2));
    let doc: serde_json::Value = serde_json::from_str(&json1).unwrap();
    assert_eq!(doc["format_version"], 1);
    assert_eq!(doc["summary"]["violations"], 0);
    assert_eq!(doc["rows"].as_array().unwrap().len(), csv1.lines().count() - 2);
}

#[test]
fn injected_violation_exits_1() {
    let (code, csv, _) = sweep(&scratch("fault"), &["--inject-fault"]);
    assert_eq!(code, Some(1));
    assert!(csv.lines().any(|l| l.ends_with(",fail")));
}

#[test]
fn tiny_budget_skips_without_failing() {
    let (code, _, json) = sweep(&scratch("budget"), &["--budget", "10"]);
    assert_eq!(code, Some(0));
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(doc["summary"]["skipped"].as_u64().unwrap() > 0);
}
