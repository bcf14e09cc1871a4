use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn singres(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singres"))
        .args(args)
        .current_dir(dir)
        .env("SINGRES_THREADS", "2")
        .output()
        .expect("spawn singres")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn build_writes_entry_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = singres(
        &[
            "build",
            "brieskorn",
            "--q",
            "2",
            "--c",
            "3",
            "--d",
            "5",
            "-o",
            "e8.json",
        ],
        dir.path(),
    );
    let summary = json(&out);
    assert_eq!(summary["n"], 8);
    let entry: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("e8.json")).unwrap()).unwrap();
    assert_eq!(entry["matrix"]["n"], 8);
    assert_eq!(entry["status"], "proven");
}

#[test]
fn peskin_three_is_e6() {
    let dir = tempfile::tempdir().unwrap();
    let entry = json(&singres(&["build", "peskin", "--p", "3"], dir.path()));
    let rows = entry["matrix"]["entries"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().enumerate().all(|(i, r)| r[i] == -2));
}

#[test]
fn build_rejects_gcd_violation() {
    let dir = tempfile::tempdir().unwrap();
    let out = singres(&["build", "brieskorn", "--q", "2", "--c", "4", "--d", "6"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("gcd"));
}

#[test]
fn analyze_group_and_gorenstein() {
    let dir = tempfile::tempdir().unwrap();
    json(&singres(
        &[
            "build",
            "brieskorn",
            "--q",
            "2",
            "--c",
            "3",
            "--d",
            "5",
            "-o",
            "e8.json",
        ],
        dir.path(),
    ));
    let group = json(&singres(&["analyze", "e8.json", "--group"], dir.path()));
    assert_eq!(group["group"]["divisors"], serde_json::json!([]));

    json(&singres(&["build", "d4", "--p", "3", "-o", "d4.json"], dir.path()));
    let d4 = json(&singres(&["analyze", "d4.json", "--gorenstein"], dir.path()));
    assert_eq!(d4["gorenstein"]["gorenstein"], true);

    json(&singres(
        &["build", "non-gorenstein", "--p", "3", "-o", "ng.json"],
        dir.path(),
    ));
    let ng = json(&singres(&["analyze", "ng.json", "--gorenstein"], dir.path()));
    assert_eq!(ng["gorenstein"]["gorenstein"], false);
    assert_eq!(ng["gorenstein"]["witness"]["class_order"], 3);
}

#[test]
fn analyze_bare_matrix_reports_everything() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a2.json"), "[[-2, 1], [1, -2]]").unwrap();
    let all = json(&singres(&["analyze", "a2.json"], dir.path()));
    assert_eq!(all["det"], 3);
    assert_eq!(all["group"]["divisors"], serde_json::json!([3]));
    assert_eq!(all["cycles"]["genus"], 0);
    assert!(all.get("mumford").is_none());

    let pulled = json(&singres(&["analyze", "a2.json", "--mumford", "0"], dir.path()));
    assert_eq!(
        pulled["mumford"]["matrix"],
        serde_json::json!([[{"num": -3, "den": 2}]])
    );
}

#[test]
fn analyze_rejects_indefinite_matrix() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "[[-1, 2], [2, -1]]").unwrap();
    let out = singres(&["analyze", "bad.json"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "star-formulas", "--trials", "50", "--seed", "7"];
    let first = singres(&args, dir.path());
    let second = singres(&args, dir.path());
    assert!(
        first.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&first.stderr)
    );
    assert_eq!(first.stdout, second.stdout);
    let last: Value = serde_json::from_str(String::from_utf8_lossy(&first.stdout).lines().last().unwrap()).unwrap();
    assert_eq!(last["suite"], "star-formulas");
}

#[test]
fn export_dot() {
    let dir = tempfile::tempdir().unwrap();
    json(&singres(
        &[
            "build",
            "brieskorn",
            "--q",
            "2",
            "--c",
            "3",
            "--d",
            "5",
            "-o",
            "e8.json",
        ],
        dir.path(),
    ));
    let out = singres(&["export", "e8.json", "--format", "dot", "-o", "e8.dot"], dir.path());
    assert!(out.status.success());
    let dot = std::fs::read_to_string(dir.path().join("e8.dot")).unwrap();
    assert!(dot.starts_with("graph"));
    assert_eq!(dot.matches(" -- ").count(), 7);
}
