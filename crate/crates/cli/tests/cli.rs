use std::path::Path;
use std::process::{Command, Output};

const GOLDEN: &str = "[run]\nsystem = diag:2,3|3,2\nn = 4..8:2\nepsilon = 0.25\nseed = 3\n[verify]\nchecks = chain,shift,lift\n";

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("run.toml");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_presslab"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .output()
        .unwrap()
}

#[test]
fn parse_error_reports_line_and_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "[run]\nsystem = diag:2,x|3,2\nn = 3\nepsilon = 0.25\n", &["estimate"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config:2:"));
}

#[test]
fn empty_kind_list_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "[run]\nsystem = circle:2\nkinds = ;\nn = 3\nepsilon = 0.25\n", &["estimate"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn estimate_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[run]\nsystem = circle:2|3\nmethod = generic\nkinds = amalgamated;free\nn = 2..3\nepsilon = 0.2\nseed = 11\n";
    let a = run(dir.path(), cfg, &["estimate", "--format", "json"]);
    let b = run(dir.path(), cfg, &["estimate", "--format", "json", "--threads", "1"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn csv_rows_follow_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), GOLDEN, &["estimate"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,n,epsilon,lower,upper,cover_size,method,seed"));
    assert_eq!(lines.count(), 3 * 7);
}

#[test]
fn verify_passes_on_the_golden_system() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), GOLDEN, &["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn negative_tolerance_fails_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), GOLDEN, &["verify", "--tolerance", "-10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("est.csv");
    let out = run(dir.path(), GOLDEN, &["estimate", "--out", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(target).unwrap().starts_with("kind,"));
}

#[test]
fn sweep_emits_extrapolated_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), GOLDEN, &["sweep"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains(",extrapolated,")).count(), 7);
}

#[test]
fn dimension_of_the_ternary_cantor_set() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[run]\nsystem = cantor:3,3\nn = 64\nepsilon = 0.125\n[dimension]\nbracket = 0, 1\n";
    let out = run(dir.path(), cfg, &["dimension"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let t = v["result"]["t_ua"].as_f64().unwrap();
    assert!((t - 2f64.ln() / 3f64.ln()).abs() < 0.03, "{t}");
}

#[test]
fn infeasible_grid_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[run]\nsystem = toral:2,1;1,1\nmethod = generic\nkinds = amalgamated\nn = 40\nepsilon = 0.01\n";
    let out = run(dir.path(), cfg, &["estimate"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
