//! The `lckw` binary: exit codes, output files, config merging and
//! reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn lckw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lckw")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn hopf_json_report_exits_zero() {
    let o = lckw(&["verify", "--model", "hopf", "--n", "2", "--a", "2.0", "--samples", "256", "--seed", "42", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["overall_pass"], true);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["samples"], 256);
    assert_eq!(v["model"]["name"], "hopf");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn deformed_reports_expected_failures_and_exits_zero() {
    let o = lckw(&["verify", "--model", "hopf-deformed", "--n", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let expected: Vec<&str> = v["expected_failures"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(expected, ["id_vaisman", "id_gauduchon", "id_potential", "id_killing_T"]);
}

#[test]
fn expected_failure_that_passes_fails_the_suite() {
    let dir = tempfile::tempdir().unwrap();
    let tol = dir.path().join("tol.txt");
    std::fs::write(&tol, "id_vaisman = 10\n").unwrap();
    let o = lckw(&["verify", "--model", "hopf-deformed", "--samples", "16", "--tol-overrides", path(&tol)]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let tol = dir.path().join("tol.txt");
    std::fs::write(&tol, "# below the roundoff floor\nid_e4 = 0\n").unwrap();
    let o = lckw(&["verify", "--model", "hopf", "--samples", "16", "--tol-overrides", path(&tol)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn config_errors_exit_two_on_stderr() {
    for args in [
        &["verify", "--model", "klein"][..],
        &["verify", "--n", "7"],
        &["verify", "--a", "0.5"],
        &["verify", "--engine", "symbolic"],
        &["verify", "--config", "/nonexistent/run.conf"],
        &["integrate", "--model", "hopf", "--n", "3", "--grid-r", "2", "--grid-ang", "2"],
        &["integrate", "--quantity", "entropy"],
        &["frobnicate"],
    ] {
        let o = lckw(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn flags_override_config_file_and_out_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "model = flat\nn = 3\nsamples = 8\nseed = 5\nformat = csv\n").unwrap();
    let out = dir.path().join("report.json");
    let o = lckw(&["verify", "--config", path(&conf), "--n", "2", "--format", "json", "--out", path(&out)]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["model"]["name"], "flat");
    assert_eq!(v["model"]["n"], 2);
    assert_eq!(v["seed"], 5);
    assert_eq!(v["samples"], 8);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["verify", "--model", "hopf-deformed", "--samples", "64", "--seed", "9", "--format", "json"];
    let first = lckw(&args);
    let second = lckw(&args);
    assert_eq!(first.stdout, second.stdout);
    let other_seed = lckw(&["verify", "--model", "hopf-deformed", "--samples", "64", "--seed", "10", "--format", "json"]);
    assert_ne!(first.stdout, other_seed.stdout);
}

#[test]
fn csv_has_one_row_per_check() {
    let o = lckw(&["verify", "--model", "hopf", "--samples", "8", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "id");
    assert_eq!(&headers[1], "paper_anchor");
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    let listing = String::from_utf8(lckw(&["list-checks"]).stdout).unwrap();
    // hopf skips only the deformation checks
    assert_eq!(rows.len(), listing.lines().count() - 2);
}

#[test]
fn integrate_small_grid_on_deformed_model() {
    let o = lckw(&["integrate", "--model", "hopf-deformed", "--a", "2", "--grid-r", "16", "--grid-ang", "8", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let integrals = v["integrals"].as_array().unwrap();
    assert_eq!(integrals.len(), 5);
    let grad = integrals.iter().find(|i| i["quantity"] == "grad-lee-sq").unwrap();
    assert!(grad["tolerance"].is_null());
    assert!(grad["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn list_checks_and_selftest() {
    let o = lckw(&["list-checks"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for id in ["id_lck", "id_naj", "id_cgnt", "id_doi", "id_e3", "id_e4", "id_djd", "id_cinci", "id_trF", "id_potential"] {
        assert!(text.lines().any(|l| l.split_whitespace().next() == Some(id)), "{id}");
    }
    let o = lckw(&["selftest"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}
