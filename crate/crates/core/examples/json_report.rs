//! Drive the command line in-process: a JSON report, its determinism across
//! runs, and the exit code contract.

use lck_workbench::cli;

fn run(args: &[&str]) -> (u8, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("lckw").chain(args.iter().copied()), &mut out, &mut err);
    let text = if out.is_empty() { err } else { out };
    (code, String::from_utf8_lossy(&text).into_owned())
}

fn main() {
    let args = ["verify", "--model", "hopf-deformed", "--samples", "16", "--format", "json"];
    let (code, first) = run(&args);
    let (_, second) = run(&args);
    println!("exit {code}, identical reruns: {}", first == second);
    let report: serde_json::Value = serde_json::from_str(&first).expect("valid JSON");
    println!("expected failures {}", report["expected_failures"]);
    println!("first check {}", report["checks"][0]);

    let (code, message) = run(&["verify", "--model", "hopf", "--n", "9"]);
    println!("exit {code}: {}", message.trim());
    let (code, _) = run(&["verify", "--model", "hopf", "--samples", "16", "--tol-overrides", "/nonexistent"]);
    println!("missing override file: exit {code}");
}
