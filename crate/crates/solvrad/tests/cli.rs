//! End-to-end tests of the `solvrad` binary: exit codes, JSON output,
//! stdin input, environment overrides, slice flags, and the cache.

use std::io::Write;
use std::process::{Command, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_solvrad"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn analyze_quadratic_human_output() {
    let (code, stdout, _) = run(&["analyze", "y^2 - x"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("group order: 2"));
    assert!(stdout.contains("solvable by radicals: yes"));
    assert!(stdout.contains("root(2;"));
}

#[test]
fn analyze_quintic_emits_certificate() {
    let (code, stdout, _) = run(&["analyze", "y^5 + a*y + b", "--json", "--no-timings"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["group_order"], 120);
    assert_eq!(v["solvability"]["solvable"], false);
    assert_eq!(v["certificate"]["core_order"], 60);
    assert!(v.get("radical_expr").is_none());
}

#[test]
fn parse_error_exits_2_with_json_object() {
    let (code, stdout, stderr) = run(&["analyze", "y^2 -", "--json"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("syntax error"));
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["error"]["kind"], "parse_syntax");
    assert_eq!(v["error"]["exit_code"], 2);
}

#[test]
fn group_cap_exits_4() {
    let (code, _, stderr) = run(&["analyze", "y^5 + a*y + b", "--group-cap", "50"]);
    assert_eq!(code, 4, "stderr: {stderr}");
    assert!(stderr.contains("exceeded cap"));
}

#[test]
fn degenerate_family_exits_3() {
    let (code, _, stderr) = run(&["analyze", "y^2 - 2*y + 1"]);
    assert_eq!(code, 3, "stderr: {stderr}");
    assert!(stderr.contains("degenerate"));
}

#[test]
fn equation_on_stdin() {
    let mut child = bin()
        .args(["analyze", "-", "--json", "--no-timings"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(b"y^3 - x\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(v["group_order"], 3);
}

#[test]
fn explicit_slice_flag() {
    let (code, stdout, _) = run(&[
        "analyze",
        "y^5 + a*y + b",
        "--slice",
        "0,1/10;1,0",
        "--json",
        "--no-timings",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["slice"]["origin"][1], "1/10");
    assert_eq!(v["branch_points"].as_array().unwrap().len(), 5);
    assert_eq!(v["group_order"], 120);
}

#[test]
fn seed_env_override_changes_slice() {
    let out1 = bin()
        .args(["analyze", "y^3 + p*y + q", "--json", "--no-timings"])
        .env("SOLVRAD_SEED", "3")
        .output()
        .unwrap();
    let (code2, stdout2, _) = run(&["analyze", "y^3 + p*y + q", "--seed", "3", "--json", "--no-timings"]);
    assert!(out1.status.success());
    assert_eq!(code2, 0);
    // env override behaves exactly like the flag
    assert_eq!(String::from_utf8_lossy(&out1.stdout), stdout2);
}

#[test]
fn verify_round_trip_and_wrong_family() {
    let dir = std::env::temp_dir().join(format!("solvrad-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let report_path = dir.join("cubic.json");
    let (code, stdout, _) = run(&["analyze", "y^3 + p*y + q", "--json", "--no-timings"]);
    assert_eq!(code, 0);
    std::fs::write(&report_path, &stdout).unwrap();

    let (code, stdout, _) = run(&[
        "verify",
        "y^3 + p*y + q",
        "--expr",
        report_path.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(code, 0, "verify failed: {stdout}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["ok"], true);
    assert!(v["max_residual"].as_f64().unwrap() < 1e-6);

    // wrong family: exit code 5
    let (code, _, stderr) = run(&[
        "verify",
        "y^3 + p*y + q + 1",
        "--expr",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 5, "stderr: {stderr}");
    assert!(stderr.contains("verification failed"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cache_reports_identical() {
    let dir = std::env::temp_dir().join(format!("solvrad-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let args = [
        "analyze",
        "y^4 + p*y + q",
        "--json",
        "--no-timings",
        "--cache-dir",
        dir.to_str().unwrap(),
    ];
    let (c1, cold, _) = run(&args);
    assert_eq!(c1, 0);
    assert!(
        std::fs::read_dir(&dir).unwrap().count() > 0,
        "cache file written"
    );
    let (c2, warm, _) = run(&args);
    assert_eq!(c2, 0);
    assert_eq!(cold, warm, "cold and warm cache reports are identical");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn local_command_reports_germs() {
    let (code, stdout, _) = run(&[
        "local",
        "y^2 - x",
        "--point",
        "0",
        "--radius",
        "0.5",
        "--json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["group_order"], 2);
    assert_eq!(v["solvable"], true);
    assert_eq!(v["ramified_germs"].as_array().unwrap().len(), 1);
}
