use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fibnormal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibnormal"))
        .args(args)
        .env_remove("FIBNORMAL_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = fibnormal(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&a)).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(fibnormal(&["analyze", "-n", "0", "-q"]).status.code(), Some(2));
    assert_eq!(fibnormal(&["analyze", "-n", "5", "--base", "1", "-q"]).status.code(), Some(2));
    assert_eq!(fibnormal(&["analyze", "--bogus"]).status.code(), Some(2));
    assert_eq!(fibnormal(&[]).status.code(), Some(2));
    assert_eq!(
        fibnormal(&["sigma-census", "--max-index", "60", "--cap", "1000"]).status.code(),
        Some(3)
    );
    assert_eq!(fibnormal(&["reach", "0"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ckpt");
    fs::write(&bad, b"not a checkpoint").unwrap();
    let out = fibnormal(&["analyze", "-n", "10", "-q", "--checkpoint", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.ckpt"));

    let missing = dir.path().join("no/such/dir/out.json");
    let out = fibnormal(&["reach", "24", "-o", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn golden_checks_pass() {
    let out = fibnormal(&["--golden"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 12);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}

#[test]
fn analyze_json_matches_known_row() {
    let v = json(&["analyze", "-n", "1000", "--k-max", "2", "-q"]);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "analyze");
    assert_eq!(v["digits"], 104_750);
    let k1 = &v["blocks"][0];
    assert_eq!(k1["k"], 1);
    assert!((k1["naive_chi2"].as_f64().unwrap() - 10.50).abs() < 5e-3);
    assert!((k1["p_naive"].as_f64().unwrap() - 0.311).abs() < 5e-4);
    assert!((k1["max_abs_deviation"].as_f64().unwrap() - 2.11e-3).abs() < 5e-6);
    assert_eq!(v["blocks"][1]["good_df"], 90);
    assert_eq!(v["single_digits"].as_array().unwrap().len(), 10);
}

#[test]
fn base2_positional_report() {
    let v = json(&["analyze", "-n", "500", "--base", "2", "--k-max", "3", "--positional", "-q"]);
    let pos = v["positional_tests"].as_array().unwrap();
    assert_eq!(pos.len(), 3 * 4);
    // every base-2 term starts with 1, so leading 1-blocks are all ones
    let lead = pos.iter().find(|r| r["k"] == 1 && r["category"] == "leading").unwrap();
    assert_eq!(lead["total"], 500);
    let sum: u64 = pos
        .iter()
        .filter(|r| r["k"] == 2)
        .map(|r| r["total"].as_u64().unwrap())
        .sum();
    assert_eq!(sum, v["blocks"][1]["total"].as_u64().unwrap());
}

#[test]
fn output_is_deterministic() {
    for format in ["json", "csv", "text"] {
        let args = ["analyze", "-n", "300", "--k-max", "3", "--positional", "-q", "--format", format];
        assert_eq!(stdout(&args), stdout(&args));
    }
    let args = ["per-term", "-n", "400", "--format", "json"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn partitions_do_not_change_results() {
    let one = stdout(&["analyze", "-n", "700", "--k-max", "3", "--positional", "-q", "--format", "json"]);
    let four = stdout(&[
        "analyze", "-n", "700", "--k-max", "3", "--positional", "-q", "--format", "json",
        "--partitions", "4",
    ]);
    assert_eq!(one, four);
}

#[test]
fn checkpoint_resume_matches_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("run.ckpt");
    let c = ckpt.to_str().unwrap();
    let whole = stdout(&["analyze", "-n", "800", "--k-max", "2", "-q", "--format", "json"]);

    // stop early, then extend the same checkpoint
    stdout(&["analyze", "-n", "350", "--k-max", "2", "-q", "--checkpoint", c, "--checkpoint-every", "100"]);
    assert!(ckpt.exists());
    let resumed = stdout(&["analyze", "-n", "800", "--k-max", "2", "-q", "--format", "json", "--checkpoint", c]);
    assert_eq!(whole, resumed);

    // --fresh ignores the saved state
    let fresh = stdout(&[
        "analyze", "-n", "800", "--k-max", "2", "-q", "--format", "json", "--checkpoint", c, "--fresh",
    ]);
    assert_eq!(whole, fresh);

    let out = fibnormal(&["analyze", "-n", "10", "-q", "--checkpoint", c, "--partitions", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_dir_variable() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fibnormal"))
        .args(["counterexample", "-n", "10", "--format", "csv"])
        .env("FIBNORMAL_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = fs::read_to_string(dir.path().join("counterexample-n10.csv")).unwrap();
    assert!(written.starts_with("digit,frequency,diagonal mass\n"));

    // an explicit path wins
    let explicit = dir.path().join("x.json");
    let out = Command::new(env!("CARGO_BIN_EXE_fibnormal"))
        .args(["reach", "24", "--format", "json", "-o"])
        .arg(&explicit)
        .env("FIBNORMAL_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(Path::new(&explicit).exists());
    assert!(!dir.path().join("reach-24.json").exists());
}

#[test]
fn csv_headers() {
    let census = stdout(&["sigma-census", "--max-index", "20", "--format", "csv"]);
    assert!(census.starts_with("n,F_n,in_range,witness,multiple_of_6,exception\n"));
    assert!(census.contains("\n6,8,true,7,false,false\n"));
    assert!(census.contains("\n5,5,false,,false,false\n"));

    let per_term = stdout(&["per-term", "-n", "300", "--format", "csv"]);
    assert!(per_term.starts_with("epsilon,count,fraction\n"));
    assert_eq!(per_term.lines().count(), 6);

    let analyze = stdout(&["analyze", "-n", "50", "--k-max", "2", "--positional", "-q", "--format", "csv"]);
    let sections: Vec<&str> = analyze.split("\n\n").collect();
    assert_eq!(sections.len(), 4);
    assert!(sections[0].starts_with("digit,count,frequency,deviation,z-score\n"));
}

#[test]
fn regress_from_file_and_inline() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("points.csv");
    fs::write(
        &file,
        "D,dev\n1071,2.98e-2\n104750,2.11e-3\n10451934,2.87e-4\n1044963704,3.43e-6\n",
    )
    .unwrap();
    let a = json(&["regress", "--points", file.to_str().unwrap()]);
    let b = json(&[
        "regress", "-p", "1071:2.98e-2", "-p", "104750:2.11e-3", "-p", "10451934:2.87e-4", "-p",
        "1044963704:3.43e-6",
    ]);
    assert_eq!(a["fit"], b["fit"]);
    assert!(a["fit"]["exponent"].as_f64().unwrap() < -0.4);
    assert_eq!(fibnormal(&["regress", "-p", "1:1", "-p", "2:2"]).status.code(), Some(2));
    assert_eq!(fibnormal(&["regress", "-p", "oops"]).status.code(), Some(2));
}

#[test]
fn reach_and_baselines() {
    let v = json(&["reach", "24"]);
    assert_eq!(v["sigma"]["witness"], 14);
    assert_eq!(v["phi_lambda"]["phi"], 35);
    assert_eq!(v["phi_lambda"]["lambda"], "224");

    let odd = json(&["reach", "7"]);
    assert_eq!(odd["phi_lambda"]["phi"], Value::Null);

    let b = json(&["baselines", "-n", "200"]);
    assert_eq!(b["pisano_period"], 60);
    assert_eq!(b["trailing_fractions"][0], "1/15");
    assert_eq!(b["trailing_fractions"][1], "2/15");
    let benford: f64 = b["benford"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
    assert!((benford - 1.0).abs() < 1e-12);
}
