//! End-to-end tests of the binary: exit codes follow the scriptability
//! contract, reports parse, and repeated runs are byte-identical.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subshift"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn check_las_on_beta_exits_zero() {
    let out = run(&[
        "check-las",
        "--spec",
        &fixture("beta-golden.toml"),
        "--g",
        "const:1",
        "--horizon",
        "6,6",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdicts"][0]["status"], "holds");
    assert_eq!(report["schema_version"], 1);
}

#[test]
fn irreducible_on_at_most_one_one_exits_one_with_witness() {
    let out = run(&[
        "irreducible",
        "--spec",
        &fixture("at-most-one-one.toml"),
        "--horizon",
        "3",
        "--gap-bound",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdicts"][0]["witnesses"][0], "1");
    assert_eq!(report["verdicts"][0]["witnesses"][1], "1");
}

#[test]
fn entropy_on_full_shift_is_constant_ln2() {
    let out = run(&[
        "entropy",
        "--spec",
        &fixture("full-binary.toml"),
        "--n-max",
        "8",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let ln2 = std::f64::consts::LN_2;
    for line in text.lines().skip(2) {
        if line.is_empty() {
            continue;
        }
        let est: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((est - ln2).abs() < 1e-12, "{line}");
    }
}

#[test]
fn usage_errors_exit_three() {
    let out = run(&["check-las", "--spec", "/nonexistent.toml", "--g", "const:1", "--horizon", "4,4"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["not-a-command"]);
    assert_eq!(out.status.code(), Some(3));
    // malformed mistake function
    let out = run(&[
        "check-las",
        "--spec",
        &fixture("golden-mean.toml"),
        "--g",
        "bogus",
        "--horizon",
        "4,4",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let args = [
        "counterexample",
        "audit",
        "--n",
        "3",
        "--n-max",
        "5",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let mut with_threads: Vec<&str> = args.to_vec();
    with_threads.extend(["--threads", "1"]);
    let c = run(&with_threads);
    assert_eq!(a.stdout, c.stdout);
    let mut with_threads4: Vec<&str> = args.to_vec();
    with_threads4.extend(["--threads", "4"]);
    let d = run(&with_threads4);
    assert_eq!(a.stdout, d.stdout);
}

#[test]
fn enumerate_uses_and_reuses_cache_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_string_lossy().into_owned();
    let args = [
        "enumerate",
        "--spec",
        &fixture("golden-mean.toml"),
        "--n",
        "10",
        "--words",
        "--cache-dir",
        &cache,
        "--format",
        "csv",
    ];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert!(entries.len() >= 2, "count and word files expected");
    // corrupt every cache entry; the run must recompute and still agree
    for e in std::fs::read_dir(dir.path()).unwrap() {
        std::fs::write(e.unwrap().path(), "garbage").unwrap();
    }
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(b.stdout).unwrap();
    assert!(text.contains("10,144,144,false"), "{text}");
}

#[test]
fn glue_reports_golden_mean_bridge() {
    let out = run(&[
        "glue",
        "--spec",
        &fixture("golden-mean.toml"),
        "--horizon",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = report["tables"][0]["rows"].as_array().unwrap();
    let get = |field: &str| {
        rows.iter()
            .find(|r| r[0] == field)
            .map(|r| r[1].as_str().unwrap().to_string())
            .unwrap()
    };
    assert_eq!(get("probe"), "1");
    assert_eq!(get("bridge"), "0");
    assert!(report["params"]
        .as_array()
        .unwrap()
        .iter()
        .any(|p| p[0] == "core_length_gcd" && p[1] == "1"));
}

#[test]
fn periodic_reports_exact_rationals() {
    let out = run(&[
        "periodic",
        "--spec",
        &fixture("golden-mean.toml"),
        "--period",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = report["tables"][1]["rows"].as_array().unwrap();
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[0][1], "8/11");
}

#[test]
fn check_ras_counterexample_holds() {
    let out = run(&[
        "counterexample",
        "ras",
        "--n",
        "3",
        "--n-max",
        "4",
        "--horizon",
        "4,4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdicts"][0]["status"], "holds");
    let notes = report["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("2^17")));
}

#[test]
fn timings_flag_adds_timing_field() {
    let base = run(&["entropy", "--spec", &fixture("golden-mean.toml"), "--n-max", "5"]);
    let with = run(&[
        "entropy",
        "--spec",
        &fixture("golden-mean.toml"),
        "--n-max",
        "5",
        "--timings",
    ]);
    let b: serde_json::Value = serde_json::from_slice(&base.stdout).unwrap();
    let w: serde_json::Value = serde_json::from_slice(&with.stdout).unwrap();
    assert!(b.get("timing_ms").is_none());
    assert!(w.get("timing_ms").is_some());
}

#[test]
fn out_flag_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "mme",
        "--spec",
        &fixture("golden-mean.toml"),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let params = report["params"].as_array().unwrap();
    let lambda: f64 = params
        .iter()
        .find(|p| p[0] == "lambda")
        .unwrap()[1]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert!((lambda - 1.6180339887).abs() < 1e-8);
}
