use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ghspace(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghspace"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn ghspace")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn data_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn version_and_usage_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ghspace(dir.path(), &["--version"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ghspace "));
    assert_eq!(ghspace(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(ghspace(dir.path(), &["sample", "q2", "--out", "x.csv"]).status.code(), Some(1));
    assert_eq!(ghspace(dir.path(), &["hausdorff", "missing.csv", "missing.csv"]).status.code(), Some(3));
}

#[test]
fn sample_writes_full_grids() {
    let dir = tempfile::tempdir().unwrap();
    for (space, cols) in [("e2", 2), ("s2", 3), ("h2", 2)] {
        let file = format!("{space}.csv");
        let out = ghspace(dir.path(), &["sample", space, "--grid", "100x100", "--out", &file]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert!(String::from_utf8_lossy(&out.stdout).contains("10000 points"));
        let rows = data_rows(&dir.path().join(&file));
        assert_eq!(rows.len(), 10_000);
        assert!(rows.iter().all(|r| r.len() == cols));
    }
    // Horocyclic points stay within hyperbolic distance 0.97 of the origin.
    for r in data_rows(&dir.path().join("h2.csv")) {
        let (u, v) = (r[1], (-r[0]).exp());
        let d = (1.0 + (u * u + (v - 1.0) * (v - 1.0)) / (2.0 * v)).acosh();
        assert!(d <= 0.97 + 1e-9, "{d}");
    }
    let out = ghspace(dir.path(), &["sample", "h2", "--grid", "4x4", "--r-max", "1.5", "--out", "bad.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn diagnose_reports_constants() {
    let dir = tempfile::tempdir().unwrap();
    let out = ghspace(dir.path(), &["diagnose", "--pullback-grid", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&out);
    for key in ["A", "G1", "G2", "c", "epsilon", "psi_identity_max_error", "pullback_deviations"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert!(report["psi_identity_max_error"].as_f64().unwrap() <= 1e-8);
    let eps = report["epsilon"].as_f64().unwrap();
    assert!(eps > 0.25 && eps <= 0.5);
    assert_eq!(report["pullback_deviations"].as_array().unwrap().len(), 9);
}

#[test]
fn hausdorff_routes_agree() {
    let dir = tempfile::tempdir().unwrap();
    ghspace(dir.path(), &["sample", "e2", "--grid", "10x12", "--out", "a.csv"]);
    ghspace(dir.path(), &["sample", "h2", "--grid", "8x9", "--out", "b.json"]);
    let results: Vec<Value> = ["naive", "earlybreak", "tree"]
        .iter()
        .map(|algo| json(&ghspace(dir.path(), &["hausdorff", "a.csv", "b.json", "--algo", algo])))
        .collect();
    assert_eq!(results[0]["distance"], results[1]["distance"]);
    assert_eq!(results[0], results[2]);
    let csv = ghspace(dir.path(), &["--format", "csv", "hausdorff", "a.csv", "b.json"]);
    assert!(String::from_utf8_lossy(&csv.stdout).starts_with("distance,witness_a"));
}

#[test]
fn estimate_is_cached() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--cache", "c.json", "estimate", "--pair", "e2h2", "--coarse", "4x6", "--fine", "6x8", "--top-k", "5",
        "--offset-steps", "3",
    ];
    let first = ghspace(dir.path(), &args);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(!stderr(&first).contains("served from cache"));
    let second = ghspace(dir.path(), &args);
    assert!(stderr(&second).contains("served from cache"));
    assert_eq!(json(&first), json(&second));

    let mut changed = args.to_vec();
    let last = changed.len() - 1;
    changed[last] = "4";
    assert!(!stderr(&ghspace(dir.path(), &changed)).contains("served from cache"));

    let cache: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(cache["estimates"].as_array().unwrap().len(), 2);
    assert!(cache["constants"]["epsilon"].is_number());

    let table = json(&ghspace(dir.path(), &["--cache", "c.json", "table"]));
    assert_eq!(table[1]["provenance"], "computed");
}

#[test]
fn table_prints_published_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let out = ghspace(dir.path(), &["table", "--default"]);
    assert!(out.status.success());
    let rows = json(&out);
    let distances: Vec<f64> = rows.as_array().unwrap().iter().map(|r| r["distance"].as_f64().unwrap()).collect();
    assert_eq!(distances, [0.23, 0.77, 0.84]);
    let weights: Vec<String> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| format!("{:.2}", r["weight"].as_f64().unwrap()))
        .collect();
    assert_eq!(weights, ["4.35", "1.30", "1.19"]);
    assert!(stderr(&out).contains("differs from published"));

    let edited = json(&ghspace(dir.path(), &["table", "--default", "--set", "h2s2=0.5"]));
    assert_eq!(edited[2]["distance"], 0.5);
    assert_eq!(edited[2]["provenance"], "user-supplied");
    assert_eq!(ghspace(dir.path(), &["table", "--set", "e2h2=3"]).status.code(), Some(1));
}

#[test]
fn graph_build_and_search() {
    let dir = tempfile::tempdir().unwrap();
    let out = ghspace(dir.path(), &["graph", "build", "--max-factors", "2", "--out", "g.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let res = json(&ghspace(
        dir.path(),
        &["graph", "search", "--graph", "g.json", "--algo", "exhaustive", "--eval", "synthetic:factor-count"],
    ));
    assert_eq!(res["best_node"].as_str().unwrap().split('x').count(), 1);
    assert_eq!(res["evaluations"], 9);

    ghspace(dir.path(), &["graph", "build", "--max-factors", "1", "--out", "g.dot"]);
    let dot = fs::read_to_string(dir.path().join("g.dot")).unwrap();
    assert_eq!(dot.lines().filter(|l| l.contains("--")).count(), 3);
    assert_eq!(dot.lines().filter(|l| l.contains("[label=") && !l.contains("--")).count(), 3);

    let values = "E2,3\nS2,2\nH2,4\nE2xE2,5\nE2xS2,1\nE2xH2,0\nS2xS2,6\nS2xH2,7\nH2xH2,8\n";
    fs::write(dir.path().join("v.csv"), values).unwrap();
    let greedy = json(&ghspace(
        dir.path(),
        &["graph", "search", "--graph", "g.json", "--algo", "greedy", "--start", "H2", "--eval", "table:v.csv"],
    ));
    assert_eq!(greedy["best_node"], "E2xH2");
    let bf = json(&ghspace(
        dir.path(),
        &["graph", "search", "--graph", "g.json", "--algo", "bestfirst", "--start", "S2xS2", "--budget", "2", "--eval", "table:v.csv"],
    ));
    assert_eq!(bf["evaluations"], 2);

    let cmd = json(&ghspace(
        dir.path(),
        &["graph", "search", "--graph", "g.json", "--eval", "cmd:echo ${#1} #"],
    ));
    assert_eq!(cmd["best_value"], 2.0);

    fs::write(dir.path().join("short.csv"), "E2,1\n").unwrap();
    let missing = ghspace(dir.path(), &["graph", "search", "--graph", "g.json", "--eval", "table:short.csv"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("S2"));
    assert_eq!(ghspace(dir.path(), &["graph", "search", "--graph", "g.json", "--eval", "nope"]).status.code(), Some(1));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), r#"{"format": "csv", "seed": 3}"#).unwrap();
    ghspace(dir.path(), &["sample", "e2", "--grid", "3x4", "--out", "a.csv"]);
    let out = ghspace(dir.path(), &["--config", "cfg.json", "hausdorff", "a.csv", "a.csv"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("distance,"));
    let out = ghspace(dir.path(), &["--config", "cfg.json", "--format", "json", "--threads", "2", "hausdorff", "a.csv", "a.csv"]);
    assert_eq!(json(&out)["distance"], 0.0);
    fs::write(dir.path().join("bad.json"), r#"{"sede": 3}"#).unwrap();
    assert_eq!(ghspace(dir.path(), &["--config", "bad.json", "table", "--default"]).status.code(), Some(3));
    assert_eq!(ghspace(dir.path(), &["--threads", "0", "table", "--default"]).status.code(), Some(1));
}
