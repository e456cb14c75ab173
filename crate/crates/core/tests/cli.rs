use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn cnotnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cnotnet")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn json_result(o: &Output) -> Value {
    serde_json::from_str::<Value>(&stdout(o)).unwrap()["result"].clone()
}

#[test]
fn connectivity_rows_and_metadata() {
    let o = cnotnet(&["connectivity", "--topology", "complete", "--n", "3..13"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows = body(&text);
    assert_eq!(rows[0], "N,gamma_mean,gamma_std,bound_diameter,bound_min_p,diameter,replicas,bounds_hold");
    assert_eq!(rows.len(), 12);
    let meta: Value = serde_json::from_str(text.lines().next().unwrap().trim_start_matches("# ")).unwrap();
    assert_eq!(meta["config"]["topology"], "complete");
    assert_eq!(meta["config"]["n"], "3..13");
    assert!(meta["runtime_seconds"].as_f64().is_some());
    assert!(meta["generator"].as_str().unwrap().contains("ChaCha8"));
}

#[test]
fn circle_fit_and_bound_assertion() {
    let args = [
        "connectivity",
        "--topology",
        "circle",
        "--n",
        "3..13",
        "--fit",
        "1.5,2.5",
        "--fit-min",
        "8",
        "--format",
        "json",
    ];
    let strict = cnotnet(&args);
    // The diameter bound fails for the weighted three-qubit cycle.
    assert_eq!(strict.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("bound violated"));
    let mut relaxed: Vec<&str> = args.to_vec();
    relaxed.push("--no-assert");
    let o = cnotnet(&relaxed);
    assert_eq!(o.status.code(), Some(0));
    let a = json_result(&o)["fit"]["fit"]["a"].as_f64().unwrap();
    assert!((a - 0.301).abs() < 0.02, "a = {a}");
}

#[test]
fn invalid_range_is_a_usage_error() {
    let o = cnotnet(&["connectivity", "--n", "1..2"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(err["error"], "usage");
    assert_eq!(cnotnet(&["connectivity", "--n", "5..3"]).status.code(), Some(2));
}

#[test]
fn trajectory_curves_under_bound_and_reproducible() {
    let args = ["trajectory", "--n", "6", "--init", "000001,101010,111111", "--steps", "50"];
    let a = cnotnet(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let text = stdout(&a);
    let rows = body(&text);
    assert_eq!(rows[0], "init,step,distance,bound");
    assert_eq!(rows.len(), 1 + 3 * 51);
    for r in &rows[1..] {
        let f: Vec<&str> = r.split(',').collect();
        let (d, b): (f64, f64) = (f[2].parse().unwrap(), f[3].parse().unwrap());
        assert!(d <= b + 1e-9);
    }
    let b = cnotnet(&args);
    assert_eq!(body(&text), body(&stdout(&b)));
}

#[test]
fn trajectory_from_attractor_state_is_flat() {
    let o = cnotnet(&["trajectory", "--n", "3", "--init", "000", "--steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for r in &body(&text)[1..] {
        let d: f64 = r.split(',').nth(2).unwrap().parse().unwrap();
        assert!(d < 1e-12);
    }
    assert_eq!(cnotnet(&["trajectory", "--n", "3", "--init", "0101"]).status.code(), Some(2));
    assert_eq!(cnotnet(&["trajectory", "--n", "7", "--init", "0000001"]).status.code(), Some(3));
}

#[test]
fn group_commands() {
    let o = cnotnet(&["group", "--n", "2", "--p", "0.5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json_result(&o);
    assert_eq!(r["order"], 6);
    assert!((r["subleading"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(r["trace_sum"], 12);
    assert_eq!(r["bipartite"], true);
    let o = cnotnet(&["group", "--n", "3", "--format", "json"]);
    assert_eq!(json_result(&o)["order"], 168);
    let o = cnotnet(&["group", "--n", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
    assert_eq!(cnotnet(&["group", "--n", "3", "--p", "0.5"]).status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"topology": "circle", "n": "4..7", "format": "csv"}"#).unwrap();
    let out = dir.path().join("scan.csv");
    let o = cnotnet(&[
        "connectivity",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "4..5",
        "--threads",
        "1",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(body(&text).len(), 3);
    assert!(text.contains("\"topology\":\"circle\""));

    fs::write(&cfg, r#"{"unknown_field": 1}"#).unwrap();
    assert_eq!(cnotnet(&["connectivity", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn noisy_scan_records_seeds() {
    let args =
        ["connectivity", "--n", "4..5", "--epsilon", "0.3", "--replicas", "3", "--seed", "42", "--format", "json"];
    let a = json_result(&cnotnet(&args));
    let b = json_result(&cnotnet(&args));
    assert_eq!(a["scan"], b["scan"]);
    assert_eq!(a["scan"]["instances"].as_array().unwrap().len(), 6);
    assert!(a["scan"]["instances"][0]["seed"].as_u64().is_some());
}

#[test]
fn fit_from_scan_file() {
    let dir = tempfile::tempdir().unwrap();
    let scan = dir.path().join("scan.csv");
    let o = cnotnet(&["connectivity", "--n", "3..12", "--output", scan.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = cnotnet(&["fit", "--input", scan.to_str().unwrap(), "--fit", "1,2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json_result(&o);
    assert_eq!(r["fit"]["n_min"], 8);
    assert_eq!(r["fit"]["n_max"], 12);
    assert!(r["fit"]["rss"].as_f64().unwrap() < r["single_power"]["rss"].as_f64().unwrap() * 10.0);
}

#[test]
fn bounds_report_columns() {
    let o = cnotnet(&["bounds", "--topology", "unbalanced", "--n", "6..8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows = body(&text);
    assert!(rows[0].starts_with("N,replica,gamma,diameter,bound_diameter,holds_diameter"));
    assert_eq!(rows.len(), 4);
    assert!(rows[1..].iter().all(|r| r.contains("true")));
}
