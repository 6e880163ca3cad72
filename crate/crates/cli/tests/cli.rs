use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corridor-theta")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const TRIVIAL: &str = r#"{"grid":{"width":9,"height":9,"cell_size_m":1.0},"start":{"x":0,"y":0},"goal":{"x":9,"y":9}}"#;

#[test]
fn plan_trivial_costs_nine_root_two() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", TRIVIAL);
    let out = cli(&["plan", "--scenario", &s]);
    assert_eq!(out.status.code(), Some(0));
    let rec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["status"], "found");
    let cost = rec["path"]["cost_m"].as_f64().unwrap();
    assert!((cost - 9.0 * 2f64.sqrt()).abs() < 1e-8, "{cost}");
}

#[test]
fn plan_then_validate_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        r#"{"grid":{"width":12,"height":8,"cell_size_m":2.0},
            "obstacles":{"rects":[{"x":5,"y":0,"w":2,"h":6}]},
            "constraints":{"theta_bmax_deg":60,"l_min_m":2.0},
            "start":{"x":1,"y":2},"goal":{"x":11,"y":3}}"#,
    );
    let r = dir.path().join("r.json");
    let svg = dir.path().join("r.svg");
    let plan = cli(&["plan", "--scenario", &s, "--out", r.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert_eq!(plan.status.code(), Some(0), "{}", String::from_utf8_lossy(&plan.stderr));
    let doc = fs::read_to_string(&svg).unwrap();
    assert!(doc.contains(r#"<g id="final">"#) && doc.contains(r#"data-planner="theta""#));
    let v = cli(&["validate", "--scenario", &s, "--path", r.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stdout));
}

#[test]
fn validate_broken_path_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        r#"{"grid":{"width":9,"height":9,"cell_size_m":1.0},"constraints":{"theta_bmax_deg":45},
            "start":{"x":0,"y":0},"goal":{"x":9,"y":9}}"#,
    );
    let p = write(dir.path(), "p.json", r#"[{"x":0,"y":0},{"x":9,"y":0},{"x":9,"y":9}]"#);
    let out = cli(&["validate", "--scenario", &s, "--path", &p]);
    assert_eq!(out.status.code(), Some(3));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["pass"], false);
    assert_eq!(doc["failures"], serde_json::json!(["turn_angle"]));
}

#[test]
fn no_path_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        r#"{"grid":{"width":6,"height":6,"cell_size_m":1.0},
            "obstacles":{"rects":[{"x":3,"y":0,"w":1,"h":6}]},
            "start":{"x":0,"y":0},"goal":{"x":6,"y":6}}"#,
    );
    for planner in ["theta", "constrained"] {
        let out = cli(&["plan", "--scenario", &s, "--planner", planner]);
        assert_eq!(out.status.code(), Some(2), "{planner}");
        let rec: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(rec["status"], "no_path");
    }
}

#[test]
fn errors_are_structured_and_distinct_from_no_path() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        r#"{"grid":{"width":9,"height":9,"cell_size_m":1.0},"constraints":{"d_row_m":50,"d_cfod_m":30},
            "infrastructure":[{"x":0,"y":4},{"x":9,"y":4}],"start":{"x":0,"y":0},"goal":{"x":9,"y":9}}"#,
    );
    let out = cli(&["plan", "--scenario", &s]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "invalid_constraints");
    assert_eq!(cli(&["plan", "--bogus"]).status.code(), Some(1));
}

#[test]
fn bench_csv_has_one_row_per_scenario_and_planner() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let c = corpus.to_str().unwrap();
    let gen = cli(&["gen", "--corpus", c, "--kind", "small", "--count", "6", "--seed", "11"]);
    assert_eq!(gen.status.code(), Some(0));
    assert_eq!(fs::read_dir(&corpus).unwrap().count(), 6);
    let out = cli(&["bench", "--corpus", c, "--planner", "theta", "--planner", "constrained"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    assert_eq!(&header[0], "scenario");
    assert_eq!(&header[1], "planner");
    let rows: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 12);
    for r in &rows {
        assert_eq!(r.len(), header.len());
    }
    let json = cli(&["bench", "--corpus", c, "--format", "json", "--planner", "theta"]);
    let doc: Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(doc["records"].as_array().unwrap().len(), 6);
    assert_eq!(doc["metrics"][0]["planner"], "theta");
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str| {
        let d = dir.path().join(name);
        assert_eq!(cli(&["gen", "--corpus", d.to_str().unwrap(), "--kind", "holes", "--count", "3", "--seed", "5"]).status.code(), Some(0));
        let mut files: Vec<_> = fs::read_dir(&d).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        files.iter().map(|f| fs::read(f).unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn oracle_runs_both_oracles() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        r#"{"grid":{"width":6,"height":6,"cell_size_m":1.0},
            "obstacles":{"rects":[{"x":2,"y":1,"w":2,"h":4}]},
            "constraints":{"theta_bmax_deg":90},
            "start":{"x":0,"y":3},"goal":{"x":6,"y":3}}"#,
    );
    let out = cli(&["oracle", "--scenario", &s]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs: Value = serde_json::from_slice(&out.stdout).unwrap();
    let planners: Vec<&str> = recs.as_array().unwrap().iter().map(|r| r["planner"].as_str().unwrap()).collect();
    assert_eq!(planners, ["brute", "exhaustive"]);
    assert_eq!(cli(&["oracle", "--scenario", &s, "--planner", "theta"]).status.code(), Some(1));
}
