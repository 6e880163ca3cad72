//! Corpus-level planner comparison.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::result::{run_planner, PlannerKind, ResultRecord};
use crate::io::scenario::ScenarioConfig;

/// Caps the worker threads used by [`compare_runs`].
pub const THREADS_ENV: &str = "CORRIDOR_THETA_THREADS";

/// Aggregate metrics of one planner over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlannerMetrics {
    pub planner: PlannerKind,
    pub runs: usize,
    /// Paths found that pass every constraint.
    pub successes: usize,
    pub success_rate: f64,
    /// Mean path length over straight-line distance, successful runs only.
    pub mean_relative_length: Option<f64>,
    pub mean_expansions: f64,
    pub mean_wall_time_ms: f64,
    pub mean_iterations: f64,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    /// One record per (scenario, planner), scenario-major.
    pub records: Vec<ResultRecord>,
    pub metrics: Vec<PlannerMetrics>,
}

/// Runs every planner on every scenario, in parallel across scenarios.
pub fn compare_runs(scenarios: &[ScenarioConfig], planners: &[PlannerKind], base_dir: Option<&Path>) -> Result<Comparison> {
    let jobs: Vec<(&ScenarioConfig, PlannerKind)> =
        scenarios.iter().flat_map(|s| planners.iter().map(move |&p| (s, p))).collect();
    let run = || -> Result<Vec<ResultRecord>> {
        jobs.par_iter().map(|&(s, p)| run_planner(s, base_dir, p)).collect()
    };
    let records = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::parse(THREADS_ENV, e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let metrics = planners.iter().map(|&p| summarize(p, &records)).collect();
    Ok(Comparison { records, metrics })
}

fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::parse(THREADS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
    }
}

pub fn summarize(planner: PlannerKind, records: &[ResultRecord]) -> PlannerMetrics {
    let mine: Vec<&ResultRecord> = records.iter().filter(|r| r.planner == planner).collect();
    let runs = mine.len();
    let ok: Vec<&&ResultRecord> = mine.iter().filter(|r| r.success()).collect();
    let mean = |xs: &mut dyn Iterator<Item = f64>| -> f64 {
        let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
        if n == 0 {
            0.0
        } else {
            s / n as f64
        }
    };
    PlannerMetrics {
        planner,
        runs,
        successes: ok.len(),
        success_rate: if runs == 0 { 0.0 } else { ok.len() as f64 / runs as f64 },
        mean_relative_length: (!ok.is_empty())
            .then(|| mean(&mut ok.iter().filter_map(|r| r.relative_length()))),
        mean_expansions: mean(&mut mine.iter().map(|r| r.expansions as f64)),
        mean_wall_time_ms: mean(&mut mine.iter().map(|r| r.wall_time_ms)),
        mean_iterations: mean(&mut mine.iter().map(|r| r.iterations as f64)),
    }
}

const RECORD_HEADER: [&str; 10] = [
    "scenario",
    "planner",
    "status",
    "valid",
    "cost_m",
    "relative_length",
    "expansions",
    "backtracks",
    "iterations",
    "wall_time_ms",
];

fn record_row(r: &ResultRecord) -> [String; 10] {
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.6}"));
    [
        r.scenario_id.clone().unwrap_or_default(),
        r.planner.to_string(),
        serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default(),
        r.report.as_ref().map_or(String::new(), |rep| rep.pass.to_string()),
        opt(r.path.as_ref().map(|p| p.cost_m)),
        opt(r.relative_length()),
        r.expansions.to_string(),
        r.backtracks.to_string(),
        r.iterations.to_string(),
        format!("{:.3}", r.wall_time_ms),
    ]
}

const METRICS_HEADER: [&str; 8] = [
    "planner",
    "runs",
    "successes",
    "success_rate",
    "mean_relative_length",
    "mean_expansions",
    "mean_wall_time_ms",
    "mean_iterations",
];

fn metrics_row(m: &PlannerMetrics) -> [String; 8] {
    [
        m.planner.to_string(),
        m.runs.to_string(),
        m.successes.to_string(),
        format!("{:.4}", m.success_rate),
        m.mean_relative_length.map_or(String::new(), |x| format!("{x:.4}")),
        format!("{:.1}", m.mean_expansions),
        format!("{:.3}", m.mean_wall_time_ms),
        format!("{:.2}", m.mean_iterations),
    ]
}

fn csv_of<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn aligned<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> String {
    let rows: Vec<[String; N]> = std::iter::once(header.map(str::to_owned)).chain(rows).collect();
    let widths: Vec<usize> = (0..N).map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in &rows {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

impl Comparison {
    /// One CSV row per (scenario, planner).
    pub fn records_csv(&self) -> Result<String> {
        csv_of(RECORD_HEADER, self.records.iter().map(record_row))
    }

    /// One CSV row per planner.
    pub fn metrics_csv(&self) -> Result<String> {
        csv_of(METRICS_HEADER, self.metrics.iter().map(metrics_row))
    }

    pub fn metrics_text(&self) -> String {
        aligned(METRICS_HEADER, self.metrics.iter().map(metrics_row))
    }

    pub fn metrics_for(&self, planner: PlannerKind) -> Option<&PlannerMetrics> {
        self.metrics.iter().find(|m| m.planner == planner)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vertex;

    #[test]
    fn free_corpus_is_straight() {
        let scenarios: Vec<ScenarioConfig> = (0..4)
            .map(|i| {
                let mut s = ScenarioConfig::new(12, 12, 2.0, Vertex::new(0, i), Vertex::new(11, 11 - i));
                s.id = Some(format!("free-{i}"));
                s
            })
            .collect();
        let c = compare_runs(&scenarios, &[PlannerKind::Theta, PlannerKind::Constrained], None).unwrap();
        assert_eq!(c.records.len(), 8);
        for m in &c.metrics {
            assert_eq!(m.success_rate, 1.0);
            assert!((m.mean_relative_length.unwrap() - 1.0).abs() < 1e-12);
        }
        let csv = c.records_csv().unwrap();
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.starts_with("scenario,planner,status"));
        let text = c.metrics_text();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(1).unwrap().starts_with("theta "));
    }
}
