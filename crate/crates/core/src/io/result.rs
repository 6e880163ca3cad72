//! Planner selection and the JSON result record.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::constraints::{validate_path, ConstraintReport};
use crate::error::{Error, Result};
use crate::grid::{build_world_in, find_holes};
use crate::io::num::ser_f64;
use crate::io::scenario::{ScenarioConfig, SCHEMA_VERSION};
use crate::oracle::{brute_force_plan, exhaustive_optimum, DEFAULT_MAX_TURNS};
use crate::planner::{constrained_theta_star, theta_star, PlanOutcome, PlannedPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    /// Baseline Theta*, blind to every flight constraint.
    Theta,
    Constrained,
    Brute,
    Exhaustive,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 4] = [
        PlannerKind::Theta,
        PlannerKind::Constrained,
        PlannerKind::Brute,
        PlannerKind::Exhaustive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Theta => "theta",
            PlannerKind::Constrained => "constrained",
            PlannerKind::Brute => "brute",
            PlannerKind::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        PlannerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown planner `{s}` (expected theta, constrained, brute or exhaustive)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Found,
    NoPath,
    /// The planner stopped on one of its bounds without an answer.
    Error,
}

/// Outcome of one planner on one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema: u32,
    pub scenario_id: Option<String>,
    pub planner: PlannerKind,
    pub status: RunStatus,
    pub path: Option<PlannedPath>,
    /// Audit of `path` against the scenario's constraints.
    pub report: Option<ConstraintReport>,
    #[serde(serialize_with = "ser_f64")]
    pub wall_time_ms: f64,
    pub expansions: u64,
    pub backtracks: u64,
    /// Brute-force iterations; one for single-pass planners.
    pub iterations: usize,
    /// A no-path answer that came from a search budget, not a proof.
    #[serde(default)]
    pub budget_exhausted: bool,
    pub error: Option<String>,
    /// Straight-line start-goal distance, meters.
    #[serde(serialize_with = "ser_f64")]
    pub direct_m: f64,
}

impl ResultRecord {
    /// A path was found and passes every constraint.
    pub fn success(&self) -> bool {
        self.status == RunStatus::Found && self.report.as_ref().is_some_and(|r| r.pass)
    }

    /// Path length over the straight start-goal distance.
    pub fn relative_length(&self) -> Option<f64> {
        self.path.as_ref().map(|p| p.cost_m / self.direct_m)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::parse("result", e.to_string()))
    }
}

/// Builds the scenario's world and runs `planner` on it. Oracle bound
/// failures become `RunStatus::Error` records; invalid scenarios are errors.
pub fn run_planner(scenario: &ScenarioConfig, base_dir: Option<&Path>, planner: PlannerKind) -> Result<ResultRecord> {
    let world = build_world_in(scenario, base_dir)?;
    let holes = find_holes(&world);
    let cs = &scenario.constraints;
    let (start, goal) = (scenario.start, scenario.goal);

    let t0 = Instant::now();
    let (outcome, iterations) = match planner {
        PlannerKind::Theta => (Ok(theta_star(&world, start, goal)), 1),
        PlannerKind::Constrained => (Ok(constrained_theta_star(&world, &holes, cs, start, goal)), 1),
        PlannerKind::Brute => match brute_force_plan(&world, &holes, cs, start, goal) {
            Ok(run) => {
                let n = run.iterations();
                (Ok(run.outcome), n)
            }
            Err(e) => (Err(e), 0),
        },
        PlannerKind::Exhaustive => (exhaustive_optimum(&world, &holes, cs, start, goal, DEFAULT_MAX_TURNS), 1),
    };
    let wall_time_ms = t0.elapsed().as_secs_f64() * 1e3;

    let mut rec = ResultRecord {
        schema: SCHEMA_VERSION,
        scenario_id: scenario.id.clone(),
        planner,
        status: RunStatus::Error,
        path: None,
        report: None,
        wall_time_ms,
        expansions: 0,
        backtracks: 0,
        iterations,
        budget_exhausted: false,
        error: None,
        direct_m: start.dist(goal) * world.cell_size_m(),
    };
    match outcome {
        Ok(PlanOutcome::Found(p)) => {
            rec.status = RunStatus::Found;
            rec.expansions = p.expansions;
            rec.backtracks = p.backtracks;
            rec.report = Some(validate_path(&p.turning_points, &world, &holes, cs)?);
            rec.path = Some(p);
        }
        Ok(PlanOutcome::NoPath(n)) => {
            rec.status = RunStatus::NoPath;
            rec.expansions = n.expansions;
            rec.backtracks = n.backtracks;
            rec.budget_exhausted = n.budget_exhausted;
        }
        Err(e @ (Error::OracleExhausted { .. } | Error::OracleBoundExceeded(_))) => rec.error = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    Ok(rec)
}
