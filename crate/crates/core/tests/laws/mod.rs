//! Property laws shared by the property tests and the acceptance run.

use std::collections::HashSet;

use proptest::prelude::*;
use proptest::test_runner::{RngSeed, TestCaseError, TestRunner};

use corridor_theta::geometry::clip_length_in_cells;
use corridor_theta::io::corpus::{random_scenario, RandomParams};
use corridor_theta::planner::{constrained_theta_star, PlanOutcome};
use corridor_theta::{build_world, find_holes, parse_scenario, validate_path, Cell, GridWorld, ScenarioConfig, Segment, Vertex};

#[allow(dead_code)] // only the property tests use it
pub const CASES: u32 = 1000;

#[allow(dead_code)] // only the acceptance run lists them
pub const LAWS: [&str; 6] = [
    "line_of_sight_symmetry",
    "clipping_additivity",
    "monotone_relaxation",
    "determinism",
    "scenario_round_trip",
    "plan_then_validate",
];

/// Fixed seed: every run checks the same cases.
fn runner(cases: u32) -> TestRunner {
    TestRunner::new(ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    })
}

/// Runs law `name` over `cases` generated cases.
pub fn check(name: &str, cases: u32) -> Result<(), String> {
    let mut r = runner(cases);
    match name {
        "line_of_sight_symmetry" => r.run(&(blocked(), vertex(8, 8), vertex(8, 8)), los_symmetry).map_err(|e| e.to_string()),
        "clipping_additivity" => r.run(&(vertex(8, 8), vertex(8, 8), cells(24), cells(24)), clipping).map_err(|e| e.to_string()),
        "monotone_relaxation" => r.run(&(any::<u64>(), relax()), relaxation).map_err(|e| e.to_string()),
        "determinism" => r.run(&any::<u64>(), determinism).map_err(|e| e.to_string()),
        "scenario_round_trip" => r.run(&any::<u64>(), round_trip).map_err(|e| e.to_string()),
        "plan_then_validate" => r.run(&any::<u64>(), plan_validates).map_err(|e| e.to_string()),
        _ => Err(format!("unknown law {name}")),
    }
}

fn scenario(seed: u64) -> Option<ScenarioConfig> {
    random_scenario(&RandomParams::small(), seed)
}

fn plan(s: &ScenarioConfig) -> (GridWorld, PlanOutcome) {
    let world = build_world(s).unwrap();
    let holes = find_holes(&world);
    let out = constrained_theta_star(&world, &holes, &s.constraints, s.start, s.goal);
    (world, out)
}

fn vertex(w: i32, h: i32) -> impl Strategy<Value = Vertex> {
    (0..=w, 0..=h).prop_map(|(x, y)| Vertex::new(x, y))
}

fn blocked() -> impl Strategy<Value = Vec<(i32, i32)>> {
    prop::collection::vec((0..8i32, 0..8i32), 0..20)
}

fn cells(n: usize) -> impl Strategy<Value = HashSet<Cell>> {
    prop::collection::hash_set((0..8i32, 0..8i32).prop_map(|(x, y)| Cell::new(x, y)), 0..n)
}

#[derive(Debug, Clone, Copy)]
enum Relax {
    Turn(f64),
    Storage(f64),
    Corridor(f64),
}

fn relax() -> impl Strategy<Value = Relax> {
    prop_oneof![
        (1.0..90.0f64).prop_map(Relax::Turn),
        (0.5..20.0f64).prop_map(Relax::Storage),
        (0.5..10.0f64).prop_map(Relax::Corridor),
    ]
}

fn los_symmetry((blocked, a, b): (Vec<(i32, i32)>, Vertex, Vertex)) -> Result<(), TestCaseError> {
    let mut w = GridWorld::new(8, 8, 1.0);
    for (x, y) in blocked {
        w.set_blocked(Cell::new(x, y), true);
    }
    prop_assert_eq!(w.line_of_sight(a, b), w.line_of_sight(b, a));
    Ok(())
}

fn clipping((a, b, x, y): (Vertex, Vertex, HashSet<Cell>, HashSet<Cell>)) -> Result<(), TestCaseError> {
    prop_assume!(a != b);
    let s = Segment::new(a, b);
    let union: HashSet<Cell> = x.union(&y).copied().collect();
    let (cu, cx, cy) = (clip_length_in_cells(&s, &union), clip_length_in_cells(&s, &x), clip_length_in_cells(&s, &y));
    prop_assert!(cu <= cx + cy + 1e-9);
    if x.is_disjoint(&y) {
        prop_assert!((cu - (cx + cy)).abs() < 1e-9);
    }
    // border pieces belong to the off-grid cells on their lower side
    let all: HashSet<Cell> = (-1..9).flat_map(|i| (-1..9).map(move |j| Cell::new(i, j))).collect();
    prop_assert!((clip_length_in_cells(&s, &all) - s.length()).abs() < 1e-9);
    Ok(())
}

fn relaxation((seed, r): (u64, Relax)) -> Result<(), TestCaseError> {
    let Some(tight) = scenario(seed) else { return Ok(()) };
    let mut loose = tight.clone();
    let cs = &mut loose.constraints;
    match r {
        Relax::Turn(d) => cs.theta_bmax_deg = (cs.theta_bmax_deg + d).min(180.0),
        Relax::Storage(d) => cs.d_zero_m += d,
        Relax::Corridor(d) => {
            cs.d_row_m = (cs.d_row_m - d).max(0.0);
            cs.d_cfod_m += d;
        }
    }
    if let Some(a) = plan(&tight).1.path().map(|p| p.cost_m) {
        let b = plan(&loose).1.path().map(|p| p.cost_m);
        prop_assert!(b.is_some_and(|b| b <= a + 1e-9), "{} -> {:?} under {:?}", a, b, r);
    }
    Ok(())
}

fn determinism(seed: u64) -> Result<(), TestCaseError> {
    let Some(s) = scenario(seed) else { return Ok(()) };
    prop_assert_eq!(plan(&s).1, plan(&s).1);
    Ok(())
}

fn round_trip(seed: u64) -> Result<(), TestCaseError> {
    let Some(s) = scenario(seed) else { return Ok(()) };
    let back = parse_scenario(s.to_json().unwrap().as_bytes()).unwrap();
    prop_assert_eq!(&back, &s);
    prop_assert_eq!(back.to_json().unwrap(), s.to_json().unwrap());
    Ok(())
}

/// Plans, writes the result as JSON, reads it back and validates it.
fn plan_validates(seed: u64) -> Result<(), TestCaseError> {
    let Some(s) = scenario(seed) else { return Ok(()) };
    let (world, out) = plan(&s);
    if let PlanOutcome::Found(p) = out {
        let json = serde_json::to_string(&p).unwrap();
        let back: corridor_theta::planner::PlannedPath = serde_json::from_str(&json).unwrap();
        let report = validate_path(&back.turning_points, &world, &find_holes(&world), &s.constraints).unwrap();
        prop_assert!(report.pass, "{:?}", report.failures());
    }
    Ok(())
}
