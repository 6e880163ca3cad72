//! Seeded scenario generators.
//!
//! [`generate_corpus`] builds long corridor fragments in the style of a
//! pipeline survey: a bent infrastructure line along the fragment,
//! rectangular buildings, and access points spaced so that coverage has
//! gaps. [`random_scenarios`] builds small dense instances for testing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintSet;
use crate::geometry::{Cell, Point, Vertex};
use crate::grid::{build_layers, build_world, find_holes, AccessPoint};
use crate::io::scenario::{CellRect, ScenarioConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusParams {
    pub count: usize,
    pub width: u32,
    pub height: u32,
    pub cell_size_m: f64,
    /// Number of rectangular obstacles per fragment.
    pub obstacles: usize,
    /// Largest obstacle side, in cells.
    pub max_obstacle_side: i32,
    /// Access point radius range, meters.
    pub ap_radius_m: (f64, f64),
    /// Distance between consecutive access points along the fragment, in cells.
    pub ap_spacing: (i32, i32),
    /// Minimum straight-line start-goal distance, in cells.
    pub min_los_cells: f64,
    pub constraints: ConstraintSet,
}

impl Default for CorpusParams {
    /// 30 fragments of 1950 m x 315 m at 3 m cells.
    fn default() -> Self {
        CorpusParams {
            count: 30,
            width: 650,
            height: 105,
            cell_size_m: 3.0,
            obstacles: 40,
            max_obstacle_side: 12,
            ap_radius_m: (165.0, 200.0),
            ap_spacing: (100, 140),
            min_los_cells: 500.0,
            constraints: ConstraintSet {
                l_min_m: 6.0,
                theta_bmax_deg: 20.0,
                d_row_m: 9.0,
                d_cfod_m: 120.0,
                d_zero_m: 240.0,
            },
        }
    }
}

/// Deterministic corridor corpus. Every fragment has at least one coverage
/// hole and a start-goal distance of at least `min_los_cells`.
pub fn generate_corpus(params: &CorpusParams, seed: u64) -> Vec<ScenarioConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(params.count);
    while out.len() < params.count {
        let sub = rng.gen::<u64>();
        if let Some(mut s) = corridor_fragment(params, sub) {
            s.id = Some(format!("fragment-{:03}", out.len()));
            out.push(s);
        }
    }
    out
}

fn corridor_fragment(p: &CorpusParams, seed: u64) -> Option<ScenarioConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (p.width as i32, p.height as i32);
    let cell = p.cell_size_m;

    // infrastructure: a gently bent line through the middle third
    let mut line = Vec::new();
    let legs = 4;
    for i in 0..=legs {
        let x = w * i / legs;
        let y = h / 2 + rng.gen_range(-(h / 10)..=h / 10);
        line.push(Vertex::new(x, y));
    }

    let mut s = ScenarioConfig::new(p.width, p.height, cell, Vertex::new(0, 0), Vertex::new(1, 1));
    s.seed = seed;
    s.constraints = p.constraints;
    s.infrastructure = Some(line.clone());

    // one side of the line, far enough from it to sit inside the band
    let side = if rng.gen_bool(0.5) { 1 } else { -1 };
    let mid = (p.constraints.d_row_m + p.constraints.d_cfod_m.min(h as f64 * cell)) / 2.0 / cell;
    let offset = (mid.round() as i32).clamp(1, h / 2 - 1) * side;
    let line_y = |x: i32| -> i32 {
        let seg = ((x * legs) / w).min(legs - 1) as usize;
        let (a, b) = (line[seg], line[seg + 1]);
        a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x).max(1)
    };
    let margin = ((w as f64 - p.min_los_cells) / 2.0).max(1.0) as i32;
    let sx = rng.gen_range(1..=margin.max(1));
    let gx = (w - rng.gen_range(1..=margin.max(1))).max(sx + p.min_los_cells.ceil() as i32);
    if gx >= w {
        return None;
    }
    s.start = Vertex::new(sx, (line_y(sx) + offset).clamp(1, h - 1));
    s.goal = Vertex::new(gx, (line_y(gx) + offset).clamp(1, h - 1));
    if s.start.dist(s.goal) < p.min_los_cells {
        return None;
    }

    let keep_clear = |r: &CellRect, v: Vertex| {
        v.x >= r.x - 2 && v.x <= r.x + r.w + 2 && v.y >= r.y - 2 && v.y <= r.y + r.h + 2
    };
    for _ in 0..p.obstacles {
        let rw = rng.gen_range(2..=p.max_obstacle_side);
        let rh = rng.gen_range(2..=p.max_obstacle_side);
        let r = CellRect {
            x: rng.gen_range(0..w - rw),
            y: rng.gen_range(0..h - rh),
            w: rw,
            h: rh,
        };
        if !keep_clear(&r, s.start) && !keep_clear(&r, s.goal) {
            s.obstacles.rects.push(r);
        }
    }

    let mut x = rng.gen_range(0..p.ap_spacing.0);
    while x < w {
        let y = (line_y(x.min(w - 1)) + rng.gen_range(-(h / 20)..=h / 20)).clamp(0, h);
        s.coverage.access_points.push(AccessPoint {
            center: Point::new(x as f64 * cell, y as f64 * cell),
            radius_m: rng.gen_range(p.ap_radius_m.0..=p.ap_radius_m.1),
        });
        x += rng.gen_range(p.ap_spacing.0..=p.ap_spacing.1);
    }

    let s = s.normalized();
    let world = build_world(&s).ok()?;
    if find_holes(&world).is_empty() {
        return None;
    }
    Some(s)
}

/// Shape of the small random instances used by the test suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomParams {
    pub min_side: u32,
    pub max_side: u32,
    pub max_obstacles: usize,
    pub max_holes: usize,
    /// Draw active constraints (leg length, turn angle, storage, corridor).
    pub constrained: bool,
}

impl RandomParams {
    pub fn small() -> Self {
        RandomParams {
            min_side: 5,
            max_side: 8,
            max_obstacles: 3,
            max_holes: 2,
            constrained: true,
        }
    }

    pub fn medium() -> Self {
        RandomParams {
            min_side: 16,
            max_side: 64,
            max_obstacles: 6,
            max_holes: 3,
            constrained: true,
        }
    }
}

/// `count` random valid scenarios.
pub fn random_scenarios(params: &RandomParams, seed: u64, count: usize) -> Vec<ScenarioConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let sub = rng.gen::<u64>();
        if let Some(mut s) = random_scenario(params, sub) {
            s.id = Some(format!("random-{:03}", out.len()));
            out.push(s);
        }
    }
    out
}

/// One random scenario, or `None` when the draw has unusable endpoints.
pub fn random_scenario(p: &RandomParams, seed: u64) -> Option<ScenarioConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = rng.gen_range(p.min_side..=p.max_side) as i32;
    let h = rng.gen_range(p.min_side..=p.max_side) as i32;
    let mut s = ScenarioConfig::new(w as u32, h as u32, 1.0, Vertex::new(0, 0), Vertex::new(1, 1));
    s.seed = seed;

    let max_rect = |side: i32| (side / 3).max(1);
    for _ in 0..rng.gen_range(0..=p.max_obstacles) {
        let rw = rng.gen_range(1..=max_rect(w));
        let rh = rng.gen_range(1..=max_rect(h));
        s.obstacles.rects.push(CellRect {
            x: rng.gen_range(0..=w - rw),
            y: rng.gen_range(0..=h - rh),
            w: rw,
            h: rh,
        });
    }

    let holes = rng.gen_range(0..=p.max_holes);
    for _ in 0..holes {
        let rw = rng.gen_range(1..=max_rect(w) + 1);
        let rh = rng.gen_range(1..=max_rect(h) + 1);
        let (x0, y0) = (rng.gen_range(0..=w - rw), rng.gen_range(0..=h - rh));
        for y in y0..y0 + rh {
            for x in x0..x0 + rw {
                s.coverage.uncovered_cells.push(Cell::new(x, y));
            }
        }
    }
    s.coverage.uncovered_cells.sort_by_key(|c| (c.y, c.x));
    s.coverage.uncovered_cells.dedup();

    if p.constrained {
        let c = &mut s.constraints;
        c.l_min_m = *[0.0, 1.0, 1.5, 2.0].choose(&mut rng).unwrap();
        c.theta_bmax_deg = *[45.0, 60.0, 90.0, 120.0, 180.0].choose(&mut rng).unwrap();
        if holes > 0 {
            c.d_zero_m = *[1.0, 2.0, 3.0, 5.0, f64::INFINITY].choose(&mut rng).unwrap();
        }
        if rng.gen_bool(0.3) {
            let a = Vertex::new(rng.gen_range(0..=w), 0);
            let b = Vertex::new(rng.gen_range(0..=w), h);
            s.infrastructure = Some(vec![a, b]);
            c.d_row_m = *[0.0, 0.5, 1.0].choose(&mut rng).unwrap();
            c.d_cfod_m = c.d_row_m + rng.gen_range(2.0..5.0_f64).round();
        }
    }

    let world = build_layers(&s, None).ok()?;
    let free: Vec<Vertex> = world
        .vertices()
        .filter(|&v| world.is_traversable(v) && world.in_corridor(v))
        .collect();
    if free.len() < 2 {
        return None;
    }
    let a = *free.choose(&mut rng).unwrap();
    let b = *free.choose(&mut rng).unwrap();
    if a == b || a.dist(b) < 2.0 {
        return None;
    }
    s.start = a;
    s.goal = b;
    s.validate().ok()?;
    Some(s.normalized())
}

/// Kind of obstacle-and-hole layout for the brute-force comparison suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    /// Two or three coverage holes of about 30 cells, no obstacles.
    Holes,
    /// One to three rectangular obstacles, full coverage.
    Obstacles,
}

/// `count` 40x40 instances with the holes or obstacles placed across the
/// straight start-goal line.
pub fn comparison_suite(kind: SuiteKind, seed: u64, count: usize) -> Vec<ScenarioConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let sub = rng.gen::<u64>();
        if let Some(mut s) = comparison_scenario(kind, sub) {
            s.id = Some(format!("{}-{:03}", if kind == SuiteKind::Holes { "holes" } else { "obstacles" }, out.len()));
            out.push(s);
        }
    }
    out
}

fn comparison_scenario(kind: SuiteKind, seed: u64) -> Option<ScenarioConfig> {
    const SIDE: i32 = 40;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Vertex::new(2, rng.gen_range(8..=SIDE - 8));
    let goal = Vertex::new(SIDE - 2, rng.gen_range(8..=SIDE - 8));
    let mut s = ScenarioConfig::new(SIDE as u32, SIDE as u32, 1.0, start, goal);
    s.seed = seed;
    s.constraints = ConstraintSet {
        l_min_m: 2.0,
        theta_bmax_deg: 45.0,
        ..ConstraintSet::default()
    };
    // centers spread along the start-goal line
    let along = |t: f64| -> (i32, i32) {
        let x = start.x as f64 + t * (goal.x - start.x) as f64;
        let y = start.y as f64 + t * (goal.y - start.y) as f64;
        (x.round() as i32, y.round() as i32)
    };
    let n = match kind {
        SuiteKind::Holes => rng.gen_range(2..=3),
        SuiteKind::Obstacles => rng.gen_range(1..=3),
    };
    for i in 0..n {
        let t = (i as f64 + rng.gen_range(0.3..0.7)) / n as f64;
        let (cx, cy) = along(t);
        let (rw, rh) = match kind {
            SuiteKind::Holes => (rng.gen_range(4..=7), rng.gen_range(4..=7)),
            SuiteKind::Obstacles => (rng.gen_range(2..=4), rng.gen_range(4..=10)),
        };
        let (x0, y0) = (cx - rw / 2 + rng.gen_range(-1..=1), cy - rh / 2 + rng.gen_range(-1..=1));
        match kind {
            SuiteKind::Holes => {
                for y in y0..y0 + rh {
                    for x in x0..x0 + rw {
                        s.coverage.uncovered_cells.push(Cell::new(x, y));
                    }
                }
            }
            SuiteKind::Obstacles => s.obstacles.rects.push(CellRect { x: x0, y: y0, w: rw, h: rh }),
        }
    }
    if kind == SuiteKind::Obstacles {
        // tight enough that the taut path around a block fails
        s.constraints.theta_bmax_deg = 30.0;
        s.constraints.l_min_m = 4.0;
    }
    if kind == SuiteKind::Holes {
        // a hole has to be crossed near a corner or avoided
        s.constraints.d_zero_m = 3.0;
        s.coverage.uncovered_cells.sort_by_key(|c| (c.y, c.x));
        s.coverage.uncovered_cells.dedup();
    }
    let s = s.normalized();
    let world = build_world(&s).ok()?;
    if kind == SuiteKind::Holes && find_holes(&world).len() < 2 {
        return None;
    }
    Some(s)
}
