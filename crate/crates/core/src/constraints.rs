//! The five route constraints and the path validator.
//!
//! The main planner, both reference planners and the validator share the
//! predicates in this module, so a path accepted during search is accepted
//! by [`validate_path`] and vice versa.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cell_pieces, is_straight, turn_angle_at, Cell, Segment, Vertex};
use crate::grid::{CoverageHole, GridWorld, HoleIndex};
use crate::io::num::{inf_as_null, ser_f64};

/// Absolute slack, in meters, applied at every constraint boundary.
pub const LENGTH_EPS_M: f64 = 1e-9;
/// Slack for turn-angle comparisons, in degrees.
pub const ANGLE_EPS_DEG: f64 = 1e-9;

fn default_theta() -> f64 {
    180.0
}

fn infinite() -> f64 {
    f64::INFINITY
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    /// Minimum straight leg length between turns.
    #[serde(default, serialize_with = "ser_f64")]
    pub l_min_m: f64,
    /// Maximum heading change at a turning point, inclusive.
    #[serde(default = "default_theta", serialize_with = "ser_f64")]
    pub theta_bmax_deg: f64,
    /// Minimum separation from the infrastructure (right of way).
    #[serde(default, serialize_with = "ser_f64")]
    pub d_row_m: f64,
    /// Maximum separation from the infrastructure (camera depth of field).
    #[serde(default = "infinite", with = "inf_as_null")]
    pub d_cfod_m: f64,
    /// Maximum path length inside one traversal of a coverage hole.
    #[serde(default = "infinite", with = "inf_as_null")]
    pub d_zero_m: f64,
}

impl Default for ConstraintSet {
    fn default() -> Self {
        ConstraintSet {
            l_min_m: 0.0,
            theta_bmax_deg: 180.0,
            d_row_m: 0.0,
            d_cfod_m: f64::INFINITY,
            d_zero_m: f64::INFINITY,
        }
    }
}

impl ConstraintSet {
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = [("l_min_m", self.l_min_m), ("d_row_m", self.d_row_m)];
        for (name, x) in finite_nonneg {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::InvalidConstraints(format!("{name} must be finite and >= 0")));
            }
        }
        for (name, x) in [("d_cfod_m", self.d_cfod_m), ("d_zero_m", self.d_zero_m)] {
            if x.is_nan() || x < 0.0 {
                return Err(Error::InvalidConstraints(format!("{name} must be >= 0")));
            }
        }
        if !(self.theta_bmax_deg > 0.0 && self.theta_bmax_deg <= 180.0) {
            return Err(Error::InvalidConstraints("theta_bmax_deg must lie in (0, 180]".into()));
        }
        if self.d_row_m >= self.d_cfod_m {
            return Err(Error::InvalidConstraints(format!(
                "d_row_m ({}) must be below d_cfod_m ({})",
                self.d_row_m, self.d_cfod_m
            )));
        }
        Ok(())
    }

    pub fn turns_active(&self) -> bool {
        self.theta_bmax_deg < 180.0
    }

    pub fn storage_active(&self) -> bool {
        self.d_zero_m.is_finite()
    }

    /// True when no constraint can reject a path (ignoring the corridor,
    /// which lives in the world).
    pub fn is_trivial(&self) -> bool {
        self.l_min_m == 0.0 && !self.turns_active() && !self.storage_active()
    }
}

/// Minimum leg length check, in meters.
pub fn check_leg(parent: Vertex, child: Vertex, cs: &ConstraintSet, cell_size_m: f64) -> bool {
    parent.dist(child) * cell_size_m >= cs.l_min_m - LENGTH_EPS_M
}

/// Turn check at `parent`; a straight continuation always passes.
pub fn check_turn(grand: Vertex, parent: Vertex, child: Vertex, cs: &ConstraintSet) -> bool {
    if is_straight(grand, parent, child) {
        return true;
    }
    turn_angle_at(grand, parent, child) <= cs.theta_bmax_deg + ANGLE_EPS_DEG
}

/// Adds the part of `leg` (cell units) lying in `hole` to `acc_m`.
pub fn accumulate_hole_length(acc_m: f64, leg: &Segment, hole: &CoverageHole, cell_size_m: f64) -> f64 {
    let inside: f64 = cell_pieces(leg.a, leg.b)
        .iter()
        .filter(|p| hole.cells.contains(&Cell::new(p.cell.x.max(0), p.cell.y.max(0))))
        .map(|p| p.length)
        .sum();
    acc_m + inside * cell_size_m
}

pub fn storage_violated(acc_m: f64, cs: &ConstraintSet) -> bool {
    acc_m > cs.d_zero_m + LENGTH_EPS_M
}

/// In-hole length of the traversal the path is currently inside, if any.
///
/// A traversal is a maximal stretch of path with positive length inside
/// one hole; leaving the hole for any positive length ends it, so a
/// re-entry starts a fresh accumulator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HoleTrail {
    pub hole: Option<usize>,
    /// Accumulated length in cell units.
    pub acc: f64,
}

impl HoleTrail {
    pub const NONE: HoleTrail = HoleTrail { hole: None, acc: 0.0 };

    /// Extends the trail along `a -> b`. Returns the in-hole length that
    /// first exceeds `limit` (cell units) if the leg breaks the bound.
    pub fn extend(self, a: Vertex, b: Vertex, holes: &HoleIndex, limit: f64) -> Result<HoleTrail, f64> {
        let mut trail = self;
        for piece in cell_pieces(a.to_point(), b.to_point()) {
            match holes.hole_of_piece(piece.cell) {
                Some(h) if trail.hole == Some(h) => trail.acc += piece.length,
                Some(h) => {
                    trail = HoleTrail {
                        hole: Some(h),
                        acc: piece.length,
                    }
                }
                None => trail = HoleTrail::NONE,
            }
            if trail.hole.is_some() && trail.acc > limit {
                return Err(trail.acc);
            }
        }
        Ok(trail)
    }
}

/// One contiguous pass of the path through a coverage hole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleTraversal {
    pub hole_id: usize,
    #[serde(serialize_with = "ser_f64")]
    pub length_m: f64,
    /// Index of the turning point that starts the leg where the traversal begins.
    pub entry_index: usize,
    /// Index of the turning point that ends the leg where the traversal ends.
    pub exit_index: usize,
    /// Index of the turning point ending the leg on which the bound was
    /// first exceeded.
    pub failure_index: Option<usize>,
}

/// Splits a path into hole traversals.
pub fn hole_traversals(path: &[Vertex], holes: &HoleIndex, cs: &ConstraintSet, cell_size_m: f64) -> Vec<HoleTraversal> {
    let mut out: Vec<HoleTraversal> = Vec::new();
    let mut open: Option<usize> = None;
    for (i, w) in path.windows(2).enumerate() {
        for piece in cell_pieces(w[0].to_point(), w[1].to_point()) {
            let hole = holes.hole_of_piece(piece.cell);
            match (hole, open) {
                (Some(h), Some(k)) if out[k].hole_id == h => {
                    out[k].length_m += piece.length * cell_size_m;
                    out[k].exit_index = i + 1;
                }
                (Some(h), _) => {
                    out.push(HoleTraversal {
                        hole_id: h,
                        length_m: piece.length * cell_size_m,
                        entry_index: i,
                        exit_index: i + 1,
                        failure_index: None,
                    });
                    open = Some(out.len() - 1);
                }
                (None, _) => open = None,
            }
            if let Some(k) = open {
                let t = &mut out[k];
                if t.failure_index.is_none() && storage_violated(t.length_m, cs) {
                    t.failure_index = Some(i + 1);
                }
            }
        }
    }
    out
}

/// Pass/fail summary for one constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    /// Index into the turning-point list of the first violation.
    pub first_violation: Option<usize>,
    /// Worst measured value (meaning depends on the constraint).
    #[serde(serialize_with = "ser_opt_f64")]
    pub worst: Option<f64>,
}

fn ser_opt_f64<S: serde::Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) if v.is_finite() => s.serialize_some(&crate::io::num::round9(*v)),
        _ => s.serialize_none(),
    }
}

impl Check {
    fn new(first_violation: Option<usize>, worst: Option<f64>) -> Self {
        Check {
            pass: first_violation.is_none(),
            first_violation,
            worst,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub pass: bool,
    /// Worst = shortest leg between turns (m).
    pub leg_length: Check,
    /// Worst = sharpest turn (deg).
    pub turn_angle: Check,
    /// Worst = number of corridor samples outside the band.
    pub corridor: Check,
    /// Worst = number of legs without line of sight.
    pub obstacle: Check,
    /// Worst = longest single hole traversal (m).
    pub storage: Check,
    pub traversals: Vec<HoleTraversal>,
}

impl ConstraintReport {
    /// Names of the failing constraints, in report order.
    pub fn failures(&self) -> Vec<&'static str> {
        [
            ("leg_length", &self.leg_length),
            ("turn_angle", &self.turn_angle),
            ("corridor", &self.corridor),
            ("obstacle", &self.obstacle),
            ("storage", &self.storage),
        ]
        .into_iter()
        .filter(|(_, c)| !c.pass)
        .map(|(n, _)| n)
        .collect()
    }
}

/// Indices of the real turning points: endpoints plus every interior
/// vertex that is not a straight continuation.
pub fn turn_indices(path: &[Vertex]) -> Vec<usize> {
    let mut idx = vec![0];
    for i in 1..path.len().saturating_sub(1) {
        if !is_straight(path[i - 1], path[i], path[i + 1]) {
            idx.push(i);
        }
    }
    if path.len() > 1 {
        idx.push(path.len() - 1);
    }
    idx
}

fn check_shape(path: &[Vertex]) -> Result<()> {
    if path.len() < 2 {
        return Err(Error::MalformedPath(format!("path has {} vertices, need at least 2", path.len())));
    }
    if let Some(i) = path.windows(2).position(|w| w[0] == w[1]) {
        return Err(Error::MalformedPath(format!("vertices {i} and {} coincide", i + 1)));
    }
    Ok(())
}

/// Full audit of a turning-point sequence against every constraint.
pub fn validate_path(path: &[Vertex], world: &GridWorld, holes: &HoleIndex, cs: &ConstraintSet) -> Result<ConstraintReport> {
    check_shape(path)?;
    let cell = world.cell_size_m();

    // legs between real turns; a leg ending anywhere is bounded below
    let turns = turn_indices(path);
    let mut leg_fail = None;
    let mut min_leg = f64::INFINITY;
    for w in turns.windows(2) {
        let len: f64 = path[w[0]..=w[1]].windows(2).map(|s| s[0].dist(s[1])).sum::<f64>() * cell;
        min_leg = min_leg.min(len);
        if leg_fail.is_none() && len < cs.l_min_m - LENGTH_EPS_M {
            leg_fail = Some(w[1]);
        }
    }

    let mut turn_fail = None;
    let mut max_turn: f64 = 0.0;
    for i in 1..path.len() - 1 {
        let t = turn_angle_at(path[i - 1], path[i], path[i + 1]);
        max_turn = max_turn.max(t);
        if turn_fail.is_none() && !check_turn(path[i - 1], path[i], path[i + 1], cs) {
            turn_fail = Some(i);
        }
    }

    let mut corridor_fail = None;
    let mut misses = 0usize;
    for (i, &v) in path.iter().enumerate() {
        if !world.in_corridor(v) {
            misses += 1;
            corridor_fail.get_or_insert(i);
        }
    }
    for (i, w) in path.windows(2).enumerate() {
        let m = world.leg_corridor_misses(w[0], w[1]);
        if m > 0 {
            misses += m;
            let at = if world.in_corridor(w[0]) { i + 1 } else { i };
            corridor_fail = Some(corridor_fail.map_or(at, |c: usize| c.min(at)));
        }
    }

    let mut obstacle_fail = None;
    let mut bad_legs = 0usize;
    for (i, &v) in path.iter().enumerate() {
        if !world.is_traversable(v) {
            obstacle_fail.get_or_insert(i);
        }
    }
    for (i, w) in path.windows(2).enumerate() {
        if !world.line_of_sight(w[0], w[1]) {
            bad_legs += 1;
            obstacle_fail = Some(obstacle_fail.map_or(i + 1, |o: usize| o.min(i + 1)));
        }
    }

    let traversals = hole_traversals(path, holes, cs, cell);
    let storage_fail = traversals.iter().filter_map(|t| t.failure_index).min();
    let worst_storage = traversals.iter().map(|t| t.length_m).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));

    let report = ConstraintReport {
        pass: false,
        leg_length: Check::new(leg_fail, Some(min_leg)),
        turn_angle: Check::new(turn_fail, Some(max_turn)),
        corridor: Check::new(corridor_fail, Some(misses as f64)),
        obstacle: Check::new(obstacle_fail, Some(bad_legs as f64)),
        storage: Check::new(storage_fail, worst_storage),
        traversals,
    };
    Ok(ConstraintReport {
        pass: report.failures().is_empty(),
        ..report
    })
}

/// Like [`validate_path`], but also requires the path to join `start` and `goal`.
pub fn validate_route(
    path: &[Vertex],
    start: Vertex,
    goal: Vertex,
    world: &GridWorld,
    holes: &HoleIndex,
    cs: &ConstraintSet,
) -> Result<ConstraintReport> {
    check_shape(path)?;
    if path[0] != start || path[path.len() - 1] != goal {
        return Err(Error::MalformedPath(format!(
            "path runs {} -> {}, expected {start} -> {goal}",
            path[0],
            path[path.len() - 1]
        )));
    }
    validate_path(path, world, holes, cs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Cell;
    use crate::grid::find_holes;

    fn v(x: i32, y: i32) -> Vertex {
        Vertex::new(x, y)
    }

    fn cs() -> ConstraintSet {
        ConstraintSet::default()
    }

    #[test]
    fn leg_examples() {
        let c = ConstraintSet { l_min_m: 1.5, ..cs() };
        assert!(check_leg(v(0, 0), v(2, 0), &c, 1.0));
        assert!(!check_leg(v(0, 0), v(1, 1), &c, 1.0));
        assert!(check_leg(v(0, 0), v(0, 0), &cs(), 1.0));
    }

    #[test]
    fn turn_examples() {
        let c45 = ConstraintSet { theta_bmax_deg: 45.0, ..cs() };
        assert!(check_turn(v(0, 0), v(1, 1), v(3, 3), &c45));
        assert!(!check_turn(v(0, 0), v(1, 0), v(1, 1), &c45));
        assert!(check_turn(v(0, 0), v(1, 0), v(2, 1), &c45));
    }

    #[test]
    fn constraint_set_validation() {
        assert!(cs().validate().is_ok());
        let bad = ConstraintSet {
            d_row_m: 50.0,
            d_cfod_m: 30.0,
            ..cs()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidConstraints(_))));
        assert!(ConstraintSet { theta_bmax_deg: 0.0, ..cs() }.validate().is_err());
        assert!(ConstraintSet { l_min_m: -1.0, ..cs() }.validate().is_err());
    }

    fn hole_world() -> (GridWorld, HoleIndex) {
        let mut w = GridWorld::new(6, 3, 1.0);
        w.cover_all();
        for x in 1..4 {
            w.set_covered(Cell::new(x, 1), false);
        }
        let h = find_holes(&w);
        (w, h)
    }

    #[test]
    fn accumulation_examples() {
        let (_, holes) = hole_world();
        let hole = holes.get(0);
        let outside = Segment::new(v(0, 0), v(6, 0));
        assert_eq!(accumulate_hole_length(0.4, &outside, hole, 1.0), 0.4);
        let across = Segment::new(Point::new(0.0, 1.5), Point::new(6.0, 1.5));
        let acc = accumulate_hole_length(0.0, &across, hole, 1.0);
        assert_eq!(acc, 3.0);
        let c = ConstraintSet { d_zero_m: 2.0, ..cs() };
        assert!(storage_violated(acc, &c));
    }

    use crate::geometry::Point;

    #[test]
    fn straight_path_passes() {
        let w = GridWorld::new(10, 10, 1.0);
        let h = find_holes(&w);
        let r = validate_path(&[v(0, 0), v(9, 9)], &w, &h, &cs()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn turn_failure_is_located() {
        let w = GridWorld::new(10, 10, 1.0);
        let h = find_holes(&w);
        let c = ConstraintSet { theta_bmax_deg: 30.0, ..cs() };
        let r = validate_path(&[v(0, 0), v(5, 0), v(5, 5)], &w, &h, &c).unwrap();
        assert!(!r.pass);
        assert_eq!(r.failures(), vec!["turn_angle"]);
        assert_eq!(r.turn_angle.first_violation, Some(1));
        assert_eq!(r.turn_angle.worst, Some(90.0));
    }

    #[test]
    fn storage_failure_reports_length() {
        let (w, h) = hole_world();
        let c = ConstraintSet { d_zero_m: 2.5, ..cs() };
        let r = validate_path(&[v(0, 1), v(1, 2), v(4, 2), v(5, 1)], &w, &h, &c).unwrap();
        // the middle leg runs along y = 2, attributed to the hole row below
        assert_eq!(r.failures(), vec!["storage"]);
        assert_eq!(r.traversals.len(), 1);
        assert_eq!(r.traversals[0].length_m, 3.0);
        assert_eq!(r.storage.first_violation, Some(2));
    }

    #[test]
    fn reentry_resets_accumulator() {
        let mut w = GridWorld::new(7, 3, 1.0);
        w.cover_all();
        for x in [1, 2, 4, 5] {
            w.set_covered(Cell::new(x, 1), false);
        }
        w.set_covered(Cell::new(3, 0), false);
        // (3,0) joins both halves of row 1 into a single hole
        let h = find_holes(&w);
        assert_eq!(h.len(), 1);
        let c = ConstraintSet { d_zero_m: 2.0, ..cs() };
        // y = 2 runs along row 1: hole, covered (3,1), hole again
        let r = validate_path(&[v(0, 2), v(7, 2)], &w, &h, &c).unwrap();
        assert_eq!(r.traversals.len(), 2);
        assert_eq!(r.traversals[0].length_m, 2.0);
        assert_eq!(r.traversals[1].length_m, 2.0);
        assert!(r.pass);
    }

    #[test]
    fn malformed_paths() {
        let w = GridWorld::new(4, 4, 1.0);
        let h = find_holes(&w);
        assert!(matches!(validate_path(&[v(0, 0)], &w, &h, &cs()), Err(Error::MalformedPath(_))));
        assert!(matches!(
            validate_path(&[v(0, 0), v(0, 0), v(1, 1)], &w, &h, &cs()),
            Err(Error::MalformedPath(_))
        ));
        assert!(validate_route(&[v(0, 0), v(1, 1)], v(0, 0), v(2, 2), &w, &h, &cs()).is_err());
    }

    #[test]
    fn collinear_runs_count_as_one_leg() {
        let w = GridWorld::new(10, 10, 1.0);
        let h = find_holes(&w);
        let c = ConstraintSet { l_min_m: 3.0, ..cs() };
        let r = validate_path(&[v(0, 0), v(1, 0), v(2, 0), v(3, 0), v(3, 4)], &w, &h, &c).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
