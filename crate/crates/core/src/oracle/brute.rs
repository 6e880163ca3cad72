//! Iterative brute-force planning: plain Theta* repaired constraint by
//! constraint.
//!
//! Each iteration validates one candidate path in the order storage, turn
//! angle, leg length and reacts to the first failure. A storage failure
//! blocks the offending leg and replans; a turn or leg failure first tries
//! to swap the failing turning point for one of its eight neighbors and
//! otherwise blocks the leg leading into it. Blocked segments and vertices
//! accumulate, so no candidate can come back.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::constraints::{validate_path, ConstraintReport, ConstraintSet};
use crate::error::{Error, Result};
use crate::geometry::{gcd, Vertex};
use crate::grid::{GridWorld, HoleIndex};
use crate::planner::{merge_straight, run_theta, NoPath, PlanOutcome, PlannedPath, SearchBlocks, ThetaOptions};

pub const DEFAULT_ITERATION_CAP: usize = 10_000;

/// Vertices and segments excluded from later Theta* runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BlockList {
    pub vertices: BTreeSet<Vertex>,
    /// Unordered pairs, stored smaller vertex first.
    pub segments: BTreeSet<(Vertex, Vertex)>,
}

impl BlockList {
    fn ordered(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
        if (a.y, a.x) <= (b.y, b.x) {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Returns whether the segment was new.
    pub fn block_segment(&mut self, a: Vertex, b: Vertex) -> bool {
        self.segments.insert(Self::ordered(a, b))
    }

    pub fn block_vertex(&mut self, v: Vertex) -> bool {
        self.vertices.insert(v)
    }

    pub fn len(&self) -> usize {
        self.vertices.len() + self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn uses_blocked(&self, path: &[Vertex]) -> bool {
        path.windows(2).any(|w| self.segment_blocked(w[0], w[1]))
            || path[1..path.len() - 1].iter().any(|v| self.vertices.contains(v))
    }
}

impl SearchBlocks for BlockList {
    fn vertex_blocked(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    fn segment_blocked(&self, a: Vertex, b: Vertex) -> bool {
        self.segments.contains(&Self::ordered(a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailedConstraint {
    Storage,
    TurnAngle,
    LegLength,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepairAction {
    /// The candidate satisfied every constraint.
    Accept,
    /// Storage failed on the leg that entered the hole: block that leg and
    /// the entry's first step along it, then replan from the entry.
    BlockToEntry { entry: Vertex, segment: (Vertex, Vertex) },
    /// Storage failed after a turn inside the hole: block the failing leg
    /// and the vertices on it, then replan from the previous turn.
    RescindToTurn { turn: Vertex, segment: (Vertex, Vertex) },
    /// A neighbor of the failing turn `t2` replaced it.
    Repair { t2: Vertex, replacement: Vertex },
    /// No neighbor of `t2` worked: block the leg from `t1` and replan.
    BlockLocal { t1: Vertex, t2: Vertex },
    /// Theta* found nothing under the current blocks.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationEntry {
    pub iteration: usize,
    pub candidate: Vec<Vertex>,
    pub failed: Option<FailedConstraint>,
    /// Turning point where the failure was located.
    pub at: Option<Vertex>,
    pub action: RepairAction,
}

pub type IterationLog = Vec<IterationEntry>;

#[derive(Debug, Clone)]
pub struct BruteForceRun {
    pub outcome: PlanOutcome,
    pub log: IterationLog,
    pub blocks: BlockList,
}

impl BruteForceRun {
    pub fn iterations(&self) -> usize {
        self.log.len()
    }
}

/// Brute-force planning with the default iteration cap.
pub fn brute_force_plan(
    world: &GridWorld,
    holes: &HoleIndex,
    cs: &ConstraintSet,
    start: Vertex,
    goal: Vertex,
) -> Result<BruteForceRun> {
    brute_force_plan_capped(world, holes, cs, start, goal, DEFAULT_ITERATION_CAP)
}

pub fn brute_force_plan_capped(
    world: &GridWorld,
    holes: &HoleIndex,
    cs: &ConstraintSet,
    start: Vertex,
    goal: Vertex,
    cap: usize,
) -> Result<BruteForceRun> {
    let cell = world.cell_size_m();
    let opts = ThetaOptions { respect_corridor: true };
    let mut blocks = BlockList::default();
    let mut log = IterationLog::new();
    let mut seen: HashSet<Vec<Vertex>> = HashSet::new();
    let mut expansions = 0u64;
    let mut backtracks = 0u64;
    let mut candidate: Option<Vec<Vertex>> = None;

    // duplicate candidates are not logged, so the cap counts rounds
    for _ in 0..cap {
        let path = match candidate.take() {
            Some(p) => p,
            None => {
                let run = run_theta(world, start, goal, opts, &blocks);
                expansions += run.pops.len() as u64;
                match run.path {
                    Some(p) => merge_straight(p),
                    None => {
                        log.push(IterationEntry {
                            iteration: log.len(),
                            candidate: Vec::new(),
                            failed: None,
                            at: None,
                            action: RepairAction::Exhausted,
                        });
                        let outcome = PlanOutcome::NoPath(NoPath {
                            expansions,
                            backtracks,
                            ..NoPath::default()
                        });
                        return Ok(BruteForceRun { outcome, log, blocks });
                    }
                }
            }
        };
        let fresh = seen.insert(path.clone());
        let report = validate_path(&path, world, holes, cs)?;
        let (failed, k) = match first_failure(&report) {
            None => {
                log.push(IterationEntry {
                    iteration: log.len(),
                    candidate: path.clone(),
                    failed: None,
                    at: None,
                    action: RepairAction::Accept,
                });
                let mut p = PlannedPath::new(path, cell);
                p.expansions = expansions;
                p.backtracks = backtracks;
                return Ok(BruteForceRun {
                    outcome: PlanOutcome::Found(p),
                    log,
                    blocks,
                });
            }
            Some(f) => f,
        };

        let action = match failed {
            FailedConstraint::Storage => {
                backtracks += 1;
                let entry = report
                    .traversals
                    .iter()
                    .find(|t| t.failure_index == Some(k))
                    .map_or(k - 1, |t| t.entry_index);
                let (a, b) = (path[k - 1], path[k]);
                if !blocks.block_segment(a, b) {
                    // merged from unblocked pieces; cut the pieces instead
                    block_interior(&mut blocks, a, b);
                }
                if entry == k - 1 {
                    if let Some(step) = first_step(a, b).filter(|&s| s != goal && s != b) {
                        blocks.block_vertex(step);
                    }
                    RepairAction::BlockToEntry { entry: a, segment: (a, b) }
                } else {
                    block_interior(&mut blocks, a, b);
                    RepairAction::RescindToTurn { turn: a, segment: (a, b) }
                }
            }
            FailedConstraint::TurnAngle | FailedConstraint::LegLength => {
                // the turn to move: the failing one, or the last turn before
                // a short final leg
                let t2 = if k == path.len() - 1 { k - 1 } else { k };
                match (t2 > 0).then(|| repair(&path, t2, world, holes, cs, &blocks, &seen)).flatten() {
                    Some(fixed) => {
                        let action = RepairAction::Repair {
                            t2: path[t2],
                            replacement: fixed[t2],
                        };
                        candidate = Some(fixed);
                        action
                    }
                    None => {
                        backtracks += 1;
                        // a single short leg has no turn to move
                        let (a, b) = if t2 == 0 { (path[0], path[1]) } else { (path[t2 - 1], path[t2]) };
                        blocks.block_segment(a, b);
                        block_interior(&mut blocks, a, b);
                        RepairAction::BlockLocal { t1: a, t2: b }
                    }
                }
            }
        };
        if fresh {
            log.push(IterationEntry {
                iteration: log.len(),
                candidate: path.clone(),
                failed: Some(failed),
                at: Some(path[k]),
                action,
            });
        }
    }
    Err(Error::OracleExhausted { iterations: cap })
}

/// First failing constraint in priority order and the turning-point index
/// it points at. Corridor and obstacle failures cannot occur because every
/// candidate comes from a corridor-respecting Theta* or a checked repair.
fn first_failure(r: &ConstraintReport) -> Option<(FailedConstraint, usize)> {
    [
        (FailedConstraint::Storage, &r.storage),
        (FailedConstraint::TurnAngle, &r.turn_angle),
        (FailedConstraint::LegLength, &r.leg_length),
    ]
    .into_iter()
    .find_map(|(f, c)| c.first_violation.map(|i| (f, i.max(1))))
}

/// Replaces `path[t2]` with the first neighbor, walking the ring from the
/// side of `t1`, that keeps the path up to `t3` feasible.
fn repair(
    path: &[Vertex],
    t2: usize,
    world: &GridWorld,
    holes: &HoleIndex,
    cs: &ConstraintSet,
    blocks: &BlockList,
    seen: &HashSet<Vec<Vertex>>,
) -> Option<Vec<Vertex>> {
    let t1 = path[t2 - 1];
    let t3 = path[t2 + 1];
    let mut ring: Vec<Vertex> = path[t2]
        .neighbors8()
        .into_iter()
        .filter(|&m| world.in_bounds(m) && m != t1 && m != t3 && !blocks.vertex_blocked(m))
        .collect();
    ring.sort_by(|a, b| a.dist(t1).total_cmp(&b.dist(t1)).then((a.y, a.x).cmp(&(b.y, b.x))));
    for m in ring {
        let mut fixed = path.to_vec();
        fixed[t2] = m;
        let fixed = merge_straight(fixed);
        if fixed.windows(2).any(|w| w[0] == w[1]) || blocks.uses_blocked(&fixed) || seen.contains(&fixed) {
            continue;
        }
        // everything up to t3 must hold; what follows is checked next round
        let upto = fixed.iter().position(|&v| v == t3).unwrap_or(fixed.len() - 1);
        if upto == 0 {
            continue;
        }
        if validate_path(&fixed[..=upto], world, holes, cs).is_ok_and(|r| r.pass) {
            return Some(fixed);
        }
    }
    None
}

/// Grid neighbor of `a` closest in direction to `b`.
fn first_step(a: Vertex, b: Vertex) -> Option<Vertex> {
    let (dx, dy) = ((b.x - a.x) as f64, (b.y - a.y) as f64);
    a.neighbors8().into_iter().max_by(|p, q| {
        let cos = |n: &Vertex| {
            let (ux, uy) = ((n.x - a.x) as f64, (n.y - a.y) as f64);
            (ux * dx + uy * dy) / ux.hypot(uy)
        };
        cos(p).total_cmp(&cos(q))
    })
}

/// Blocks the lattice points strictly inside segment `a -> b`.
fn block_interior(blocks: &mut BlockList, a: Vertex, b: Vertex) {
    for v in lattice_interior(a, b) {
        blocks.block_vertex(v);
    }
}

fn lattice_interior(a: Vertex, b: Vertex) -> Vec<Vertex> {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let g = gcd(dx.unsigned_abs(), dy.unsigned_abs()) as i32;
    (1..g).map(|k| Vertex::new(a.x + dx / g * k, a.y + dy / g * k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Cell;
    use crate::grid::find_holes;

    fn v(x: i32, y: i32) -> Vertex {
        Vertex::new(x, y)
    }

    #[test]
    fn feasible_first_path_takes_one_iteration() {
        let w = GridWorld::new(8, 8, 1.0);
        let h = find_holes(&w);
        let run = brute_force_plan(&w, &h, &ConstraintSet::default(), v(0, 0), v(7, 3)).unwrap();
        assert_eq!(run.iterations(), 1);
        assert_eq!(run.log[0].action, RepairAction::Accept);
        assert!(run.outcome.path().is_some());
    }

    #[test]
    fn lattice_points_inside_a_segment() {
        assert_eq!(lattice_interior(v(0, 0), v(4, 2)), vec![v(2, 1)]);
        assert_eq!(lattice_interior(v(0, 0), v(3, 0)), vec![v(1, 0), v(2, 0)]);
        assert!(lattice_interior(v(0, 0), v(3, 2)).is_empty());
    }

    #[test]
    fn storage_failure_is_repaired() {
        // a hole band the straight line crosses on the diagonal but a
        // perpendicular crossing fits
        let mut w = GridWorld::new(10, 10, 1.0);
        w.cover_all();
        for x in 0..10 {
            for y in 4..6 {
                w.set_covered(Cell::new(x, y), false);
            }
        }
        let h = find_holes(&w);
        let cs = ConstraintSet {
            d_zero_m: 2.5,
            ..ConstraintSet::default()
        };
        let run = brute_force_plan(&w, &h, &cs, v(0, 0), v(9, 9)).unwrap();
        let p = run.outcome.path().unwrap();
        assert!(validate_path(&p.turning_points, &w, &h, &cs).unwrap().pass);
        assert!(run.iterations() > 1);
        assert_eq!(run.log[0].failed, Some(FailedConstraint::Storage));
    }
}
