//! Exhaustive optimum over vertex turning-point sequences, for small grids.

use std::collections::HashMap;

use crate::constraints::{check_leg, check_turn, validate_path, ConstraintSet, HoleTrail, LENGTH_EPS_M};
use crate::error::{Error, Result};
use crate::geometry::{is_straight, Vertex};
use crate::grid::{GridWorld, HoleIndex};
use crate::planner::{NoPath, OpenEntry, OpenList, PlanOutcome, PlannedPath};

pub const DEFAULT_MAX_TURNS: usize = 12;
pub const MAX_SIDE: i32 = 10;
const EXPANSION_CAP: u64 = 20_000_000;

/// Minimum-cost path whose turning points are grid vertices, found by
/// best-first branch and bound over labelled states (vertex, previous
/// turning point, in-hole length, turns so far). Sequences with more than
/// `max_turns` interior turning points are not explored; if one of them
/// could have beaten the answer the search fails with
/// `OracleBoundExceeded` rather than answer wrongly.
pub fn exhaustive_optimum(
    world: &GridWorld,
    holes: &HoleIndex,
    cs: &ConstraintSet,
    start: Vertex,
    goal: Vertex,
    max_turns: usize,
) -> Result<PlanOutcome> {
    if world.width() > MAX_SIDE || world.height() > MAX_SIDE {
        return Err(Error::OracleBoundExceeded(format!(
            "grid {}x{} is larger than {MAX_SIDE}x{MAX_SIDE}",
            world.width(),
            world.height()
        )));
    }
    let cell = world.cell_size_m();
    let storage = cs.storage_active() && !holes.is_empty();
    let limit = (cs.d_zero_m + 2.0 * LENGTH_EPS_M) / cell;
    let mut visible: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
    let mut fronts: HashMap<(Vertex, Option<Vertex>), Vec<(f64, f64, usize)>> = HashMap::new();
    let mut labels: Vec<Label> = vec![Label {
        vertex: start,
        prev: None,
        g: 0.0,
        trail: HoleTrail::NONE,
        turns: 0,
    }];
    let mut open = OpenList::new();
    open.push(OpenEntry {
        f: start.dist(goal),
        g: 0.0,
        vertex: start,
        item: 0,
    });
    // smallest f among labels dropped for exceeding the turn limit
    let mut cut = f64::INFINITY;
    let mut expansions = 0u64;

    while let Some(e) = open.pop() {
        if e.f >= cut - 1e-9 {
            break;
        }
        let id = e.item;
        let l = labels[id].clone();
        let prev = l.prev.map(|p| labels[p].vertex);
        let acc = if l.trail.hole.is_some() { l.trail.acc } else { 0.0 };
        if !insert_front(fronts.entry((l.vertex, prev)).or_default(), l.g, acc, l.turns) {
            continue;
        }
        if l.vertex == goal {
            let pts = trace(&labels, id);
            if validate_path(&pts, world, holes, cs)?.pass {
                let mut p = PlannedPath::new(pts, cell);
                p.expansions = expansions;
                return Ok(PlanOutcome::Found(p));
            }
            continue;
        }
        expansions += 1;
        if expansions > EXPANSION_CAP {
            return Err(Error::OracleBoundExceeded(format!("more than {EXPANSION_CAP} expansions")));
        }
        if let Some(p) = prev {
            // the leg into this vertex is complete once it becomes a turn
            if !check_leg(p, l.vertex, cs, cell) {
                continue;
            }
        }
        let turns = if prev.is_some() { l.turns + 1 } else { 0 };
        let cands = visible.entry(l.vertex).or_insert_with(|| visible_from(world, l.vertex)).clone();
        for w in cands {
            if let Some(p) = prev {
                if is_straight(p, l.vertex, w) || !check_turn(p, l.vertex, w, cs) {
                    continue;
                }
            }
            if w == goal && !check_leg(l.vertex, w, cs, cell) {
                continue;
            }
            let trail = if storage {
                match l.trail.extend(l.vertex, w, holes, limit) {
                    Ok(t) => t,
                    Err(_) => continue,
                }
            } else {
                HoleTrail::NONE
            };
            let g = l.g + l.vertex.dist(w);
            let f = g + w.dist(goal);
            if turns > max_turns && w != goal {
                cut = cut.min(f);
                continue;
            }
            labels.push(Label {
                vertex: w,
                prev: Some(id),
                g,
                trail,
                turns,
            });
            open.push(OpenEntry {
                f,
                g,
                vertex: w,
                item: labels.len() - 1,
            });
        }
    }
    if cut.is_finite() {
        return Err(Error::OracleBoundExceeded(format!(
            "a path with more than {max_turns} turning points may be needed"
        )));
    }
    Ok(PlanOutcome::NoPath(NoPath {
        expansions,
        ..NoPath::default()
    }))
}

#[derive(Debug, Clone)]
struct Label {
    vertex: Vertex,
    prev: Option<usize>,
    g: f64,
    trail: HoleTrail,
    /// Interior turning points before this vertex.
    turns: usize,
}

fn trace(labels: &[Label], mut id: usize) -> Vec<Vertex> {
    let mut pts = vec![labels[id].vertex];
    while let Some(p) = labels[id].prev {
        pts.push(labels[p].vertex);
        id = p;
    }
    pts.reverse();
    pts
}

/// Vertices reachable from `v` by one in-corridor leg.
fn visible_from(world: &GridWorld, v: Vertex) -> Vec<Vertex> {
    world
        .vertices()
        .filter(|&u| u != v && world.line_of_sight(v, u))
        .filter(|&u| !world.has_corridor() || (world.in_corridor(u) && world.leg_in_corridor(v, u)))
        .collect()
}

fn insert_front(front: &mut Vec<(f64, f64, usize)>, g: f64, acc: f64, turns: usize) -> bool {
    if front
        .iter()
        .any(|&(fg, fa, ft)| fg <= g + 1e-12 && fa <= acc + 1e-12 && ft <= turns)
    {
        return false;
    }
    front.retain(|&(fg, fa, ft)| !(g <= fg && acc <= fa && turns <= ft));
    front.push((g, acc, turns));
    true
}
