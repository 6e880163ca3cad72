//! Exploration of coverage holes.
//!
//! When the search first reaches a hole vertex it switches to an inner open
//! list restricted to that hole and exhausts it before anything outside is
//! expanded. Successors leaving the hole are collected and handed back to
//! the main open list afterwards. A dead end inside the hole rescinds the
//! search towards the entry by about as far as the dead end is from the
//! hole boundary.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::constraints::{ConstraintSet, HoleTrail};
use crate::error::{Error, Result};
use crate::geometry::Vertex;
use crate::grid::{GridWorld, HoleIndex};

use super::constrained::{Branching, Engine};
use super::open_list::{OpenEntry, OpenList, OpenSnapshot};
use super::SearchNode;

struct Inner {
    hole: usize,
    entry: usize,
    open: OpenList,
    snapshots: HashMap<usize, OpenSnapshot>,
    exits: Vec<usize>,
}

impl Engine<'_> {
    /// Exhausts hole `hole` from the already-closed node `entry`. Returns the
    /// exit nodes; successors outside the hole go to `sink`.
    pub(super) fn explore(&mut self, hole: usize, entry: usize, sink: &mut OpenList) -> Vec<usize> {
        let mut st = Inner {
            hole,
            entry,
            open: OpenList::new(),
            snapshots: HashMap::new(),
            exits: Vec::new(),
        };
        let mut alive = self.inner_step(&mut st, entry, sink);
        while alive && !self.over_budget() {
            let Some(e) = st.open.pop() else { break };
            if !self.close(e.item) {
                continue;
            }
            self.trace.push(e.vertex);
            self.expansions += 1;
            alive = self.inner_step(&mut st, e.item, sink);
        }
        st.exits
    }

    fn inner_step(&mut self, st: &mut Inner, id: usize, sink: &mut OpenList) -> bool {
        let n = &self.nodes[id];
        if id != st.entry && self.holes.is_boundary(st.hole, n.vertex) && n.trail.hole == Some(st.hole) {
            st.exits.push(id);
        }
        st.snapshots.insert(id, st.open.snapshot());
        let kids = self.expand(id);
        if kids.is_empty() {
            return self.backtrack_in_hole(st, id, sink);
        }
        for k in kids {
            if k.vertex != self.goal && self.holes.hole_at(k.vertex) == Some(st.hole) {
                self.offer(k, &mut st.open, true);
            } else {
                self.offer(k, sink, false);
            }
        }
        true
    }

    /// Handles a dead end at `current`. Returns false when the rescind
    /// reaches the entry with nothing left to try.
    fn backtrack_in_hole(&mut self, st: &mut Inner, current: usize, sink: &mut OpenList) -> bool {
        self.backtracks += 1;
        if current == st.entry {
            self.retreat(Some(current), Some((st.hole, &mut st.open)), sink);
            return !st.open.is_empty();
        }
        let mut chain = vec![current];
        let mut cur = current;
        while cur != st.entry {
            match self.nodes[cur].via {
                Some(v) => {
                    chain.push(v);
                    cur = v;
                }
                None => break,
            }
        }
        chain.reverse();
        let verts: Vec<Vertex> = chain.iter().map(|&i| self.nodes[i].vertex).collect();
        let target = rescind_index(&verts, &self.holes.get(st.hole).boundary_vertices);
        for &id in &chain[target + 1..] {
            self.block(id);
        }

        // restore the open list stored at the rescind point, keeping
        // whatever has been queued since so no alternative is lost
        let now: Vec<OpenEntry> = st.open.entries_at(st.open.snapshot());
        if let Some(&snap) = st.snapshots.get(&chain[target]) {
            st.open.restore(snap);
            let restored: HashSet<usize> = st.open.entries_at(st.open.snapshot()).iter().map(|e| e.item).collect();
            for e in now {
                if !restored.contains(&e.item) {
                    st.open.push(e);
                }
            }
        }
        // resume from the rescind point, now allowed to turn there
        self.retreat(Some(chain[target]), Some((st.hole, &mut st.open)), sink);
        !(chain[target] == st.entry && st.open.is_empty())
    }
}

/// Index into `chain` (entry first, dead end last) of the vertex to rescind
/// to: walk back from the dead end along the chain by its distance to the
/// nearest boundary vertex, then take the chain vertex closest to that
/// point, preferring later ones on ties. Never the dead end itself.
pub fn rescind_index(chain: &[Vertex], boundary: &BTreeSet<Vertex>) -> usize {
    let last = chain.len().saturating_sub(1);
    if last == 0 {
        return 0;
    }
    let cur = chain[last];
    let d = boundary
        .iter()
        .map(|&b| cur.dist(b))
        .fold(f64::INFINITY, f64::min);

    let mut left = if d.is_finite() { d } else { 0.0 };
    let mut point = chain[0].to_point();
    for i in (1..=last).rev() {
        let (b, a) = (chain[i], chain[i - 1]);
        let len = a.dist(b);
        if left <= len {
            point = b.to_point().lerp(a.to_point(), left / len);
            break;
        }
        left -= len;
    }

    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, v) in chain[..last].iter().enumerate() {
        let p = v.to_point();
        let dd = (p.x - point.x).hypot(p.y - point.y);
        if dd <= best_d + 1e-12 {
            best = i;
            best_d = dd.min(best_d);
        }
    }
    best
}

/// How the search arrived at a hole entry.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InheritedState {
    /// Anchor of the leg ending at the entry, if any.
    pub anchor: Option<Vertex>,
    /// The anchor's own parent.
    pub anchor_parent: Option<Vertex>,
    /// Path length up to the anchor, cell units.
    pub g_anchor: f64,
    pub anchor_trail: HoleTrail,
}

/// A standalone exploration of one hole from one entry vertex.
pub struct HoleSearch<'a> {
    engine: Engine<'a>,
    hole: usize,
    entry: Option<usize>,
}

impl<'a> HoleSearch<'a> {
    pub fn new(
        world: &'a GridWorld,
        holes: &'a HoleIndex,
        cs: &'a ConstraintSet,
        hole: usize,
        entry: Vertex,
        inherited: &InheritedState,
    ) -> Result<Self> {
        if !holes.is_boundary(hole, entry) {
            return Err(Error::InfeasibleEndpoints {
                vertex: entry,
                reason: "entry is not on the hole boundary".into(),
            });
        }
        // a goal that is never reached; it only feeds the heuristic
        let mut engine = Engine::new(world, holes, cs, Vertex::new(-1, -1), Branching::Full, u64::MAX);
        let mut sink = OpenList::new();
        let mut anchor = None;
        if let Some(p) = inherited.anchor {
            let mut gp_id = None;
            if let Some(gp) = inherited.anchor_parent {
                let root = engine.root(gp);
                gp_id = engine.push(&mut sink, root);
            }
            let node = SearchNode {
                vertex: p,
                g: inherited.g_anchor,
                h: 0.0,
                parent: gp_id,
                via: gp_id,
                trail: inherited.anchor_trail,
                forced_parent: false,
            };
            anchor = engine.push(&mut sink, node);
        }
        let entry_node = match anchor {
            Some(a) => {
                let an = &engine.nodes[a];
                engine.extend_trail(an.trail, an.vertex, entry).map(|trail| SearchNode {
                    vertex: entry,
                    g: an.g + an.vertex.dist(entry),
                    h: 0.0,
                    parent: Some(a),
                    via: Some(a),
                    trail,
                    forced_parent: true,
                })
            }
            None => Some(engine.root(entry)),
        };
        let entry = entry_node.and_then(|n| engine.push(&mut sink, n));
        Ok(HoleSearch { engine, hole, entry })
    }

    /// Runs the exploration and returns every exit node found.
    pub fn run(&mut self) -> Vec<SearchNode> {
        let Some(entry) = self.entry else { return Vec::new() };
        if !self.engine.close(entry) {
            return Vec::new();
        }
        let mut sink = OpenList::new();
        let exits = self.engine.explore(self.hole, entry, &mut sink);
        exits.into_iter().map(|i| self.engine.nodes[i].clone()).collect()
    }

    pub fn backtracks(&self) -> u64 {
        self.engine.backtracks
    }
}

/// Exit nodes reachable from `entry` through `hole` within the storage
/// bound. Empty when the hole cannot be crossed from this entry.
pub fn explore_hole(
    world: &GridWorld,
    holes: &HoleIndex,
    hole: usize,
    entry: Vertex,
    cs: &ConstraintSet,
    inherited: &InheritedState,
) -> Result<Vec<SearchNode>> {
    Ok(HoleSearch::new(world, holes, cs, hole, entry, inherited)?.run())
}
