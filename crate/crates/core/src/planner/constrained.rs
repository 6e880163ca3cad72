//! Theta* with flight constraints.
//!
//! Nodes are (vertex, anchor) pairs rather than plain vertices: the anchor
//! is the turning point the incoming leg starts from, and the anchor's own
//! parent is needed to check the turn a Path 2 shortcut would make there.
//! Two nodes compete only when vertex, anchor and anchor's parent agree; one
//! dominates the other when it is no longer and carries no more in-hole
//! length into the anchor.

use std::collections::HashMap;

use crate::constraints::{check_leg, check_turn, validate_path, ConstraintSet, HoleTrail, LENGTH_EPS_M};
use crate::geometry::{gcd, is_straight, Vertex};
use crate::grid::{GridWorld, HoleIndex};

use super::open_list::{OpenEntry, OpenList};
use super::theta::{run_theta, theta_star, NoBlocks, ThetaOptions};
use super::{NoPath, PlanOutcome, PlannedPath, SearchNode};

const DOMINANCE_EPS: f64 = 1e-9;

/// Expansion budget of each pass.
pub const PASS_BUDGET: u64 = 250_000;
/// A first-pass path longer than this multiple of the unconstrained
/// Theta* cost triggers the refinement pass.
pub const REFINE_RATIO: f64 = 1.05;

/// Shortest any-angle path obeying every constraint in `cs`, or `NoPath`
/// when none exists or both passes ran out of budget.
///
/// An unconstrained Theta* path that already satisfies `cs` is returned
/// as is. Otherwise the first pass shortcuts greedily and only turns at a vertex after a
/// failure further on. When it fails, or its path is clearly longer than
/// the unconstrained one, a second pass that also turns at every vertex
/// runs and the better result is kept. Each pass stops after
/// [`PASS_BUDGET`] expansions.
pub fn constrained_theta_star(
    world: &GridWorld,
    holes: &HoleIndex,
    cs: &ConstraintSet,
    start: Vertex,
    goal: Vertex,
) -> PlanOutcome {
    let free = theta_star(world, start, goal);
    if cs.is_trivial() && !world.has_corridor() {
        return free;
    }
    let Some(free_path) = free.path() else {
        // constraints only remove paths
        return free;
    };
    let free_cost = free_path.cost_m;
    if validate_path(&free_path.turning_points, world, holes, cs).is_ok_and(|r| r.pass) {
        return free;
    }
    if world.has_corridor() {
        let opts = ThetaOptions { respect_corridor: true };
        let run = run_theta(world, start, goal, opts, &NoBlocks);
        if run.path.is_none() {
            // start and goal lie in disconnected parts of the band
            return PlanOutcome::NoPath(NoPath {
                expansions: run.pops.len() as u64,
                visited_trace: run.pops,
                ..NoPath::default()
            });
        }
    }
    let mut lazy = Engine::new(world, holes, cs, goal, Branching::Lazy, PASS_BUDGET);
    let first = lazy.plan(start);
    if let Some(PlanOutcome::Found(p)) = &first {
        if p.cost_m <= REFINE_RATIO * free_cost {
            return first.unwrap();
        }
    }
    let mut full = Engine::new(world, holes, cs, goal, Branching::Full, PASS_BUDGET);
    let second = full.plan(start);
    let exhausted = first.is_none() && second.is_none();
    let mut best = match (first, second) {
        (Some(PlanOutcome::Found(a)), Some(PlanOutcome::Found(b))) if b.cost_m < a.cost_m => PlanOutcome::Found(b),
        (Some(a @ PlanOutcome::Found(_)), _) => a,
        (_, Some(b)) => b,
        (Some(a), None) => a,
        (None, None) => PlanOutcome::NoPath(NoPath {
            budget_exhausted: true,
            ..NoPath::default()
        }),
    };
    if let PlanOutcome::NoPath(n) = &mut best {
        n.budget_exhausted |= exhausted;
    }
    best.set_work(lazy.expansions + full.expansions, lazy.backtracks + full.backtracks);
    best
}

/// Which Path 1 successors a search generates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(super) enum Branching {
    /// Only where the shortcut fails, or after a failure further on.
    Lazy,
    /// Everywhere.
    Full,
}

type StateKey = u128;

fn pack(v: Option<Vertex>) -> u128 {
    match v {
        Some(v) => (v.x as u32 as u128) << 16 | (v.y as u32 as u128 & 0xFFFF),
        None => 0xFFFF_FFFF,
    }
}

/// `b - a` reduced to its primitive lattice direction.
fn direction(a: Vertex, b: Vertex) -> Vertex {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let g = gcd(dx.unsigned_abs(), dy.unsigned_abs()).max(1) as i32;
    Vertex::new(dx / g, dy / g)
}

/// Pareto front of (g, hole accumulation) pairs.
#[derive(Debug, Default)]
pub(super) struct Front(Vec<(f64, f64)>);

impl Front {
    fn dominates(&self, g: f64, acc: f64) -> bool {
        self.0
            .iter()
            .any(|&(fg, fa)| fg <= g + DOMINANCE_EPS && fa <= acc + DOMINANCE_EPS)
    }

    /// Inserts unless dominated; returns whether it was inserted.
    fn insert(&mut self, g: f64, acc: f64) -> bool {
        if self.dominates(g, acc) {
            return false;
        }
        self.0.retain(|&(fg, fa)| !(g <= fg && acc <= fa));
        self.0.push((g, acc));
        true
    }
}

pub(super) struct Engine<'a> {
    pub(super) world: &'a GridWorld,
    pub(super) holes: &'a HoleIndex,
    pub(super) cs: &'a ConstraintSet,
    pub(super) goal: Vertex,
    branching: Branching,
    budget: u64,
    corridor: bool,
    pub(super) storage: bool,
    /// Storage bound in cell units, with the validator's tolerance halved.
    d_zero: f64,
    pub(super) nodes: Vec<SearchNode>,
    /// Nodes generated by a hole exploration.
    pub(super) inner: Vec<bool>,
    /// Nodes whose Path 1 successors were generated on top of their shortcuts.
    turned: Vec<bool>,
    generated: HashMap<StateKey, Front>,
    closed: HashMap<StateKey, Front>,
    /// Abandoned edges keyed by (state reached, vertex it was reached from).
    blocked: HashMap<(StateKey, u128), Front>,
    pub(super) expansions: u64,
    pub(super) backtracks: u64,
    pub(super) trace: Vec<Vertex>,
}

impl<'a> Engine<'a> {
    pub(super) fn new(world: &'a GridWorld, holes: &'a HoleIndex, cs: &'a ConstraintSet, goal: Vertex, branching: Branching, budget: u64) -> Self {
        let storage = cs.storage_active() && !holes.is_empty();
        Engine {
            world,
            holes,
            cs,
            goal,
            branching,
            budget,
            corridor: world.has_corridor(),
            storage,
            d_zero: (cs.d_zero_m + 0.5 * LENGTH_EPS_M) / world.cell_size_m(),
            nodes: Vec::new(),
            inner: Vec::new(),
            turned: Vec::new(),
            generated: HashMap::new(),
            closed: HashMap::new(),
            blocked: HashMap::new(),
            expansions: 0,
            backtracks: 0,
            trace: Vec::new(),
        }
    }

    /// `None` when the budget ran out.
    fn plan(&mut self, start: Vertex) -> Option<PlanOutcome> {
        let mut open = OpenList::new();
        let root = self.root(start);
        self.push(&mut open, root);
        while let Some(e) = open.pop() {
            if self.over_budget() {
                return None;
            }
            let id = e.item;
            if !self.close(id) {
                continue;
            }
            let v = self.nodes[id].vertex;
            self.trace.push(v);
            if v == self.goal {
                if self.goal_ok(id) {
                    return Some(PlanOutcome::Found(self.extract(id)));
                }
                self.backtracks += 1;
                self.retreat(self.nodes[id].via, None, &mut open);
                continue;
            }
            self.expansions += 1;
            if self.storage && !self.inner[id] {
                if let Some(h) = self.holes.hole_at(v) {
                    self.explore(h, id, &mut open);
                    continue;
                }
            }
            let kids = self.expand(id);
            if kids.is_empty() {
                self.dead_end(id);
                self.retreat(self.nodes[id].via, None, &mut open);
                continue;
            }
            for k in kids {
                self.offer(k, &mut open, false);
            }
        }
        Some(PlanOutcome::NoPath(NoPath {
            expansions: self.expansions,
            backtracks: self.backtracks,
            visited_trace: std::mem::take(&mut self.trace),
            budget_exhausted: false,
        }))
    }

    pub(super) fn over_budget(&self) -> bool {
        self.expansions > self.budget
    }

    pub(super) fn root(&mut self, start: Vertex) -> SearchNode {
        SearchNode {
            vertex: start,
            g: 0.0,
            h: start.dist(self.goal),
            parent: None,
            via: None,
            trail: HoleTrail::NONE,
            forced_parent: false,
        }
    }

    pub(super) fn parent_vertex(&self, id: usize) -> Option<Vertex> {
        self.nodes[id].parent.map(|p| self.nodes[p].vertex)
    }

    /// The anchor's parent matters only through the turn at the anchor,
    /// which depends on the incoming direction alone.
    fn key(&self, n: &SearchNode) -> StateKey {
        let (p, heading) = match n.parent {
            Some(a) => {
                let p = self.nodes[a].vertex;
                let heading = self
                    .parent_vertex(a)
                    .filter(|_| self.cs.turns_active())
                    .map(|gp| direction(gp, p));
                (Some(p), heading)
            }
            None => (None, None),
        };
        pack(Some(n.vertex)) << 64 | pack(p) << 32 | pack(heading)
    }

    /// Hole accumulation carried into the node's anchor, the only part of
    /// the hole state that is not fixed by the key.
    fn anchor_acc(&self, n: &SearchNode) -> f64 {
        n.parent.map_or(0.0, |p| self.nodes[p].hole_acc())
    }

    /// Adds a generated node unless an equal-or-better one exists or its
    /// edge was abandoned. Returns the new id.
    pub(super) fn push(&mut self, open: &mut OpenList, n: SearchNode) -> Option<usize> {
        self.offer(n, open, false)
    }

    pub(super) fn offer(&mut self, n: SearchNode, open: &mut OpenList, inner: bool) -> Option<usize> {
        let key = self.key(&n);
        let acc = self.anchor_acc(&n);
        if let Some(via) = n.via {
            let from = pack(Some(self.nodes[via].vertex));
            if self.blocked.get(&(key, from)).is_some_and(|f| f.dominates(n.g, acc)) {
                return None;
            }
        }
        if !self.generated.entry(key).or_default().insert(n.g, acc) {
            return None;
        }
        let id = self.nodes.len();
        open.push(OpenEntry {
            f: n.f(),
            g: n.g,
            vertex: n.vertex,
            item: id,
        });
        self.nodes.push(n);
        self.inner.push(inner);
        self.turned.push(false);
        Some(id)
    }

    /// Marks a popped node closed; false if an equal-or-better node with
    /// the same key was already expanded.
    pub(super) fn close(&mut self, id: usize) -> bool {
        let n = &self.nodes[id];
        let (key, acc, g) = (self.key(n), self.anchor_acc(n), n.g);
        self.closed.entry(key).or_default().insert(g, acc)
    }

    pub(super) fn goal_ok(&self, id: usize) -> bool {
        match self.parent_vertex(id) {
            Some(p) => check_leg(p, self.goal, self.cs, self.world.cell_size_m()),
            None => true,
        }
    }

    /// Abandons `id`: its incoming edge, in its full search context, is
    /// never generated again.
    pub(super) fn block(&mut self, id: usize) {
        let n = &self.nodes[id];
        let Some(via) = n.via else { return };
        let key = (self.key(n), pack(Some(self.nodes[via].vertex)));
        let (g, acc) = (n.g, self.anchor_acc(n));
        self.blocked.entry(key).or_default().insert(g, acc);
    }

    /// Dead end outside a hole: step back to the neighbor the node came
    /// through. The open list already holds that neighbor's other
    /// successors, so stepping back amounts to abandoning the edge.
    fn dead_end(&mut self, id: usize) {
        self.backtracks += 1;
        self.block(id);
    }

    /// Path 1 successors of `id` for the neighbors its shortcuts reached.
    /// A shortcut that succeeded at `id` may have doomed a later turn or
    /// leg; turning here instead is the alternative.
    fn turn(&mut self, id: usize) -> Vec<SearchNode> {
        self.turned[id] = true;
        let v = self.nodes[id].vertex;
        let mut out = Vec::new();
        for n in v.neighbors8() {
            if !self.world.in_bounds(n) || !self.world.line_of_sight(v, n) {
                continue;
            }
            if self.corridor && !self.world.in_corridor(n) {
                continue;
            }
            if self.path2(id, n).is_some() {
                out.extend(self.path1(id, n));
            }
        }
        out
    }

    /// After a failure below `from`, turns the nearest node on the chain
    /// `from`, via(`from`), ... that has not turned yet and yields new
    /// successors. Successors inside the hole being explored go to its
    /// open list, the rest to `sink`.
    pub(super) fn retreat(&mut self, from: Option<usize>, mut hole: Option<(usize, &mut OpenList)>, sink: &mut OpenList) {
        let mut cur = from;
        while let Some(x) = cur {
            if !self.turned[x] {
                let mut any = false;
                for k in self.turn(x) {
                    let offered = match hole.as_mut() {
                        Some((h, open)) if k.vertex != self.goal && self.holes.hole_at(k.vertex) == Some(*h) => {
                            self.offer(k, open, true)
                        }
                        _ => self.offer(k, sink, false),
                    };
                    any |= offered.is_some();
                }
                if any {
                    return;
                }
            }
            cur = self.nodes[x].via;
        }
    }

    /// Feasible successors of `id`.
    pub(super) fn expand(&self, id: usize) -> Vec<SearchNode> {
        let v = self.nodes[id].vertex;
        let mut out = Vec::new();
        for n in v.neighbors8() {
            if !self.world.in_bounds(n) || !self.world.line_of_sight(v, n) {
                continue;
            }
            if self.corridor && !self.world.in_corridor(n) {
                continue;
            }
            let p2 = self.path2(id, n);
            if p2.is_none() || self.branching != Branching::Lazy {
                out.extend(self.path1(id, n));
            }
            out.extend(p2);
        }
        out
    }

    pub(super) fn extend_trail(&self, trail: HoleTrail, a: Vertex, b: Vertex) -> Option<HoleTrail> {
        if !self.storage {
            return Some(HoleTrail::NONE);
        }
        trail.extend(a, b, self.holes, self.d_zero).ok()
    }

    fn make(&self, anchor: usize, via: usize, n: Vertex, trail: HoleTrail) -> SearchNode {
        let a = &self.nodes[anchor];
        SearchNode {
            vertex: n,
            g: a.g + a.vertex.dist(n),
            h: n.dist(self.goal),
            parent: Some(anchor),
            via: Some(via),
            trail,
            forced_parent: trail.hole != a.trail.hole,
        }
    }

    /// Shortcut from the anchor of `id` straight to `n`.
    fn path2(&self, id: usize, n: Vertex) -> Option<SearchNode> {
        let anchor = self.nodes[id].parent?;
        let p = self.nodes[anchor].vertex;
        if p == n || !self.world.line_of_sight(p, n) {
            return None;
        }
        if self.corridor && !self.world.leg_in_corridor(p, n) {
            return None;
        }
        if let Some(gp) = self.parent_vertex(anchor) {
            if self.world.squeezes_through(gp, p, n) {
                return None;
            }
            if self.cs.turns_active() && !check_turn(gp, p, n, self.cs) {
                return None;
            }
        }
        let trail = self.extend_trail(self.nodes[anchor].trail, p, n)?;
        Some(self.make(anchor, id, n, trail))
    }

    /// Turns at the vertex of `id` toward `n`.
    fn path1(&self, id: usize, n: Vertex) -> Option<SearchNode> {
        let x = &self.nodes[id];
        let v = x.vertex;
        if let Some(p) = self.parent_vertex(id) {
            if is_straight(p, v, n) {
                // identical to the shortcut that just failed
                return None;
            }
            if self.cs.turns_active() && !check_turn(p, v, n, self.cs) {
                return None;
            }
            if !check_leg(p, v, self.cs, self.world.cell_size_m()) {
                return None;
            }
        }
        if self.corridor && !self.world.leg_in_corridor(v, n) {
            return None;
        }
        let trail = self.extend_trail(x.trail, v, n)?;
        Some(self.make(id, id, n, trail))
    }

    pub(super) fn extract(&mut self, id: usize) -> PlannedPath {
        let mut pts = vec![self.nodes[id].vertex];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            pts.push(self.nodes[p].vertex);
            cur = p;
        }
        pts.reverse();
        let mut path = PlannedPath::new(pts, self.world.cell_size_m());
        path.expansions = self.expansions;
        path.backtracks = self.backtracks;
        path.visited_trace = std::mem::take(&mut self.trace);
        path
    }
}
