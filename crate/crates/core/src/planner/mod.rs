//! Search algorithms: baseline Theta*, grid A* and the constrained planner.

mod astar;
mod constrained;
mod hole;
mod open_list;
mod theta;

use serde::{Deserialize, Serialize};

use crate::constraints::HoleTrail;
use crate::geometry::{is_straight, Vertex};
use crate::io::num::ser_f64;

pub use astar::grid_astar;
pub use constrained::constrained_theta_star;
pub use hole::{explore_hole, rescind_index, HoleSearch, InheritedState};
pub use open_list::{OpenEntry, OpenList, OpenSnapshot};
pub use theta::{run_theta, theta_star, NoBlocks, SearchBlocks, ThetaOptions, ThetaRun};


/// Search state of one node of the constrained planner.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchNode {
    pub vertex: Vertex,
    pub g: f64,
    pub h: f64,
    /// Anchor this node's incoming leg starts from.
    pub parent: Option<usize>,
    /// Node whose expansion generated this one.
    pub via: Option<usize>,
    /// Hole accounting at this vertex.
    pub trail: HoleTrail,
    /// Set when the parent was imposed by hole entry or exit rather than chosen by the shortcut rule.
    pub forced_parent: bool,
}

impl SearchNode {
    pub fn f(&self) -> f64 {
        self.g + self.h
    }

    /// In-hole length (cell units) of the traversal this node is in.
    pub fn hole_acc(&self) -> f64 {
        if self.trail.hole.is_some() {
            self.trail.acc
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedPath {
    pub turning_points: Vec<Vertex>,
    #[serde(serialize_with = "ser_f64")]
    pub cost_m: f64,
    pub visited_trace: Vec<Vertex>,
    pub expansions: u64,
    pub backtracks: u64,
}

impl PlannedPath {
    /// Builds a path from its turning points, merging straight collinear runs.
    pub fn new(points: Vec<Vertex>, cell_size_m: f64) -> Self {
        let turning_points = merge_straight(points);
        PlannedPath {
            cost_m: path_cost(&turning_points) * cell_size_m,
            turning_points,
            visited_trace: Vec::new(),
            expansions: 0,
            backtracks: 0,
        }
    }
}

/// Length of a vertex polyline in cell units.
pub fn path_cost(points: &[Vertex]) -> f64 {
    points.windows(2).map(|w| w[0].dist(w[1])).sum()
}

pub(crate) fn merge_straight(points: Vec<Vertex>) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = Vec::with_capacity(points.len());
    for p in points {
        while out.len() >= 2 && is_straight(out[out.len() - 2], out[out.len() - 1], p) {
            out.pop();
        }
        out.push(p);
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NoPath {
    pub expansions: u64,
    pub backtracks: u64,
    pub visited_trace: Vec<Vertex>,
    /// The search gave up on its expansion budget, so a path may exist.
    #[serde(default)]
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanOutcome {
    Found(PlannedPath),
    NoPath(NoPath),
}

impl PlanOutcome {
    pub fn path(&self) -> Option<&PlannedPath> {
        match self {
            PlanOutcome::Found(p) => Some(p),
            PlanOutcome::NoPath(_) => None,
        }
    }

    pub fn into_path(self) -> Option<PlannedPath> {
        match self {
            PlanOutcome::Found(p) => Some(p),
            PlanOutcome::NoPath(_) => None,
        }
    }

    pub fn expansions(&self) -> u64 {
        match self {
            PlanOutcome::Found(p) => p.expansions,
            PlanOutcome::NoPath(n) => n.expansions,
        }
    }

    pub fn backtracks(&self) -> u64 {
        match self {
            PlanOutcome::Found(p) => p.backtracks,
            PlanOutcome::NoPath(n) => n.backtracks,
        }
    }

    pub fn visited_trace(&self) -> &[Vertex] {
        match self {
            PlanOutcome::Found(p) => &p.visited_trace,
            PlanOutcome::NoPath(n) => &n.visited_trace,
        }
    }

    pub(crate) fn set_work(&mut self, expansions: u64, backtracks: u64) {
        match self {
            PlanOutcome::Found(p) => (p.expansions, p.backtracks) = (expansions, backtracks),
            PlanOutcome::NoPath(n) => (n.expansions, n.backtracks) = (expansions, backtracks),
        }
    }
}

/// Dense per-vertex index over a grid of `width x height` cells.
#[derive(Debug, Clone, Copy)]
pub(crate) struct VertexIndex {
    stride: i32,
    len: usize,
}

impl VertexIndex {
    pub(crate) fn new(width: i32, height: i32) -> Self {
        VertexIndex {
            stride: width + 1,
            len: ((width + 1) * (height + 1)) as usize,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn of(&self, v: Vertex) -> usize {
        (v.y * self.stride + v.x) as usize
    }

    pub(crate) fn vertex(&self, i: usize) -> Vertex {
        Vertex::new(i as i32 % self.stride, i as i32 / self.stride)
    }
}
