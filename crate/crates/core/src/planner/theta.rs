//! Baseline Theta*.

use crate::geometry::{is_straight, Vertex};
use crate::grid::GridWorld;

use super::open_list::{OpenEntry, OpenList};
use super::{NoPath, PlanOutcome, PlannedPath, VertexIndex};

/// Vertices and segments the search must avoid on top of obstacles.
pub trait SearchBlocks {
    fn vertex_blocked(&self, v: Vertex) -> bool;
    fn segment_blocked(&self, a: Vertex, b: Vertex) -> bool;
}

pub struct NoBlocks;

impl SearchBlocks for NoBlocks {
    fn vertex_blocked(&self, _: Vertex) -> bool {
        false
    }

    fn segment_blocked(&self, _: Vertex, _: Vertex) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ThetaOptions {
    /// Only accept vertices and legs inside the flight corridor.
    pub respect_corridor: bool,
}

/// Raw result of one Theta* run.
#[derive(Debug, Clone)]
pub struct ThetaRun {
    pub path: Option<Vec<Vertex>>,
    /// Expanded vertices in pop order.
    pub pops: Vec<Vertex>,
    index: VertexIndex,
    via: Vec<u32>,
}

impl ThetaRun {
    /// Vertex whose expansion last improved `v`.
    pub fn via_of(&self, v: Vertex) -> Option<Vertex> {
        match self.via[self.index.of(v)] {
            u32::MAX => None,
            i => Some(self.index.vertex(i as usize)),
        }
    }
}

/// Plain Theta* between two vertices: Path 2 shortcuts to the expanding
/// vertex's parent when in line of sight, Path 1 otherwise.
pub fn theta_star(world: &GridWorld, start: Vertex, goal: Vertex) -> PlanOutcome {
    let run = run_theta(world, start, goal, ThetaOptions::default(), &NoBlocks);
    let expansions = run.pops.len() as u64;
    match run.path {
        Some(points) => {
            let mut p = PlannedPath::new(points, world.cell_size_m());
            p.expansions = expansions;
            p.visited_trace = run.pops;
            PlanOutcome::Found(p)
        }
        None => PlanOutcome::NoPath(NoPath {
            expansions,
            backtracks: 0,
            visited_trace: run.pops,
            budget_exhausted: false,
        }),
    }
}

/// Theta* with extra blocking, reporting the raw search state.
pub fn run_theta(
    world: &GridWorld,
    start: Vertex,
    goal: Vertex,
    opts: ThetaOptions,
    blocks: &dyn SearchBlocks,
) -> ThetaRun {
    let index = VertexIndex::new(world.width(), world.height());
    let mut g = vec![f64::INFINITY; index.len()];
    let mut parent = vec![u32::MAX; index.len()];
    let mut via = vec![u32::MAX; index.len()];
    let mut closed = vec![false; index.len()];
    let mut open = OpenList::new();
    let mut pops = Vec::new();

    let corridor = opts.respect_corridor && world.has_corridor();
    let leg_ok = |a: Vertex, b: Vertex| !corridor || world.leg_in_corridor(a, b);

    let si = index.of(start);
    g[si] = 0.0;
    parent[si] = si as u32;
    open.push(OpenEntry {
        f: start.dist(goal),
        g: 0.0,
        vertex: start,
        item: si,
    });

    let mut found = false;
    while let Some(e) = open.pop() {
        let s = e.vertex;
        let i = e.item;
        if closed[i] || e.g != g[i] {
            continue;
        }
        let p = index.vertex(parent[i] as usize);
        pops.push(s);
        if s == goal {
            found = true;
            break;
        }
        closed[i] = true;
        for n in s.neighbors8() {
            if !world.in_bounds(n) {
                continue;
            }
            let ni = index.of(n);
            if closed[ni] || !world.line_of_sight(s, n) || !leg_ok(s, n) {
                continue;
            }
            if n != goal && blocks.vertex_blocked(n) {
                continue;
            }
            // the shortcut must not run straight on through a pinch at `p`
            let pp = index.vertex(parent[parent[i] as usize] as usize);
            let (from, cost) = if s != start
                && world.line_of_sight(p, n)
                && !world.squeezes_through(pp, p, n)
                && leg_ok(p, n)
                && !blocks.segment_blocked(p, n)
            {
                (p, g[parent[i] as usize] + p.dist(n))
            } else {
                if s != start && is_straight(p, s, n) {
                    // a straight continuation only fails line of sight by squeezing
                    // between diagonal obstacles at `s`
                    continue;
                }
                if blocks.segment_blocked(s, n) {
                    continue;
                }
                (s, g[i] + s.dist(n))
            };
            if cost < g[ni] {
                g[ni] = cost;
                parent[ni] = index.of(from) as u32;
                via[ni] = i as u32;
                open.push(OpenEntry {
                    f: cost + n.dist(goal),
                    g: cost,
                    vertex: n,
                    item: ni,
                });
            }
        }
    }

    let path = found.then(|| {
        let mut pts = vec![goal];
        let mut cur = index.of(goal);
        while cur != si {
            cur = parent[cur] as usize;
            pts.push(index.vertex(cur));
        }
        pts.reverse();
        pts
    });
    ThetaRun { path, pops, index, via }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{validate_path, ConstraintSet};
    use crate::grid::find_holes;

    fn v(x: i32, y: i32) -> Vertex {
        Vertex::new(x, y)
    }

    #[test]
    fn open_grid_is_one_leg() {
        let w = GridWorld::new(10, 10, 1.0);
        let p = theta_star(&w, v(0, 0), v(9, 9)).into_path().unwrap();
        assert_eq!(p.turning_points, vec![v(0, 0), v(9, 9)]);
        assert!((p.cost_m - 9.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn walled_in_goal() {
        let mut w = GridWorld::new(10, 10, 1.0);
        w.block_rect(5, 5, 3, 1);
        w.block_rect(5, 7, 3, 1);
        w.block_rect(5, 6, 1, 1);
        w.block_rect(7, 6, 1, 1);
        // the free cell (6,6) is ringed by obstacles, so none of its corners is reachable
        assert!(matches!(theta_star(&w, v(0, 0), v(6, 6)), PlanOutcome::NoPath(n) if n.expansions > 0));
    }

    #[test]
    fn wall_detour_is_valid() {
        let mut w = GridWorld::new(8, 8, 1.0);
        w.block_rect(3, 2, 1, 3);
        let p = theta_star(&w, v(1, 3), v(6, 3)).into_path().unwrap();
        let h = find_holes(&w);
        assert!(validate_path(&p.turning_points, &w, &h, &ConstraintSet::default()).unwrap().pass);
        // rounds both corners of the wall on one side
        assert_eq!(p.turning_points.len(), 4);
    }
}
