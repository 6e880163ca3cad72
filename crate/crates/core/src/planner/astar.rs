//! 8-neighbor A* over grid vertices, the reference for Theta* cost.

use crate::geometry::Vertex;
use crate::grid::GridWorld;

use super::open_list::{OpenEntry, OpenList};
use super::{NoPath, PlanOutcome, PlannedPath, VertexIndex};

/// Shortest 8-connected vertex path. Moves follow the same line-of-sight
/// rule as the any-angle planners, including the diagonal squeeze ban.
pub fn grid_astar(world: &GridWorld, start: Vertex, goal: Vertex) -> PlanOutcome {
    let index = VertexIndex::new(world.width(), world.height());
    let mut g = vec![f64::INFINITY; index.len()];
    let mut parent = vec![u32::MAX; index.len()];
    let mut closed = vec![false; index.len()];
    let mut open = OpenList::new();
    let mut pops = Vec::new();

    let si = index.of(start);
    g[si] = 0.0;
    parent[si] = si as u32;
    open.push(OpenEntry {
        f: start.dist(goal),
        g: 0.0,
        vertex: start,
        item: si,
    });
    while let Some(e) = open.pop() {
        let (s, i) = (e.vertex, e.item);
        if closed[i] || e.g != g[i] {
            continue;
        }
        pops.push(s);
        if s == goal {
            let mut pts = vec![goal];
            let mut cur = i;
            while cur != si {
                cur = parent[cur] as usize;
                pts.push(index.vertex(cur));
            }
            pts.reverse();
            let mut p = PlannedPath::new(pts, world.cell_size_m());
            p.expansions = pops.len() as u64;
            p.visited_trace = pops;
            return PlanOutcome::Found(p);
        }
        closed[i] = true;
        let p = index.vertex(parent[i] as usize);
        for n in s.neighbors8() {
            if !world.in_bounds(n) {
                continue;
            }
            let ni = index.of(n);
            if closed[ni] || !world.line_of_sight(s, n) {
                continue;
            }
            if s != start && world.squeezes_through(p, s, n) {
                continue;
            }
            let cost = g[i] + s.dist(n);
            if cost < g[ni] {
                g[ni] = cost;
                parent[ni] = i as u32;
                open.push(OpenEntry {
                    f: cost + n.dist(goal),
                    g: cost,
                    vertex: n,
                    item: ni,
                });
            }
        }
    }
    PlanOutcome::NoPath(NoPath {
        expansions: pops.len() as u64,
        backtracks: 0,
        visited_trace: pops,
        budget_exhausted: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octile_cost_on_open_grid() {
        let w = GridWorld::new(10, 10, 1.0);
        let p = grid_astar(&w, Vertex::new(0, 0), Vertex::new(9, 4)).into_path().unwrap();
        assert!((p.cost_m - (5.0 + 4.0 * 2f64.sqrt())).abs() < 1e-12);
    }
}
