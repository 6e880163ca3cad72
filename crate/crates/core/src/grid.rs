//! The discretised planning space: obstacle, coverage and corridor layers,
//! coverage-hole extraction and line-of-sight.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance_to_polyline, incident_cells, Cell, Point, Vertex};
use crate::io::movingai;
use crate::io::scenario::ScenarioConfig;

/// Absolute slack used when comparing distances against corridor bounds.
pub const BAND_EPS: f64 = 1e-9;

/// Step between corridor samples along a leg, in cells.
pub const CORRIDOR_SAMPLE_STEP: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessPoint {
    /// Position in meters.
    pub center: Point,
    pub radius_m: f64,
}

#[derive(Debug, Clone)]
struct Corridor {
    /// Infrastructure polyline in meters.
    polyline_m: Vec<Point>,
    d_row_m: f64,
    d_cfod_m: f64,
}

#[derive(Debug, Clone)]
pub struct GridWorld {
    width: i32,
    height: i32,
    cell_size_m: f64,
    blocked: Vec<bool>,
    covered: Vec<bool>,
    corridor_mask: Vec<bool>,
    /// Cells whose every point is inside the band.
    corridor_safe: Vec<bool>,
    corridor: Option<Corridor>,
    access_points: Vec<AccessPoint>,
}

impl GridWorld {
    /// An obstacle-free, fully uncovered world with no corridor restriction.
    pub fn new(width: u32, height: u32, cell_size_m: f64) -> Self {
        assert!(width >= 1 && height >= 1, "grid must have at least one cell");
        assert!(cell_size_m > 0.0 && cell_size_m.is_finite());
        let (w, h) = (width as i32, height as i32);
        let cells = (w * h) as usize;
        GridWorld {
            width: w,
            height: h,
            cell_size_m,
            blocked: vec![false; cells],
            covered: vec![false; cells],
            corridor_mask: vec![true; ((w + 1) * (h + 1)) as usize],
            corridor_safe: vec![true; (w * h) as usize],
            corridor: None,
            access_points: Vec::new(),
        }
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn cell_size_m(&self) -> f64 {
        self.cell_size_m
    }

    pub fn cell_in_grid(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && c.x < self.width && c.y < self.height
    }

    pub fn in_bounds(&self, v: Vertex) -> bool {
        v.x >= 0 && v.y >= 0 && v.x <= self.width && v.y <= self.height
    }

    fn cell_index(&self, c: Cell) -> usize {
        (c.y * self.width + c.x) as usize
    }

    fn vertex_index(&self, v: Vertex) -> usize {
        (v.y * (self.width + 1) + v.x) as usize
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Cell::new(x, y)))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..=self.height).flat_map(move |y| (0..=self.width).map(move |x| Vertex::new(x, y)))
    }

    /// Cells outside the grid count as blocked.
    pub fn is_blocked(&self, c: Cell) -> bool {
        !self.cell_in_grid(c) || self.blocked[self.cell_index(c)]
    }

    /// Cells outside the grid count as covered; they never belong to a hole.
    pub fn is_covered(&self, c: Cell) -> bool {
        !self.cell_in_grid(c) || self.covered[self.cell_index(c)]
    }

    pub fn set_blocked(&mut self, c: Cell, blocked: bool) {
        if self.cell_in_grid(c) {
            let i = self.cell_index(c);
            self.blocked[i] = blocked;
        }
    }

    pub fn set_covered(&mut self, c: Cell, covered: bool) {
        if self.cell_in_grid(c) {
            let i = self.cell_index(c);
            self.covered[i] = covered;
        }
    }

    pub fn block_rect(&mut self, x: i32, y: i32, w: i32, h: i32) {
        for cy in y..y + h {
            for cx in x..x + w {
                self.set_blocked(Cell::new(cx, cy), true);
            }
        }
    }

    pub fn cover_all(&mut self) {
        self.covered.fill(true);
    }

    /// Marks every cell whose center lies within reach of an access point.
    pub fn apply_access_points(&mut self, aps: &[AccessPoint]) {
        let cell = self.cell_size_m;
        for c in self.cells().collect::<Vec<_>>() {
            let center = c.center().scale(cell);
            let hit = aps
                .iter()
                .any(|ap| (center.x - ap.center.x).hypot(center.y - ap.center.y) <= ap.radius_m);
            if hit {
                self.set_covered(c, true);
            }
        }
        self.access_points.extend_from_slice(aps);
    }

    /// Restricts vertices to the band `d_row <= dist(v, polyline) <= d_cfod`.
    /// `polyline` is given in vertex coordinates.
    pub fn set_corridor(&mut self, polyline: &[Vertex], d_row_m: f64, d_cfod_m: f64) -> Result<()> {
        if polyline.len() < 2 {
            return Err(Error::InvalidPolyline(polyline.len()));
        }
        let polyline_m: Vec<Point> = polyline
            .iter()
            .map(|v| v.to_point().scale(self.cell_size_m))
            .collect();
        self.corridor = Some(Corridor {
            polyline_m,
            d_row_m,
            d_cfod_m,
        });
        for v in self.vertices().collect::<Vec<_>>() {
            let inside = self.point_in_corridor(v.to_point());
            let i = self.vertex_index(v);
            self.corridor_mask[i] = inside;
        }
        // distance to the polyline is 1-Lipschitz, so a cell is safe when
        // its center clears both bounds by half a diagonal
        let half_diag = std::f64::consts::FRAC_1_SQRT_2 * self.cell_size_m;
        for c in self.cells().collect::<Vec<_>>() {
            let d = distance_to_polyline(c.center().scale(self.cell_size_m), self.polyline_m().unwrap())
                .expect("polyline has two points");
            let i = self.cell_index(c);
            self.corridor_safe[i] = d - half_diag >= d_row_m && d + half_diag <= d_cfod_m;
        }
        Ok(())
    }

    /// Access points applied so far.
    pub fn access_points(&self) -> &[AccessPoint] {
        &self.access_points
    }

    pub fn has_corridor(&self) -> bool {
        self.corridor.is_some()
    }

    pub fn polyline_m(&self) -> Option<&[Point]> {
        self.corridor.as_ref().map(|c| c.polyline_m.as_slice())
    }

    pub fn in_corridor(&self, v: Vertex) -> bool {
        self.in_bounds(v) && self.corridor_mask[self.vertex_index(v)]
    }

    /// Corridor test for an arbitrary point given in cell units.
    pub fn point_in_corridor(&self, p: Point) -> bool {
        match &self.corridor {
            None => true,
            Some(c) => {
                let d = distance_to_polyline(p.scale(self.cell_size_m), &c.polyline_m)
                    .expect("corridor polyline validated on construction");
                d >= c.d_row_m - BAND_EPS && d <= c.d_cfod_m + BAND_EPS
            }
        }
    }

    /// Number of corridor samples along `a -> b` (0.25-cell spacing,
    /// endpoints included) that fall outside the band.
    pub fn leg_corridor_misses(&self, a: Vertex, b: Vertex) -> usize {
        if self.corridor.is_none() {
            return 0;
        }
        self.leg_samples(a, b).filter(|&p| !self.sample_in_corridor(p)).count()
    }

    pub fn leg_in_corridor(&self, a: Vertex, b: Vertex) -> bool {
        self.corridor.is_none() || self.leg_samples(a, b).all(|p| self.sample_in_corridor(p))
    }

    fn leg_samples(&self, a: Vertex, b: Vertex) -> impl Iterator<Item = Point> {
        let (pa, pb) = (a.to_point(), b.to_point());
        let n = (a.dist(b) / CORRIDOR_SAMPLE_STEP).ceil().max(1.0) as usize;
        (0..=n).map(move |k| pa.lerp(pb, k as f64 / n as f64))
    }

    fn sample_in_corridor(&self, p: Point) -> bool {
        let c = Cell::new(
            (p.x.floor() as i32).clamp(0, self.width - 1),
            (p.y.floor() as i32).clamp(0, self.height - 1),
        );
        (self.cell_in_grid(c) && self.corridor_safe[self.cell_index(c)]) || self.point_in_corridor(p)
    }

    /// A vertex is usable when it lies on the grid and at least one of its
    /// incident cells is free.
    pub fn is_traversable(&self, v: Vertex) -> bool {
        self.in_bounds(v) && incident_cells(v).iter().any(|&c| !self.is_blocked(c))
    }

    /// Supercover line-of-sight between two vertices.
    ///
    /// The segment is rejected when it crosses the interior of a blocked
    /// cell, runs along a grid edge whose two cells are both blocked, or
    /// passes exactly through a corner shared by two diagonally opposite
    /// blocked cells.
    pub fn line_of_sight(&self, a: Vertex, b: Vertex) -> bool {
        if !self.in_bounds(a) || !self.in_bounds(b) {
            return false;
        }
        if a == b {
            return true;
        }
        let (a, b) = if (a.x, a.y) <= (b.x, b.y) { (a, b) } else { (b, a) };
        let dx = i64::from(b.x - a.x);
        let dy = i64::from(b.y - a.y);

        if dy == 0 {
            let y = a.y;
            return (a.x..b.x).all(|x| {
                !(self.is_blocked(Cell::new(x, y - 1)) && self.is_blocked(Cell::new(x, y)))
            });
        }
        if dx == 0 {
            let x = a.x;
            return (a.y..b.y).all(|y| {
                !(self.is_blocked(Cell::new(x - 1, y)) && self.is_blocked(Cell::new(x, y)))
            });
        }

        // dx > 0 after the swap. y(x) = (ay*dx + dy*(x - ax)) / dx.
        let ax = i64::from(a.x);
        let base = i64::from(a.y) * dx;
        for cx in a.x..b.x {
            let y0 = base + dy * (i64::from(cx) - ax);
            let y1 = base + dy * (i64::from(cx) + 1 - ax);
            let (lo, hi) = if y0 < y1 { (y0, y1) } else { (y1, y0) };
            let first = lo.div_euclid(dx);
            let last = ceil_div(hi, dx) - 1;
            for cy in first..=last {
                if self.is_blocked(Cell::new(cx, cy as i32)) {
                    return false;
                }
            }
            // corner passes on the interior of the segment
            let x = cx + 1;
            if x < b.x {
                let num = base + dy * (i64::from(x) - ax);
                if num.rem_euclid(dx) == 0 {
                    let y = (num / dx) as i32;
                    let (s1, s2) = if dy > 0 {
                        (Cell::new(x - 1, y), Cell::new(x, y - 1))
                    } else {
                        (Cell::new(x - 1, y - 1), Cell::new(x, y))
                    };
                    if self.is_blocked(s1) && self.is_blocked(s2) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// True when `a -> b -> c` runs straight through `b` and `b` is a
    /// diagonal pinch between two blocked cells.
    pub(crate) fn squeezes_through(&self, a: Vertex, b: Vertex, c: Vertex) -> bool {
        crate::geometry::is_straight(a, b, c) && !self.line_of_sight(a, c)
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// A connected zero-coverage region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageHole {
    pub id: usize,
    pub cells: BTreeSet<Cell>,
    /// Hole vertices that also touch a covered or off-grid cell.
    pub boundary_vertices: BTreeSet<Vertex>,
}

/// All coverage holes of a world plus a per-cell lookup table.
#[derive(Debug, Clone)]
pub struct HoleIndex {
    holes: Vec<CoverageHole>,
    cell_hole: Vec<Option<u32>>,
    width: i32,
    height: i32,
}

impl HoleIndex {
    pub fn holes(&self) -> &[CoverageHole] {
        &self.holes
    }

    pub fn len(&self) -> usize {
        self.holes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.holes.is_empty()
    }

    pub fn get(&self, id: usize) -> &CoverageHole {
        &self.holes[id]
    }

    pub fn hole_of_cell(&self, c: Cell) -> Option<usize> {
        if c.x < 0 || c.y < 0 || c.x >= self.width || c.y >= self.height {
            return None;
        }
        self.cell_hole[(c.y * self.width + c.x) as usize].map(|h| h as usize)
    }

    /// Hole owning a clipped segment piece. A piece along the grid's top or
    /// left border would belong to an off-grid cell under the lower-side
    /// rule, so it goes to the in-grid cell it borders instead.
    pub fn hole_of_piece(&self, c: Cell) -> Option<usize> {
        self.hole_of_cell(Cell::new(c.x.max(0), c.y.max(0)))
    }

    /// The hole touching `v`, if any. Distinct holes never share a vertex
    /// because they are 8-connected components.
    pub fn hole_at(&self, v: Vertex) -> Option<usize> {
        incident_cells(v).iter().find_map(|&c| self.hole_of_cell(c))
    }

    pub fn is_boundary(&self, hole: usize, v: Vertex) -> bool {
        self.holes[hole].boundary_vertices.contains(&v)
    }
}

/// Labels the 8-connected components of uncovered cells, numbering them in
/// scanline order of their first cell.
pub fn find_holes(world: &GridWorld) -> HoleIndex {
    let (w, h) = (world.width, world.height);
    let mut cell_hole: Vec<Option<u32>> = vec![None; (w * h) as usize];
    let mut holes = Vec::new();
    for start in world.cells() {
        if world.is_covered(start) || cell_hole[(start.y * w + start.x) as usize].is_some() {
            continue;
        }
        let id = holes.len();
        let mut cells = BTreeSet::new();
        let mut stack = vec![start];
        cell_hole[(start.y * w + start.x) as usize] = Some(id as u32);
        while let Some(c) = stack.pop() {
            cells.insert(c);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let n = Cell::new(c.x + dx, c.y + dy);
                    if (dx, dy) == (0, 0) || !world.cell_in_grid(n) || world.is_covered(n) {
                        continue;
                    }
                    let slot = &mut cell_hole[(n.y * w + n.x) as usize];
                    if slot.is_none() {
                        *slot = Some(id as u32);
                        stack.push(n);
                    }
                }
            }
        }
        holes.push(CoverageHole {
            id,
            cells,
            boundary_vertices: BTreeSet::new(),
        });
    }
    let mut index = HoleIndex {
        holes,
        cell_hole,
        width: w,
        height: h,
    };
    for id in 0..index.holes.len() {
        let mut boundary = BTreeSet::new();
        for c in &index.holes[id].cells {
            for v in c.corners() {
                let leaves = incident_cells(v)
                    .iter()
                    .any(|&n| index.hole_of_cell(n) != Some(id));
                if leaves {
                    boundary.insert(v);
                }
            }
        }
        index.holes[id].boundary_vertices = boundary;
    }
    index
}

/// Free-function form of [`HoleIndex::hole_at`].
pub fn hole_at(world: &GridWorld, holes: &HoleIndex, v: Vertex) -> Option<usize> {
    if !world.in_bounds(v) {
        return None;
    }
    holes.hole_at(v)
}

/// Assembles the obstacle, coverage and corridor layers for a scenario.
///
/// A MovingAI map reference is resolved relative to `base_dir` when it is
/// not absolute.
pub fn build_world_in(scenario: &ScenarioConfig, base_dir: Option<&Path>) -> Result<GridWorld> {
    let world = build_layers(scenario, base_dir)?;
    for (name, v) in [("start", scenario.start), ("goal", scenario.goal)] {
        let reason = if !world.in_bounds(v) {
            Some("outside the grid")
        } else if !world.is_traversable(v) {
            Some("inside an obstacle")
        } else if !world.in_corridor(v) {
            Some("outside the flight corridor")
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(Error::InfeasibleEndpoints {
                vertex: v,
                reason: format!("{name} {reason}"),
            });
        }
    }
    Ok(world)
}

/// The world layers of a scenario without checking its endpoints.
pub fn build_layers(scenario: &ScenarioConfig, base_dir: Option<&Path>) -> Result<GridWorld> {
    let grid = &scenario.grid;
    let mut world = GridWorld::new(grid.width, grid.height, grid.cell_size_m);

    if let Some(map) = &scenario.obstacles.map_file {
        let path = match base_dir {
            Some(dir) if Path::new(map).is_relative() => dir.join(map),
            _ => Path::new(map).to_path_buf(),
        };
        let parsed = movingai::read_map(&path)?;
        if parsed.width != grid.width || parsed.height != grid.height {
            return Err(Error::parse(
                "obstacles.map_file",
                format!(
                    "map is {}x{} but grid is {}x{}",
                    parsed.width, parsed.height, grid.width, grid.height
                ),
            ));
        }
        for c in parsed.blocked_cells() {
            world.set_blocked(c, true);
        }
    }
    for r in &scenario.obstacles.rects {
        world.block_rect(r.x, r.y, r.w, r.h);
    }

    let cov = &scenario.coverage;
    if !cov.access_points.is_empty() {
        world.apply_access_points(&cov.access_points);
    } else if !cov.uncovered_cells.is_empty() {
        world.cover_all();
    }
    for &c in &cov.uncovered_cells {
        world.set_covered(c, false);
    }

    if let Some(poly) = &scenario.infrastructure {
        let cs = &scenario.constraints;
        world.set_corridor(poly, cs.d_row_m, cs.d_cfod_m)?;
    }
    Ok(world)
}

pub fn build_world(scenario: &ScenarioConfig) -> Result<GridWorld> {
    build_world_in(scenario, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i32, y: i32) -> Vertex {
        Vertex::new(x, y)
    }

    #[test]
    fn los_basics() {
        let mut w = GridWorld::new(4, 4, 1.0);
        assert!(w.line_of_sight(v(1, 1), v(1, 1)));
        assert!(w.line_of_sight(v(0, 0), v(4, 3)));
        w.set_blocked(Cell::new(1, 1), true);
        assert!(!w.line_of_sight(v(0, 0), v(2, 2)));
        assert!(!w.line_of_sight(v(2, 2), v(0, 0)));
        // grazing the blocked cell's corner is fine
        assert!(w.line_of_sight(v(0, 1), v(1, 0)));
        // running along its edge with a free cell on the other side is fine
        assert!(w.line_of_sight(v(0, 1), v(4, 1)));
    }

    #[test]
    fn los_rejects_diagonal_squeeze() {
        let mut w = GridWorld::new(4, 4, 1.0);
        w.set_blocked(Cell::new(0, 1), true);
        w.set_blocked(Cell::new(1, 0), true);
        assert!(!w.line_of_sight(v(0, 0), v(2, 2)));
        assert!(w.line_of_sight(v(0, 0), v(1, 1)));
        assert!(w.squeezes_through(v(0, 0), v(1, 1), v(2, 2)));
    }

    #[test]
    fn los_edges_between_blocked_cells() {
        let mut w = GridWorld::new(4, 4, 1.0);
        w.set_blocked(Cell::new(1, 0), true);
        w.set_blocked(Cell::new(1, 1), true);
        // vertical run between two blocked cells? no: x=2 line has (1,y) and (2,y)
        assert!(w.line_of_sight(v(2, 0), v(2, 2)));
        w.set_blocked(Cell::new(2, 0), true);
        assert!(!w.line_of_sight(v(2, 0), v(2, 2)));
        // the top border runs next to the blocked (1,0) and the off-grid row
        assert!(!w.line_of_sight(v(1, 0), v(2, 0)));
    }

    #[test]
    fn holes_corner_connectivity() {
        let mut w = GridWorld::new(3, 3, 1.0);
        w.cover_all();
        w.set_covered(Cell::new(0, 0), false);
        w.set_covered(Cell::new(1, 1), false);
        let holes = find_holes(&w);
        assert_eq!(holes.len(), 1);
        assert_eq!(holes.get(0).cells.len(), 2);
        assert_eq!(hole_at(&w, &holes, v(1, 1)), Some(0));
        assert_eq!(hole_at(&w, &holes, v(3, 0)), None);
    }

    #[test]
    fn fully_covered_has_no_holes() {
        let mut w = GridWorld::new(5, 2, 1.0);
        w.cover_all();
        assert!(find_holes(&w).is_empty());
    }

    #[test]
    fn corridor_band_along_left_edge() {
        let mut w = GridWorld::new(10, 6, 1.0);
        w.set_corridor(&[v(0, 0), v(0, 6)], 2.0, 5.0).unwrap();
        for vert in w.vertices() {
            assert_eq!(w.in_corridor(vert), (2..=5).contains(&vert.x), "{vert}");
        }
    }
}
