//! Planar primitives shared by the planners and the validator.
//!
//! Grid vertices are cell corners with integer coordinates; cell `(x, y)`
//! covers the unit box `[x, x + 1] × [y, y + 1]`. Everything in this module
//! works in cell units unless a function says otherwise.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A grid corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub x: i32,
    pub y: i32,
}

impl Vertex {
    pub const fn new(x: i32, y: i32) -> Self {
        Vertex { x, y }
    }

    /// Euclidean distance in cell units.
    pub fn dist(self, other: Vertex) -> f64 {
        let dx = f64::from(other.x - self.x);
        let dy = f64::from(other.y - self.y);
        dx.hypot(dy)
    }

    pub fn to_point(self) -> Point {
        Point::new(f64::from(self.x), f64::from(self.y))
    }

    /// The eight lattice neighbours, in a fixed order.
    pub fn neighbors8(self) -> [Vertex; 8] {
        const OFFSETS: [(i32, i32); 8] = [
            (1, 0),
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
            (-1, -1),
            (0, -1),
            (1, -1),
        ];
        OFFSETS.map(|(dx, dy)| Vertex::new(self.x + dx, self.y + dy))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A grid cell, addressed by its lower corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    pub fn center(self) -> Point {
        Point::new(f64::from(self.x) + 0.5, f64::from(self.y) + 0.5)
    }

    /// The four corners of the cell.
    pub fn corners(self) -> [Vertex; 4] {
        [
            Vertex::new(self.x, self.y),
            Vertex::new(self.x + 1, self.y),
            Vertex::new(self.x, self.y + 1),
            Vertex::new(self.x + 1, self.y + 1),
        ]
    }
}

/// Cells incident to a vertex: the four unit boxes sharing that corner.
pub fn incident_cells(v: Vertex) -> [Cell; 4] {
    [
        Cell::new(v.x - 1, v.y - 1),
        Cell::new(v.x, v.y - 1),
        Cell::new(v.x - 1, v.y),
        Cell::new(v.x, v.y),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

impl From<Vertex> for Point {
    fn from(v: Vertex) -> Self {
        v.to_point()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: impl Into<Point>, b: impl Into<Point>) -> Self {
        Segment {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn length(&self) -> f64 {
        euclid(self.a, self.b)
    }

    fn heading(&self) -> Result<f64> {
        let dx = self.b.x - self.a.x;
        let dy = self.b.y - self.a.y;
        if dx == 0.0 && dy == 0.0 {
            return Err(Error::DegenerateSegment);
        }
        Ok(dy.atan2(dx))
    }
}

/// Straight-line distance between two points or two vertices (cell units).
pub fn euclid<P: Into<Point>>(a: P, b: P) -> f64 {
    let (a, b) = (a.into(), b.into());
    (b.x - a.x).hypot(b.y - a.y)
}

/// Straight-line distance between vertices, in meters.
pub fn vertex_distance_m(a: Vertex, b: Vertex, cell_size_m: f64) -> f64 {
    a.dist(b) * cell_size_m
}

/// Absolute heading change between two legs, in degrees within `[0, 180]`.
///
/// Computed as the difference of the two `atan2` headings, wrapped so that
/// a reversal reads 180 and a straight continuation reads 0.
pub fn turn_angle(dir_in: &Segment, dir_out: &Segment) -> Result<f64> {
    let diff = (dir_out.heading()? - dir_in.heading()?).to_degrees();
    Ok(wrap_degrees(diff))
}

fn wrap_degrees(diff: f64) -> f64 {
    let mut d = diff.rem_euclid(360.0);
    if d > 180.0 {
        d = 360.0 - d;
    }
    d
}

/// Turn angle at `b` for the vertex triple `a -> b -> c`, in degrees.
///
/// Uses `atan2(|cross|, dot)` so that lattice angles such as 45° and 90°
/// come out exact. Callers must ensure `a != b` and `b != c`.
pub fn turn_angle_at(a: Vertex, b: Vertex, c: Vertex) -> f64 {
    let (ux, uy) = (i64::from(b.x - a.x), i64::from(b.y - a.y));
    let (vx, vy) = (i64::from(c.x - b.x), i64::from(c.y - b.y));
    let cross = (ux * vy - uy * vx) as f64;
    let dot = (ux * vx + uy * vy) as f64;
    cross.abs().atan2(dot).to_degrees()
}

/// Exact collinearity test on lattice points (zero cross product).
pub fn is_collinear(a: Vertex, b: Vertex, c: Vertex) -> bool {
    let (ux, uy) = (i64::from(b.x - a.x), i64::from(b.y - a.y));
    let (vx, vy) = (i64::from(c.x - b.x), i64::from(c.y - b.y));
    ux * vy - uy * vx == 0
}

/// Collinear and continuing in the same direction, i.e. `b` is not a turn.
pub fn is_straight(a: Vertex, b: Vertex, c: Vertex) -> bool {
    if !is_collinear(a, b, c) {
        return false;
    }
    let (ux, uy) = (i64::from(b.x - a.x), i64::from(b.y - a.y));
    let (vx, vy) = (i64::from(c.x - b.x), i64::from(c.y - b.y));
    ux * vx + uy * vy > 0
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return euclid(p, a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    euclid(p, a.lerp(b, t))
}

/// Distance from `p` to the nearest point of a polyline.
pub fn distance_to_polyline(p: Point, poly: &[Point]) -> Result<f64> {
    if poly.len() < 2 {
        return Err(Error::InvalidPolyline(poly.len()));
    }
    Ok(poly
        .windows(2)
        .map(|w| point_segment_distance(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min))
}

/// A maximal piece of a segment lying inside one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellPiece {
    pub cell: Cell,
    /// Parameter range along the segment, `0 <= t0 < t1 <= 1`.
    pub t0: f64,
    pub t1: f64,
    /// Length in cell units.
    pub length: f64,
}

/// Splits a segment at every grid line it crosses and attributes each piece
/// to one cell.
///
/// A piece running exactly along a grid line belongs to the cell on the
/// lower-coordinate side of that line; every other piece belongs to the
/// cell whose interior contains it. Each point of the segment is therefore
/// counted exactly once.
pub fn cell_pieces(a: Point, b: Point) -> Vec<CellPiece> {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let total = dx.hypot(dy);
    if total == 0.0 {
        return Vec::new();
    }
    let mut ts = vec![0.0, 1.0];
    push_crossings(&mut ts, a.x, dx);
    push_crossings(&mut ts, a.y, dy);
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|later, earlier| (*later - *earlier).abs() < 1e-12);

    let on_vertical_line = dx == 0.0 && a.x.fract() == 0.0;
    let on_horizontal_line = dy == 0.0 && a.y.fract() == 0.0;
    let mut pieces = Vec::with_capacity(ts.len());
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 <= 0.0 {
            continue;
        }
        let m = a.lerp(b, 0.5 * (t0 + t1));
        let cx = if on_vertical_line {
            m.x as i64 - 1
        } else {
            m.x.floor() as i64
        };
        let cy = if on_horizontal_line {
            m.y as i64 - 1
        } else {
            m.y.floor() as i64
        };
        pieces.push(CellPiece {
            cell: Cell::new(cx as i32, cy as i32),
            t0,
            t1,
            length: (t1 - t0) * total,
        });
    }
    pieces
}

fn push_crossings(ts: &mut Vec<f64>, start: f64, delta: f64) {
    if delta == 0.0 {
        return;
    }
    let end = start + delta;
    let (lo, hi) = if start < end { (start, end) } else { (end, start) };
    let mut k = lo.floor() + 1.0;
    while k < hi {
        ts.push((k - start) / delta);
        k += 1.0;
    }
}

/// Length of `s` lying inside the union of `cells`, using the boundary
/// convention of [`cell_pieces`].
pub fn clip_length_in_cells(s: &Segment, cells: &HashSet<Cell>) -> f64 {
    cell_pieces(s.a, s.b)
        .iter()
        .filter(|p| cells.contains(&p.cell))
        .map(|p| p.length)
        .sum()
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i32, y: i32) -> Vertex {
        Vertex::new(x, y)
    }

    #[test]
    fn euclid_examples() {
        assert_eq!(euclid(v(0, 0), v(0, 0)), 0.0);
        assert_eq!(vertex_distance_m(v(0, 0), v(3, 4), 1.0), 5.0);
        assert!((euclid(v(0, 0), v(9, 9)) - 12.727922061357855).abs() < 1e-12);
        assert_eq!(vertex_distance_m(v(0, 0), v(3, 4), 3.0), 15.0);
    }

    #[test]
    fn turn_angle_examples() {
        let a = Segment::new(v(0, 0), v(1, 0));
        assert_eq!(turn_angle(&a, &Segment::new(v(1, 0), v(2, 0))).unwrap(), 0.0);
        assert!((turn_angle(&a, &Segment::new(v(1, 0), v(1, 1))).unwrap() - 90.0).abs() < 1e-12);
        assert!((turn_angle(&a, &Segment::new(v(1, 0), v(2, 1))).unwrap() - 45.0).abs() < 1e-12);
        assert!(matches!(
            turn_angle(&a, &Segment::new(v(1, 0), v(1, 0))),
            Err(Error::DegenerateSegment)
        ));
    }

    #[test]
    fn turn_angle_wraps_across_pi() {
        // headings of +170° and -170° differ by 20°, not 340°
        let a = Segment::new(Point::new(0.0, 0.0), Point::new(-1.0, 0.176));
        let b = Segment::new(Point::new(0.0, 0.0), Point::new(-1.0, -0.176));
        let t = turn_angle(&a, &b).unwrap();
        assert!(t < 21.0 && t > 19.0, "{t}");
    }

    #[test]
    fn lattice_turns_are_exact() {
        assert_eq!(turn_angle_at(v(0, 0), v(1, 0), v(2, 1)), 45.0);
        assert_eq!(turn_angle_at(v(0, 0), v(1, 0), v(1, 1)), 90.0);
        assert_eq!(turn_angle_at(v(0, 0), v(1, 0), v(0, 0)), 180.0);
        assert_eq!(turn_angle_at(v(0, 0), v(1, 0), v(5, 0)), 0.0);
    }

    #[test]
    fn collinearity_examples() {
        assert!(is_collinear(v(0, 0), v(1, 1), v(2, 2)));
        assert!(!is_collinear(v(0, 0), v(1, 0), v(2, 1)));
        assert!(is_collinear(v(0, 0), v(0, 0), v(5, 3)));
        assert!(is_straight(v(0, 0), v(1, 1), v(3, 3)));
        assert!(!is_straight(v(0, 0), v(2, 2), v(1, 1)));
    }

    #[test]
    fn polyline_distance_examples() {
        let poly = [Point::new(0.0, 0.0), Point::new(2.0, 0.0)];
        assert_eq!(distance_to_polyline(Point::new(1.0, 5.0), &poly).unwrap(), 5.0);
        assert_eq!(distance_to_polyline(Point::new(5.0, 0.0), &poly).unwrap(), 3.0);
        assert_eq!(distance_to_polyline(Point::new(1.5, 0.0), &poly).unwrap(), 0.0);
        assert!(matches!(
            distance_to_polyline(Point::new(0.0, 0.0), &poly[..1]),
            Err(Error::InvalidPolyline(1))
        ));
    }

    #[test]
    fn clipping_examples() {
        // along the line y = 0, attributed to the row below it
        let s = Segment::new(v(0, 0), v(4, 0));
        let below: HashSet<Cell> = [Cell::new(1, -1), Cell::new(2, -1)].into();
        assert_eq!(clip_length_in_cells(&s, &below), 2.0);
        let above: HashSet<Cell> = [Cell::new(1, 0), Cell::new(2, 0)].into();
        assert_eq!(clip_length_in_cells(&s, &above), 0.0);

        let far: HashSet<Cell> = [Cell::new(7, 7)].into();
        assert_eq!(clip_length_in_cells(&s, &far), 0.0);

        let diag = Segment::new(v(0, 0), v(2, 2));
        let one: HashSet<Cell> = [Cell::new(0, 0)].into();
        assert!((clip_length_in_cells(&diag, &one) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pieces_cover_segment() {
        let pieces = cell_pieces(Point::new(0.0, 0.0), Point::new(3.0, 1.0));
        let cells: Vec<_> = pieces.iter().map(|p| p.cell).collect();
        assert_eq!(cells, vec![Cell::new(0, 0), Cell::new(1, 0), Cell::new(2, 0)]);
        let total: f64 = pieces.iter().map(|p| p.length).sum();
        assert!((total - 10f64.sqrt()).abs() < 1e-12);
    }
}
