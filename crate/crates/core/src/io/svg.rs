//! SVG rendering of a world and planner results.
//!
//! Color key: coverage yellow, obstacles grey, corridor red, Theta* path
//! white, final constrained path green, visited trace blue. Coordinates
//! are cell units with y pointing down, as in the grid.

use std::fmt::Write;

use crate::geometry::{Cell, Vertex};
use crate::grid::{GridWorld, HoleIndex};
use crate::io::result::{PlannerKind, ResultRecord};

/// Layer ids in drawing order.
pub const LAYERS: [&str; 6] = ["coverage", "corridor", "obstacles", "trace", "continuous", "final"];

/// Pixels per cell, chosen so the longer side is about 1000 px.
fn scale(world: &GridWorld) -> f64 {
    (1000.0 / world.width().max(world.height()) as f64).clamp(1.0, 40.0)
}

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Horizontal runs of cells satisfying `pred`, as (x, y, length).
fn runs(world: &GridWorld, pred: impl Fn(Cell) -> bool) -> Vec<(i32, i32, i32)> {
    let mut out = Vec::new();
    for y in 0..world.height() {
        let mut x = 0;
        while x < world.width() {
            if pred(Cell::new(x, y)) {
                let x0 = x;
                while x < world.width() && pred(Cell::new(x, y)) {
                    x += 1;
                }
                out.push((x0, y, x - x0));
            } else {
                x += 1;
            }
        }
    }
    out
}

fn rects(svg: &mut String, runs: &[(i32, i32, i32)]) {
    for &(x, y, len) in runs {
        let _ = writeln!(svg, r#"    <rect x="{x}" y="{y}" width="{len}" height="1"/>"#);
    }
}

fn polyline(svg: &mut String, pts: &[Vertex], attrs: &str) {
    let list: Vec<String> = pts.iter().map(|v| format!("{},{}", v.x, v.y)).collect();
    let _ = writeln!(svg, r#"    <polyline {attrs} points="{}"/>"#, list.join(" "));
}

/// Renders `world` with the given results on top. Theta results are drawn
/// as the continuous shortest path, wide enough to show under a final path
/// on the same route. Every other planner's path is a final path, with its
/// visited trace as dots.
pub fn render_svg(world: &GridWorld, holes: &HoleIndex, results: &[ResultRecord]) -> String {
    let (w, h) = (world.width(), world.height());
    let px = scale(world);
    let cell = world.cell_size_m();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {w} {h}">"#,
        num(w as f64 * px),
        num(h as f64 * px)
    );
    let _ = writeln!(svg, r#"  <clipPath id="frame"><rect x="0" y="0" width="{w}" height="{h}"/></clipPath>"#);
    let _ = writeln!(svg, r##"  <rect id="grid" x="0" y="0" width="{w}" height="{h}" fill="#1f2a36" stroke="black" stroke-width="0.1"/>"##);

    // coverage: access point disks when known, covered cells otherwise
    let _ = writeln!(svg, r##"  <g id="coverage" fill="#f5d90a" fill-opacity="0.45" clip-path="url(#frame)">"##);
    if world.access_points().is_empty() {
        rects(&mut svg, &runs(world, |c| holes.hole_of_cell(c).is_none() && !world.is_blocked(c)));
    } else {
        for ap in world.access_points() {
            let _ = writeln!(
                svg,
                r#"    <circle cx="{}" cy="{}" r="{}"/>"#,
                num(ap.center.x / cell),
                num(ap.center.y / cell),
                num(ap.radius_m / cell)
            );
        }
    }
    svg.push_str("  </g>\n");

    let _ = writeln!(svg, r##"  <g id="corridor" fill="#d62728" fill-opacity="0.25">"##);
    if world.has_corridor() {
        rects(&mut svg, &runs(world, |c| world.point_in_corridor(c.center())));
    }
    svg.push_str("  </g>\n");

    let _ = writeln!(svg, r##"  <g id="obstacles" fill="#8c8c8c">"##);
    rects(&mut svg, &runs(world, |c| world.is_blocked(c)));
    svg.push_str("  </g>\n");

    let stroke = |color: &str, width: f64| {
        format!(r#"fill="none" stroke="{color}" stroke-width="{width}" stroke-linejoin="round""#)
    };
    let paths = |theta: bool| {
        results
            .iter()
            .filter(move |r| (r.planner == PlannerKind::Theta) == theta)
            .filter_map(|r| r.path.as_ref().map(|p| (r, p)))
    };

    let _ = writeln!(svg, r##"  <g id="trace" fill="#1f77b4">"##);
    for (_, p) in paths(false) {
        for v in &p.visited_trace {
            let _ = writeln!(svg, r#"    <circle cx="{}" cy="{}" r="0.12"/>"#, v.x, v.y);
        }
    }
    svg.push_str("  </g>\n");

    svg.push_str("  <g id=\"continuous\">\n");
    for (r, p) in paths(true) {
        polyline(&mut svg, &p.turning_points, &format!(r#"data-planner="{}" {}"#, r.planner, stroke("white", 0.45)));
    }
    svg.push_str("  </g>\n");

    svg.push_str("  <g id=\"final\">\n");
    for (r, p) in paths(false) {
        polyline(&mut svg, &p.turning_points, &format!(r#"data-planner="{}" {}"#, r.planner, stroke("#2ca02c", 0.2)));
    }
    svg.push_str("  </g>\n");

    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::find_holes;

    #[test]
    fn empty_world_has_frame_and_empty_layers() {
        let w = GridWorld::new(4, 3, 1.0);
        let svg = render_svg(&w, &find_holes(&w), &[]);
        assert!(svg.contains(r#"<rect id="grid" x="0" y="0" width="4" height="3""#));
        for id in LAYERS {
            assert!(svg.contains(&format!(r#"<g id="{id}""#)), "{id}");
        }
        assert!(!svg.contains("<polyline"));
        assert!(!svg.contains("<circle"));
    }

    #[test]
    fn final_path_lists_turning_points() {
        let s = crate::io::scenario::ScenarioConfig::new(6, 6, 1.0, Vertex::new(0, 0), Vertex::new(6, 3));
        let w = crate::grid::build_world(&s).unwrap();
        let holes = find_holes(&w);
        let recs: Vec<ResultRecord> = [PlannerKind::Theta, PlannerKind::Constrained]
            .into_iter()
            .map(|k| crate::io::result::run_planner(&s, None, k).unwrap())
            .collect();
        let svg = render_svg(&w, &holes, &recs);
        assert!(svg.contains(r##"data-planner="constrained" fill="none" stroke="#2ca02c""##));
        assert!(svg.contains(r#"points="0,0 6,3"/>"#));
        assert_eq!(svg, render_svg(&w, &holes, &recs));
        let layers: Vec<usize> = LAYERS.iter().map(|id| svg.find(&format!(r#"<g id="{id}""#)).unwrap()).collect();
        assert!(layers.windows(2).all(|p| p[0] < p[1]));
    }
}
