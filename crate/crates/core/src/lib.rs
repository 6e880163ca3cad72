//! Any-angle path planning on occupancy grids with flight constraints:
//! minimum leg length, maximum turn angle, a flight corridor around
//! infrastructure, and a storage limit on distance flown through coverage
//! holes.

pub mod constraints;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod oracle;
pub mod planner;

pub use constraints::{validate_path, validate_route, ConstraintReport, ConstraintSet, HoleTrail};
pub use error::{Error, Result};
pub use geometry::{Cell, Point, Segment, Vertex};
pub use grid::{build_world, build_world_in, find_holes, AccessPoint, CoverageHole, GridWorld, HoleIndex};
pub use io::scenario::{parse_scenario, ScenarioConfig};
