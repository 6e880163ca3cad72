//! JSON scenario format.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "id": "demo",
//!   "grid": { "width": 10, "height": 10, "cell_size_m": 1.0 },
//!   "obstacles": { "rects": [{ "x": 3, "y": 0, "w": 1, "h": 6 }], "map_file": null },
//!   "coverage": { "access_points": [{ "center": { "x": 2.0, "y": 2.0 }, "radius_m": 4.0 }],
//!                 "uncovered_cells": [] },
//!   "infrastructure": [{ "x": 0, "y": 0 }, { "x": 0, "y": 10 }],
//!   "constraints": { "l_min_m": 0.0, "theta_bmax_deg": 45.0, "d_row_m": 1.0,
//!                    "d_cfod_m": 8.0, "d_zero_m": null },
//!   "start": { "x": 1, "y": 1 },
//!   "goal": { "x": 9, "y": 9 },
//!   "seed": 0
//! }
//! ```
//!
//! Only `grid`, `start` and `goal` are required. Omitted constraints are
//! inactive and `null` bounds mean "unbounded".

use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintSet;
use crate::error::{Error, Result};
use crate::geometry::{Cell, Point, Vertex};
use crate::grid::AccessPoint;
use crate::io::num::{round9, ser_f64};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_cell_size() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub width: u32,
    pub height: u32,
    #[serde(default = "default_cell_size", serialize_with = "ser_f64")]
    pub cell_size_m: f64,
}

/// An axis-aligned block of cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRect {
    pub x: i32,
    pub y: i32,
    pub w: i32,
    pub h: i32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSpec {
    #[serde(default)]
    pub rects: Vec<CellRect>,
    #[serde(default)]
    pub map_file: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageSpec {
    #[serde(default)]
    pub access_points: Vec<AccessPoint>,
    #[serde(default)]
    pub uncovered_cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "schema_version")]
    pub schema: u32,
    #[serde(default)]
    pub id: Option<String>,
    pub grid: GridSpec,
    #[serde(default)]
    pub obstacles: ObstacleSpec,
    #[serde(default)]
    pub coverage: CoverageSpec,
    /// Infrastructure polyline in vertex coordinates.
    #[serde(default)]
    pub infrastructure: Option<Vec<Vertex>>,
    #[serde(default)]
    pub constraints: ConstraintSet,
    pub start: Vertex,
    pub goal: Vertex,
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioConfig {
    /// A bare scenario: empty grid, default constraints.
    pub fn new(width: u32, height: u32, cell_size_m: f64, start: Vertex, goal: Vertex) -> Self {
        ScenarioConfig {
            schema: SCHEMA_VERSION,
            id: None,
            grid: GridSpec {
                width,
                height,
                cell_size_m,
            },
            obstacles: ObstacleSpec::default(),
            coverage: CoverageSpec::default(),
            infrastructure: None,
            constraints: ConstraintSet::default(),
            start,
            goal,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::parse("schema", format!("unsupported schema version {}", self.schema)));
        }
        if self.grid.width == 0 || self.grid.height == 0 {
            return Err(Error::parse("grid", "width and height must be at least 1"));
        }
        if !(self.grid.cell_size_m > 0.0 && self.grid.cell_size_m.is_finite()) {
            return Err(Error::parse("grid.cell_size_m", "must be a positive number"));
        }
        for (i, r) in self.obstacles.rects.iter().enumerate() {
            if r.w <= 0 || r.h <= 0 {
                return Err(Error::parse(format!("obstacles.rects[{i}]"), "w and h must be positive"));
            }
        }
        for (i, ap) in self.coverage.access_points.iter().enumerate() {
            if !(ap.radius_m > 0.0) || !ap.center.x.is_finite() || !ap.center.y.is_finite() {
                return Err(Error::parse(
                    format!("coverage.access_points[{i}]"),
                    "radius_m must be positive and the center finite",
                ));
            }
        }
        if let Some(poly) = &self.infrastructure {
            if poly.len() < 2 {
                return Err(Error::parse("infrastructure", "polyline needs at least two vertices"));
            }
        }
        if self.start == self.goal {
            return Err(Error::parse("goal", "start and goal coincide"));
        }
        self.constraints.validate()
    }

    /// Copy with every real number rounded to the serialized precision.
    pub fn normalized(&self) -> Self {
        let mut s = self.clone();
        s.grid.cell_size_m = round9(s.grid.cell_size_m);
        for ap in &mut s.coverage.access_points {
            ap.center = Point::new(round9(ap.center.x), round9(ap.center.y));
            ap.radius_m = round9(ap.radius_m);
        }
        let c = &mut s.constraints;
        c.l_min_m = round9(c.l_min_m);
        c.theta_bmax_deg = round9(c.theta_bmax_deg);
        c.d_row_m = round9(c.d_row_m);
        c.d_cfod_m = round9(c.d_cfod_m);
        c.d_zero_m = round9(c.d_zero_m);
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.normalized())?)
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(bytes: &[u8]) -> Result<ScenarioConfig> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let mut track = serde_path_tracker::Track::new();
    let scenario: ScenarioConfig = serde_path_tracker::deserialize(de, &mut track)
        .map_err(|e| Error::parse(track.path(), e.to_string()))?;
    scenario.validate()?;
    Ok(scenario.normalized())
}

/// Minimal field-path tracking so schema errors name the offending field.
mod serde_path_tracker {
    use serde::de::DeserializeOwned;

    pub struct Track {
        path: String,
    }

    impl Track {
        pub fn new() -> Self {
            Track { path: String::new() }
        }

        pub fn path(&self) -> String {
            if self.path.is_empty() {
                ".".into()
            } else {
                self.path.clone()
            }
        }
    }

    /// Deserializes through a `serde_json::Value` so that on failure the
    /// first field that does not fit its schema can be located.
    pub fn deserialize<T: DeserializeOwned>(
        de: &mut serde_json::Deserializer<serde_json::de::SliceRead<'_>>,
        track: &mut Track,
    ) -> Result<T, serde_json::Error> {
        let value: serde_json::Value = serde::Deserialize::deserialize(de)?;
        match serde_json::from_value::<T>(value.clone()) {
            Ok(v) => Ok(v),
            Err(e) => {
                track.path = locate(&value, &e.to_string());
                Err(e)
            }
        }
    }

    fn locate(value: &serde_json::Value, message: &str) -> String {
        // serde names the field for missing/unknown fields; otherwise fall
        // back to the top-level key whose name appears in the message
        for marker in ["missing field `", "unknown field `"] {
            if let Some(rest) = message.split(marker).nth(1) {
                if let Some(name) = rest.split('`').next() {
                    return name.to_string();
                }
            }
        }
        if let serde_json::Value::Object(map) = value {
            for key in map.keys() {
                if message.contains(key.as_str()) {
                    return key.clone();
                }
            }
        }
        String::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let s = parse_scenario(br#"{"grid":{"width":5,"height":4},"start":{"x":0,"y":0},"goal":{"x":5,"y":4}}"#).unwrap();
        assert_eq!(s.constraints, ConstraintSet::default());
        assert_eq!(s.grid.cell_size_m, 1.0);
        assert!(s.infrastructure.is_none());
    }

    #[test]
    fn inverted_band_is_rejected() {
        let err = parse_scenario(
            br#"{"grid":{"width":5,"height":4},"start":{"x":0,"y":0},"goal":{"x":5,"y":4},
                "constraints":{"d_row_m":50,"d_cfod_m":30}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidConstraints(_)), "{err}");
    }

    #[test]
    fn schema_errors_name_the_field() {
        let err = parse_scenario(br#"{"grid":{"width":5,"height":4},"start":{"x":0,"y":0}}"#).unwrap_err();
        match err {
            Error::Parse { path, .. } => assert_eq!(path, "goal"),
            other => panic!("{other}"),
        }
        let err = parse_scenario(br#"{"grid":{"width":5,"height":4},"start":{"x":0,"y":0},"goal":{"x":1,"y":1},"bogus":1}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Parse { ref path, .. } if path == "bogus"), "{err}");
    }

    #[test]
    fn unbounded_values_round_trip_as_null() {
        let s = ScenarioConfig::new(3, 3, 2.5, Vertex::new(0, 0), Vertex::new(3, 3));
        let json = s.to_json().unwrap();
        assert!(json.contains("\"d_zero_m\": null"));
        assert_eq!(parse_scenario(json.as_bytes()).unwrap(), s);
    }
}
