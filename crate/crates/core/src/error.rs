use thiserror::Error;

use crate::geometry::Vertex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("segment has zero length")]
    DegenerateSegment,

    #[error("polyline needs at least two points, got {0}")]
    InvalidPolyline(usize),

    #[error("endpoint {vertex} is not usable: {reason}")]
    InfeasibleEndpoints { vertex: Vertex, reason: String },

    #[error("malformed path: {0}")]
    MalformedPath(String),

    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),

    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("map format error: {0}")]
    MapFormat(String),

    #[error("brute-force planner gave up after {iterations} iterations")]
    OracleExhausted { iterations: usize },

    #[error("exhaustive oracle exceeded its bound: {0}")]
    OracleBoundExceeded(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
