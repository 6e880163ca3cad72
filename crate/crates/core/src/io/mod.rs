//! File formats: scenarios, MovingAI maps, results, SVG.

pub mod corpus;
pub mod movingai;
pub mod num;
pub mod result;
pub mod scenario;
pub mod svg;
