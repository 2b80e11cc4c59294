//! Shortest paths through sequences of segment bundles, and an exploring robot that
//! plans with them.

pub mod bundles;
pub mod funnel;
pub mod geometry;
pub mod instances;
pub mod io;
pub mod mms;
pub mod oracle;
pub mod robot;
pub mod rubber_band;

pub use geometry::{pt, Point2, PolylinePath, Segment, Tolerances};
