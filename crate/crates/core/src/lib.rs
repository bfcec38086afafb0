//! Weighted Schnyder drawings of planar triangulations and planar morphs
//! between them.
//!
//! The pipeline: build a [`Triangulation`], pick or compute a
//! [`SchnyderWood`], draw it with a [`WeightDistribution`], then plan a
//! [`MorphPlan`] to another wood and weight distribution. Every step of a plan
//! carries an exact planarity certificate.

pub mod drawing;
pub mod flip;
pub mod generate;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod morph;
pub mod recognize;
pub mod schnyder;
pub mod triangulation;
pub mod verify;

pub use drawing::{draw, is_planar, Drawing, WeightDistribution};
pub use morph::{plan_morph, MorphPlan, MorphStep};
pub use schnyder::{compute_wood, validate_wood, Colour, EdgeLabel, SchnyderWood};
pub use triangulation::{TriangleKind, TriangleRef, Triangulation, VertexId};
