//! Dimensions of self-affine sponges coded by sofic shifts.
//!
//! A presentation is a right-resolving labeled digraph whose edge labels are
//! digit vectors over bases `m_1 <= ... <= m_r`. From it the crate computes
//! Hausdorff dimension estimates via nested weighted word sums, the Minkowski
//! dimension via level entropies, uniform-complexity certificates, beta-type
//! equations arising from infinite companion matrices, and renderings of
//! approximate squares.

pub mod beta;
pub mod cli;
pub mod error;
pub mod hausdorff;
pub mod logsum;
pub mod model;
pub mod render;
pub mod spectral;
pub mod symbolic;
pub mod systems;

pub use error::{Error, Result};
pub use hausdorff::{
    dimension_estimate, nested_sum, DimensionEstimate, FiberMode, NestedSumResult,
};
pub use model::{parse_spec, Bases, Edge, LabeledDigraph, NonnegMatrix};
