//! Uniquely determined hierarchical clustering of finite measures.
//!
//! The crate computes cluster forests of simple measures, of exact piecewise
//! linear densities on an interval, of dyadic grid densities, and of mixtures
//! of measures living on points, curves and full-dimensional boxes.
//!
//! - [`geometry`]: regions (intervals, cell unions, polylines, atoms).
//! - [`separation`]: separation relations and ⊥-decompositions.
//! - [`forest`]: forests, structure, forest relating maps, limits.
//! - [`measure`]: base and simple measures, levels, majorization.
//! - [`density`]: piecewise-linear and grid densities.
//! - [`clustering`]: the clustering engines, kinship and adaptedness.
//! - [`mixture`]: measures mixing Hausdorff dimensions.
//! - [`catalog`]: the named example densities used throughout the tests.

pub mod catalog;
pub mod clustering;
pub mod density;
pub mod error;
pub mod forest;
pub mod geometry;
pub mod measure;
pub mod mixture;
pub mod number;
pub mod separation;

pub use error::{Error, Result};
pub use number::{Rational, Scalar};
