//! Symbolic and numeric verification toolkit for four-dimensional Walker
//! metrics whose Ricci tensor is pointwise proportional to the metric.

pub mod catalog;
pub mod expr;
pub mod geometry;
pub mod jets;
pub mod liealg;
pub mod linalg;
pub mod pis;
pub mod sampling;
pub mod suite;
