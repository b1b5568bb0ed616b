//! Boundaries of Pascal-like number triangles with weighted edges.
//!
//! The crate computes dimensions and Martin kernels in exact rational
//! arithmetic, evaluates the closed-form extreme harmonic functions of the
//! classical triangles (Pascal, q-Pascal, Stirling, Eulerian), tests the
//! generalized complete-monotonicity criterion, simulates the backward
//! Markov chains, runs convergence experiments along boundary paths, and
//! inverts moment sequences into mixing measures.

pub mod catalog;
pub mod cli;
pub mod dims;
pub mod error;
pub mod export;
pub mod expr;
pub mod float;
pub mod kernel;
pub mod lab;
pub mod markov;
pub mod moments;
pub mod rational;
pub mod triangle;

pub use catalog::{boundary_coordinate, catalog_triangle, extreme_kernel, BoundaryPoint, ExtInt, ExtQ};
pub use dims::{dimensions, dimensions_from, extended_dimensions, DimensionTable};
pub use error::{Error, Result};
pub use kernel::{
    generalized_difference, kernel_from_first_column, martin_kernel, verify_harmonic, HarmonicReport,
    KernelArray, MembershipVerdict,
};
pub use rational::Q;
pub use triangle::{MultiplicitySpec, NodeIndex};
