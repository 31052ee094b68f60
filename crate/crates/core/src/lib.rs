//! Heat kernels of the Neumann Laplacian on symmetric rooted metric trees.
//!
//! The tree Laplacian is reduced to a family of weighted half-line operators
//! (one per generation), each discretized by finite differences and solved by
//! eigenexpansion. On top of that the crate evaluates the classical diagonal
//! heat kernel bounds (uniform one-dimensional bound, volume-growth two-sided
//! bound, Sobolev-type fast-growth bound, homogeneous-tree spectral gap bound)
//! and the eigenvalue moment inequalities for Schrödinger operators that follow
//! from them.
//!
//! The crate is `no_std` and only needs `alloc`; file formats and the command
//! line live in the `treeheat` crate.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod error;
pub mod functional;
pub mod geometry;
pub mod graph;
pub mod homogeneous;
pub mod kernel;
pub mod linalg;
pub mod radial;
pub mod schrodinger;
pub mod special;
pub mod tree;

pub use error::{Error, Result};
pub use bounds::{verify_bound, BoundKind, BoundParams, BoundReport, Sweep};
pub use functional::{functional_inequality_check, FunctionalFamily};
pub use geometry::{geometry_scan, GeometryReport};
pub use kernel::{diagonal_kernel, full_kernel, KernelSample, TreeKernel};
pub use radial::{discretize_radial, heat_kernel_1d, RadialSystem, SolverConfig};
pub use schrodinger::{
    bound_constants, bound_rhs, check_bound, negative_moments, negative_spectrum, partition_regions, riesz_crosscheck,
    PotentialSpec, RhsKind, SchrodingerCheck, SchrodingerParams,
};
pub use tree::{PointAddress, Tail, TreeSpec};
