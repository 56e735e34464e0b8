//! Numerical comparison geometry.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computation. File formats, the command-line driver and parallel batch
//! runs live in the `compass` crate.
//!
//! Modules follow the usual comparison-geometry pipeline:
//!
//! * [`model_space`]: generalized trigonometric functions of the constant
//!   curvature model planes, the cosine law, model angles and model sides.
//! * [`jacobi_riccati`]: scalar Jacobi/Riccati integration along a geodesic
//!   and the comparison harnesses built on it.
//! * [`finite_metric`]: distance matrices, graph ingestion, comparison angles
//!   and the four-point curvature certificate.
//! * [`gromov_hausdorff`]: Hausdorff and Gromov-Hausdorff distances of finite
//!   spaces, approximations, nets and midpoints.
//! * [`volume_comparison`]: model ball volumes and the counting constants
//!   derived from volume comparison.
//! * [`lattice_short_basis`]: short bases of flat tori.
//! * [`semiconcave_flow`]: gradients and gradient flows of minima of smooth
//!   functions, Busemann functions and concavity checks.
//! * [`cones_products`]: Euclidean cones, products, diagonal distances and
//!   the iterated center of mass.

#![no_std]
// NaN-rejecting checks are written as `!(x >= 0.0)` on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cones_products;
pub mod error;
pub mod finite_metric;
pub mod gromov_hausdorff;
pub mod jacobi_riccati;
pub mod lattice_short_basis;
pub mod model_space;
pub mod quadrature;
pub mod report;
pub mod semiconcave_flow;
pub mod volume_comparison;

mod math;

pub use error::{Error, Result};
pub use finite_metric::DistanceMatrix;
pub use model_space::Curvature;
pub use report::Report;
