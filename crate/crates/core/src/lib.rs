//! Allen-Cahn equation on rotationally symmetric spheres of nonnegative Ricci
//! curvature built from a flat bump: metric construction, radial solvers,
//! gradient flow, spectral analysis and sweepout widths.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cylinder;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod geometry;
pub mod io;
pub mod minmax;
pub mod parabolic;
pub mod quad;
pub mod spectral;
pub mod tridiag;

pub use error::{Error, Result};
