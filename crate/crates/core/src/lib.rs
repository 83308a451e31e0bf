//! Integral-equation solvers for `−∇·(σ∇u) = F` with Dirichlet data on
//! star-shaped domains, built on a Levi function (parametrix) for the
//! variable-coefficient operator.
//!
//! Two discretizations share the same continuous formulation:
//!
//! * [`ads`]: a layered radial/trigonometric volume quadrature in 2D with
//!   per-layer angular refinement;
//! * [`drm`] and [`drm3d`]: the dual reciprocity method, which expands the
//!   volume density in radial basis functions and converts every volume
//!   potential into boundary integrals.
//!
//! [`bench`] carries the manufactured test problems, error metrics and the
//! experiment driver used by the command-line tool.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ads;
pub mod bench;
pub mod drm;
pub mod drm3d;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod nodes;
pub mod problem;
pub mod quadrature;

pub use error::{LeviError, Result};
pub use geometry::{ParametricCurve2D, Point2, Point3, StarDomain2D, SurfacePatch3D};
pub use problem::{ConductivityField, Problem2D, Problem3D, ProblemSpec};
