//! First Robin eigenvalues of the anisotropic (Finsler) Laplacian on planar
//! domains with a non-positive boundary parameter, and numerical checks of the
//! isoperimetric inequalities that single out the Wulff shape.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod norm;
pub mod radial;
pub mod vec2;
pub mod verify;

/// Crate version, part of every cache key derived from results.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use fem::{FemSolution, SolverOptions, TriMesh};
pub use geometry::{ConvexPolygon, ParallelProfile, ParallelRadii};
pub use norm::{FinslerNorm, NormSpec, WulffApprox};
pub use radial::{AnnulusSpec, Eigenpair1D};
pub use verify::{HarnessConfig, Verdict, VerificationRecord};
