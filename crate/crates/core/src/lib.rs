//! Spectral and geometric theory of pairs of orthogonal projections, at finite
//! dimension: Schmidt decompositions of products `PQ`, eigenstructure of
//! `P ± Q` with explicit eigenvectors, Davis' symmetry, Grassmann geodesics
//! and distances, Moore-Penrose pseudoinverses of idempotents, Halmos
//! dilations of contractions, and discretized concentration / Hankel / sinc
//! kernel experiments.
//!
//! Every theorem-level identity is computed along two independent routes and
//! cross-checked; route disagreement surfaces as
//! [`Error::NumericalFailure`](error::Error::NumericalFailure), never as a
//! silently wrong answer.

pub mod analysis;
pub mod constructions;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod numerics;
pub mod projection;
pub mod report;
pub mod sampling;
pub mod spectral;
pub mod tolerance;

pub use error::{Error, Result};
pub use numerics::{CMatrix, CVector};
pub use projection::{Frame, Projection};
pub use tolerance::TolerancePolicy;
