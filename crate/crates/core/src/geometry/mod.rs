//! Chart-based model spaces.
//!
//! Every space lives in a single chart. Complex charts store their
//! coordinates as interleaved real pairs `(x1, y1, ..., xn, yn)`, so the
//! same tangent-vector representation serves real and complex spaces.
//!
//! Implemented metrics:
//!
//! * Euclidean metric on `R^n` and `C^n`.
//! * The complex hyperbolic ball with conformal factor `2 / (1 - |z|^2)` on
//!   every complex line through the origin (curvature `-1` when `n = 1`).
//! * Fubini-Study on `CP^n` in the inhomogeneous chart `U_0`, scaled so that
//!   `CP^1` is the unit round sphere.
//!
//! The `R^{2 x n}` bounded domain and the hyperquadric charts carry a complex
//! structure but no metric; they are used for the involution and chain algebra.

mod christoffel;
mod geodesic;
mod metric;
mod point;
mod space;

pub use christoffel::{Christoffel, FD_STEP};
pub use geodesic::Geodesic;
pub use point::{ChartPoint, Tangent};
pub use space::{Branch, ModelSpace, SpaceKind};

use thiserror::Error;

/// Margin used for the strict inequalities that define open chart domains.
pub const DOMAIN_MARGIN: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point lies outside the chart domain of {space}")]
    PointOutsideDomain { space: String },

    #[error("finite-difference stencil leaves the chart domain of {space}")]
    StencilExitsDomain { space: String },

    #[error("geodesic left the chart domain after {} steps", partial.points.len())]
    TrajectoryLeftDomain { partial: Box<Geodesic> },

    #[error("{0} carries no complex structure")]
    NotAComplexSpace(String),

    #[error("no metric is implemented on {0}")]
    NoMetricAvailable(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinates must be finite")]
    NonFinite,

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid integration parameters: {0}")]
    InvalidParameters(String),
}
