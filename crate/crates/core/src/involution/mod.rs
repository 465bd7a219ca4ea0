//! Involutive isometries, their fixed sets, and the real-form tables.
//!
//! Every involution built here flips the sign of a subset of chart
//! coordinates: complex conjugation flips the imaginary parts, `sigma_q` on
//! the `R^{2 x n}` domain flips `x_{1j}` for `j <= q` and `x_{2j}` for
//! `j > q`, and `tau_q` on a hyperquadric chart flips `Re zeta^j` for
//! `j <= q` and `Im zeta^j` for `j > q`. Their differentials are therefore
//! the maps themselves.

mod projections;
mod reflection;
pub mod registry;
mod suite;
mod verify;

pub use projections::{projection_begin, projection_end};
pub use reflection::{
    make_conjugation, make_reflection, make_sigma_q, make_tau_q, CoordinateReflection,
};
pub use suite::{algebraic_identity_suite, fixed_set_suite};
pub use verify::{differential_matrix, verify_involution, InvolutionTolerances, PerturbedInvolution};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ChartPoint, GeometryError, ModelSpace, Tangent};

#[derive(Debug, Error)]
pub enum InvolutionError {
    #[error("index {q} out of range for vectors of length {n}")]
    IndexOutOfRange { q: usize, n: usize },

    #[error("invalid q = {q} for n = {n}: {reason}")]
    InvalidQ { q: usize, n: usize, reason: &'static str },

    #[error("conjugation is not defined on {0}")]
    UnsupportedSpace(String),

    #[error("unknown domain type `{0}`")]
    UnknownType(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HolomorphySign {
    AntiHolomorphic,
    Holomorphic,
    NotApplicable,
}

/// Fixed-point set of a coordinate reflection: the locus where the flipped
/// coordinates vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedSet {
    real_dim: usize,
    zero_coords: Vec<usize>,
}

impl FixedSet {
    pub fn new(real_dim: usize, mut zero_coords: Vec<usize>) -> Self {
        zero_coords.sort_unstable();
        zero_coords.dedup();
        FixedSet { real_dim, zero_coords }
    }

    pub fn codim(&self) -> usize {
        self.zero_coords.len()
    }

    pub fn dim(&self) -> usize {
        self.real_dim - self.codim()
    }

    /// Coordinates that vanish on the set.
    pub fn zero_coords(&self) -> &[usize] {
        &self.zero_coords
    }

    pub fn contains(&self, p: &ChartPoint, tol: f64) -> bool {
        self.zero_coords.iter().all(|&i| p[i].abs() <= tol)
    }

    /// Largest `|x_i|` over the vanishing coordinates.
    pub fn defect(&self, p: &ChartPoint) -> f64 {
        self.zero_coords.iter().map(|&i| p[i].abs()).fold(0.0, f64::max)
    }

    /// Projection onto the fixed set's tangent space. At fixed points of an
    /// isometric coordinate reflection the `+1` and `-1` eigenspaces are
    /// metric-orthogonal, so this is the orthogonal projection.
    pub fn project_tangent(&self, v: &Tangent) -> Tangent {
        let mut out = v.clone();
        for &i in &self.zero_coords {
            out[i] = 0.0;
        }
        out
    }

    /// Closest chart point on the set in coordinate norm.
    pub fn project_point(&self, p: &ChartPoint) -> ChartPoint {
        let mut v = p.coords().clone();
        for &i in &self.zero_coords {
            v[i] = 0.0;
        }
        ChartPoint::from_vector(v).expect("finite")
    }

    /// Coordinate basis of the tangent space of the set.
    pub fn tangent_basis(&self) -> Vec<Tangent> {
        (0..self.real_dim)
            .filter(|i| !self.zero_coords.contains(i))
            .map(|i| unit(self.real_dim, i))
            .collect()
    }

    /// Coordinate basis of the normal space of the set.
    pub fn normal_basis(&self) -> Vec<Tangent> {
        self.zero_coords.iter().map(|&i| unit(self.real_dim, i)).collect()
    }
}

pub(crate) fn unit(dim: usize, i: usize) -> Tangent {
    let mut e = DVector::zeros(dim);
    e[i] = 1.0;
    e
}

/// A smooth self-map of a model space with `s o s = id`.
pub trait Involution: Send + Sync {
    fn space(&self) -> &ModelSpace;

    fn name(&self) -> String;

    fn apply(&self, p: &ChartPoint) -> ChartPoint;

    fn differential(&self, p: &ChartPoint, v: &Tangent) -> Tangent;

    fn holomorphy(&self) -> HolomorphySign;

    fn fixed_set(&self) -> &FixedSet;

    /// Whether the map is linear in chart coordinates, in which case the
    /// defining identities are expected to hold exactly.
    fn is_linear(&self) -> bool {
        false
    }
}
