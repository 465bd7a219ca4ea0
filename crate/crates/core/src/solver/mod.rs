//! Discrete harmonic maps on uniform grids: energy, tension, Dirichlet
//! solves, harmonic functions and Cauchy data.

mod cauchy;
mod descent;
mod energy;
mod grid;
pub mod io;
mod linear;
mod map;

pub use cauchy::{extract_cauchy_data, CauchyData};
pub use descent::{relax, solve_dirichlet, HistoryRow, SolveOptions, SolveOutcome, STEP_FLOOR};
pub use energy::{energy, tension, TensionReport};
pub use grid::{GridDomain, Region};
pub use linear::{laplace_beltrami_solve, LinearOptions};
pub use map::DiscreteMap;

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("value at node {node} left the target domain")]
    ValueLeftTargetDomain { node: usize },

    #[error("no convergence after {iterations} iterations (tension {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64, map: Box<DiscreteMap> },

    #[error("step fell below the floor after {iterations} iterations (tension {residual:.3e})")]
    StepFloor { iterations: usize, residual: f64 },

    #[error("node {node} lacks a difference stencil along axis {axis}")]
    InsufficientStencil { node: usize, axis: usize },

    #[error("empty hypersurface node list")]
    EmptyHypersurface,

    #[error("map file: {0}")]
    Format(String),

    #[error(transparent)]
    Geometry(#[from] GeometryError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
