//! Executable checks of the reflection statements.
//!
//! Each experiment checks the hypotheses of the statement first. When a
//! hypothesis fails the report is `not_applicable` and the conclusion is not
//! judged, though its residuals are still recorded so negative controls can
//! show how far off they are.

mod continuation;
mod harmonic_fn;
mod meromorphic;
mod minimal;
mod recursive;
mod reflection;
mod schwarz;

pub use continuation::{unique_continuation_experiment, ContinuationSetup, Init};
pub use harmonic_fn::{verify_harmonic_function_reflection, HarmonicFunctionSetup};
pub use meromorphic::{meromorphic_reflection_check, RationalFunction, POLE_EXCLUSION};
pub use minimal::{minimal_surface_reflection_check, BumpedSurface, Helicoid, Line, ParametricSurface, Plane};
pub use recursive::verify_recursive_reflection;
pub use reflection::{verify_reflection_identity, ReflectionExperiment};
pub use schwarz::{schwarz_convergence_study, schwarz_extend, seam_residual, SchwarzExtension, SchwarzStudy};

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::chains::ChainError;
use crate::expr::ExprError;
use crate::geometry::{Branch, ChartPoint, GeometryError, ModelSpace};
use crate::involution::{make_conjugation, make_reflection, make_sigma_q, make_tau_q, Involution, InvolutionError};
use crate::maps::MapError;
use crate::solver::SolverError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("involution maps node {node} outside the grid of the map under test")]
    SigmaLeavesDomain { node: usize },

    #[error("value at fixed node {node} is not fixed by the target involution (defect {defect:.3e})")]
    FixedSetValueMismatch { node: usize, defect: f64 },

    #[error("every sample fell within {0:e} of a pole")]
    AllSamplesNearPoles(f64),

    #[error("the fixed line of the rotation is not on the surface (distance {0:.3e})")]
    LineNotOnSurface(f64),

    #[error("invalid experiment: {0}")]
    Invalid(String),

    #[error(transparent)]
    Solver(#[from] SolverError),

    #[error(transparent)]
    Geometry(#[from] GeometryError),

    #[error(transparent)]
    Involution(#[from] InvolutionError),

    #[error(transparent)]
    Chain(#[from] ChainError),

    #[error(transparent)]
    Map(#[from] MapError),

    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Builds an involution from a descriptor:
/// - `conjugation`: complex conjugation on `space`
/// - `reflect:i,j,...`: sign flip of the listed chart coordinates
/// - `negate`: sign flip of every coordinate
/// - `sigma:q`: `sigma_q` on the `R^{2 x n}` domain (`space` must be that domain)
/// - `tau:q`: `tau_q` on a hyperquadric chart (`space` must be that chart)
pub fn parse_involution(desc: &str, space: &ModelSpace) -> Result<Arc<dyn Involution>, HarnessError> {
    let desc = desc.trim();
    let (head, arg) = desc.split_once(':').unwrap_or((desc, ""));
    let bad = |msg: &str| HarnessError::Invalid(format!("involution `{desc}`: {msg}"));
    let int = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("expected a non-negative integer"));
    let inv: Arc<dyn Involution> = match head {
        "conjugation" => Arc::new(make_conjugation(*space)?),
        "negate" => Arc::new(make_reflection(*space, &(0..space.real_dim()).collect::<Vec<_>>())?),
        "reflect" => {
            let coords = arg.split(',').map(int).collect::<Result<Vec<_>, _>>()?;
            Arc::new(make_reflection(*space, &coords)?)
        }
        "sigma" => {
            let inv = make_sigma_q(space.n(), int(arg)?)?;
            if inv.space() != space {
                return Err(bad(&format!("sigma_q acts on {}, not {space}", inv.space())));
            }
            Arc::new(inv)
        }
        "tau" => {
            let branch = match space.kind() {
                crate::geometry::SpaceKind::HyperquadricChart(_, b) => b,
                _ => Branch::V1,
            };
            let inv = make_tau_q(space.n(), int(arg)?, branch)?;
            if inv.space() != space {
                return Err(bad(&format!("tau_q acts on {}, not {space}", inv.space())));
            }
            Arc::new(inv)
        }
        _ => return Err(bad("unknown kind (conjugation, negate, reflect:i,j, sigma:q, tau:q)")),
    };
    Ok(inv)
}

pub(crate) fn inner_or_dot(space: &ModelSpace, p: &ChartPoint, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
    if space.has_metric() {
        space.inner(p, v, w).unwrap_or(f64::NAN)
    } else {
        v.dot(w)
    }
}

/// Largest `|<h_* w, u>| / |u|` over the normal basis `w` of `B1` and the
/// tangent basis `u` of `B2` at `h(q)`.
pub(crate) fn normal_condition(jac: &DMatrix<f64>, hq: &ChartPoint, s1: &dyn Involution, s2: &dyn Involution) -> f64 {
    let target = s2.space();
    let mut worst = 0.0f64;
    for w in s1.fixed_set().normal_basis() {
        let hw = jac * &w;
        for u in s2.fixed_set().tangent_basis() {
            let norm = inner_or_dot(target, hq, &u, &u).sqrt();
            let v = inner_or_dot(target, hq, &hw, &u).abs() / norm;
            worst = if v.is_nan() { f64::NAN } else { worst.max(v) };
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn involution_descriptors() {
        let r2 = ModelSpace::euclidean_real(2);
        let y = parse_involution("reflect:1", &r2).unwrap();
        let p = ChartPoint::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(y.apply(&p).as_slice(), &[1.0, -2.0]);
        let neg = parse_involution("negate", &ModelSpace::euclidean_real(1)).unwrap();
        assert_eq!(neg.fixed_set().dim(), 0);
        assert!(parse_involution("conjugation", &ModelSpace::ball(2)).is_ok());
        assert!(parse_involution("sigma:1", &ModelSpace::bdi(3)).is_ok());
        assert!(parse_involution("sigma:1", &ModelSpace::ball(3)).is_err());
        assert!(parse_involution("tau:1", &ModelSpace::quadric(3, Branch::V2)).is_ok());
        assert!(parse_involution("reflect:5", &r2).is_err());
        assert!(parse_involution("spin", &r2).is_err());
        assert!(parse_involution("conjugation", &r2).is_err());
    }
}
