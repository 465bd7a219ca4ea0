use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::ModelSpace;
use crate::report::{ReportBuilder, Status, VerificationReport};
use crate::solver::{extract_cauchy_data, solve_dirichlet, GridDomain, SolveOptions, SolveOutcome, SolverError};

use super::HarnessError;

/// Starting interior values of a solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Init {
    /// Mean of the boundary values (the solver default).
    BoundaryMean,
    Zero,
    /// Random values from the given seed: uniform in `[-1, 1]` per
    /// coordinate on flat targets, inside the chart ball of radius 0.5
    /// otherwise.
    Random(u64),
}

impl Init {
    pub fn parse(s: &str) -> Option<Init> {
        match s.trim() {
            "mean" => Some(Init::BoundaryMean),
            "zero" => Some(Init::Zero),
            other => other.strip_prefix("random:").and_then(|v| v.parse().ok()).map(Init::Random),
        }
    }

    fn values(self, domain: &GridDomain, target: &ModelSpace) -> Option<Vec<f64>> {
        let m = target.real_dim();
        match self {
            Init::BoundaryMean => None,
            Init::Zero => Some(vec![0.0; domain.len() * m]),
            Init::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut v = vec![0.0; domain.len() * m];
                for n in domain.interior_nodes() {
                    let p: Vec<f64> = if target.is_flat() {
                        (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()
                    } else {
                        target.sample_point_within(&mut rng, 0.5).as_slice().to_vec()
                    };
                    v[n * m..(n + 1) * m].copy_from_slice(&p);
                }
                Some(v)
            }
        }
    }
}

pub struct ContinuationSetup {
    pub id: String,
    pub domain: Arc<GridDomain>,
    pub target: ModelSpace,
    pub seeds: [Init; 2],
    /// Interior nodes of the hypersurface carrying the Cauchy data.
    pub hypersurface: Vec<usize>,
    pub solve: SolveOptions,
    /// Agreement tolerance for the Cauchy data and the fields.
    pub field_tol: f64,
    /// Bound on `field distance / (Cauchy distance + RATIO_FLOOR)`.
    pub ratio_bound: f64,
}

/// Floor added to the Cauchy-data distance in the continuation ratio.
pub const RATIO_FLOOR: f64 = 1e-9;

/// Two solves from different starting values, the second optionally with
/// its own boundary data (the control). Cauchy data agreeing on the
/// hypersurface is the hypothesis; the fields agreeing everywhere is the
/// conclusion.
pub fn unique_continuation_experiment(
    setup: &ContinuationSetup,
    boundary: &dyn Fn(&[f64]) -> Vec<f64>,
    second_boundary: Option<&dyn Fn(&[f64]) -> Vec<f64>>,
) -> Result<VerificationReport, HarnessError> {
    if setup.hypersurface.is_empty() {
        return Err(SolverError::EmptyHypersurface.into());
    }
    let mut b = ReportBuilder::new(setup.id.clone());
    b.headline("field_distance");
    let mut outs: Vec<SolveOutcome> = Vec::with_capacity(2);
    for (k, init) in setup.seeds.iter().enumerate() {
        let opts = SolveOptions { init: init.values(&setup.domain, &setup.target), ..setup.solve.clone() };
        let bd = if k == 1 { second_boundary.unwrap_or(boundary) } else { boundary };
        match solve_dirichlet(setup.domain.clone(), setup.target, bd, &opts) {
            Ok(o) => {
                b.note(format!("solve {}: {} iterations, tension {:.3e}", k + 1, o.iterations, o.residual));
                outs.push(o);
            }
            Err(e @ (SolverError::NonConvergence { .. } | SolverError::StepFloor { .. })) => {
                b.note(format!("solve {} failed: {e}", k + 1));
                b.force(Status::Inconclusive);
                return Ok(b.finish());
            }
            Err(e) => return Err(e.into()),
        }
    }
    let ca = extract_cauchy_data(&outs[0].map, &setup.hypersurface)?;
    let cb = extract_cauchy_data(&outs[1].map, &setup.hypersurface)?;
    let cauchy = ca.max_distance(&cb)?;
    let field = outs[0].map.max_distance(&outs[1].map);
    b.hypothesis("same Cauchy data", cauchy <= setup.field_tol);
    b.record("cauchy_distance", setup.field_tol, cauchy);
    b.record("field_distance", setup.field_tol, field);
    b.record("continuation_ratio", setup.ratio_bound, field / (cauchy + RATIO_FLOOR));
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Region;

    fn flat_setup(res: usize) -> ContinuationSetup {
        let g = Arc::new(GridDomain::centered(ModelSpace::euclidean_real(2), 1.0, res, Region::Box).unwrap());
        let hyp: Vec<usize> = g.nodes_on_plane(0, 0.0).into_iter().filter(|&n| g.is_interior(n)).collect();
        ContinuationSetup {
            id: "uc".into(),
            domain: g,
            target: ModelSpace::euclidean_real(1),
            seeds: [Init::Zero, Init::Random(7)],
            hypersurface: hyp,
            solve: SolveOptions::with_tol(1e-12),
            field_tol: 1e-9,
            ratio_bound: 10.0,
        }
    }

    #[test]
    fn flat_seeds_agree() {
        let s = flat_setup(13);
        let r = unique_continuation_experiment(&s, &|x| vec![x[0] * x[1]], None).unwrap();
        assert_eq!(r.conclusion, Status::Pass, "{r:?}");
        assert!(r.max_of("field_distance") < 1e-9);
    }

    #[test]
    fn different_boundary_is_no_false_pass() {
        let s = flat_setup(11);
        let other = |x: &[f64]| vec![x[0] * x[0] - x[1] * x[1] + 1.0];
        let r = unique_continuation_experiment(&s, &|x| vec![x[0] * x[1]], Some(&other)).unwrap();
        assert_ne!(r.conclusion, Status::Pass);
        assert!(r.max_of("cauchy_distance") > 0.1);
        assert!(r.max_of("field_distance") > 0.1);
    }

    #[test]
    fn init_parsing() {
        assert_eq!(Init::parse("random:5"), Some(Init::Random(5)));
        assert_eq!(Init::parse("mean"), Some(Init::BoundaryMean));
        assert_eq!(Init::parse("rand"), None);
    }
}
