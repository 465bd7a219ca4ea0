use std::sync::Arc;

use crate::geometry::{ModelSpace, SpaceKind};
use crate::involution::Involution;
use crate::report::{ReportBuilder, VerificationReport};
use crate::solver::{laplace_beltrami_solve, GridDomain, LinearOptions, Region};

use super::HarnessError;

/// Harmonic function with boundary data odd under an involution `rho` of
/// the source; the solution should satisfy `g(rho(x)) = -g(x)`.
pub struct HarmonicFunctionSetup {
    pub id: String,
    pub space: ModelSpace,
    pub region: Region,
    pub half_width: f64,
    pub resolution: usize,
    pub rho: Arc<dyn Involution>,
    pub solver_tol: f64,
    /// The residual tolerance is this multiple of `solver_tol`.
    pub tolerance_factor: f64,
    /// On two-dimensional curved sources, also compare against the flat solve
    /// on the same grid (harmonic functions are conformally invariant there).
    pub flat_oracle: bool,
}

/// Tolerance of the flat-oracle comparison.
pub const FLAT_ORACLE_TOL: f64 = 1e-8;

pub fn verify_harmonic_function_reflection<F>(
    setup: &HarmonicFunctionSetup,
    boundary: F,
) -> Result<VerificationReport, HarnessError>
where
    F: Fn(&[f64]) -> f64,
{
    match setup.space.kind() {
        SpaceKind::EuclideanReal(_)
        | SpaceKind::EuclideanComplex(_)
        | SpaceKind::ComplexHyperbolicBall(_)
        | SpaceKind::ComplexProjective(_) => {}
        _ => return Err(HarnessError::Invalid(format!("no harmonic-function solves on {}", setup.space))),
    }
    if setup.rho.space() != &setup.space {
        return Err(HarnessError::Invalid(format!("{} does not act on {}", setup.rho.name(), setup.space)));
    }
    let grid = Arc::new(GridDomain::centered(setup.space, setup.half_width, setup.resolution, setup.region)?);
    let snap = 1e-9 * grid.spacing()[0];
    let mirror: Vec<(usize, usize)> = grid
        .active_nodes()
        .map(|n| {
            let r = setup.rho.apply(&grid.coords(n));
            grid.node_near(r.as_slice(), snap)
                .filter(|&m| grid.is_active(m))
                .map(|m| (n, m))
                .ok_or(HarnessError::SigmaLeavesDomain { node: n })
        })
        .collect::<Result<_, _>>()?;

    let mut b = ReportBuilder::new(setup.id.clone());
    b.headline("odd_reflection");
    let mut parity = 0.0f64;
    for &(n, m) in &mirror {
        if grid.is_boundary(n) {
            let (u, v) = (boundary(&grid.coords_vec(n)), boundary(&grid.coords_vec(m)));
            parity = parity.max((u + v).abs() / (1.0 + u.abs()));
        }
    }
    b.hypothesis("boundary data odd", parity <= 1e-12);
    b.note(format!("max boundary parity defect {parity:.3e}"));

    let opts = LinearOptions { tol: setup.solver_tol, max_iters: None };
    let sol = laplace_beltrami_solve(grid.clone(), &boundary, &opts)?;
    let tol = setup.tolerance_factor * setup.solver_tol;
    for &(n, m) in &mirror {
        b.record("odd_reflection", tol, sol.map.value(m)[0] + sol.map.value(n)[0]);
    }
    if setup.flat_oracle && setup.space.real_dim() == 2 && !setup.space.is_flat() {
        let flat_grid = Arc::new(GridDomain::centered(
            ModelSpace::euclidean_real(2),
            setup.half_width,
            setup.resolution,
            setup.region,
        )?);
        let flat = laplace_beltrami_solve(flat_grid, &boundary, &opts)?;
        let d = grid
            .active_nodes()
            .map(|n| (sol.map.value(n)[0] - flat.map.value(n)[0]).abs())
            .fold(0.0, f64::max);
        b.record("flat_oracle", FLAT_ORACLE_TOL, d);
    }
    b.note(format!("solver: {} iterations, tension {:.3e}", sol.iterations, sol.residual));
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::parse_involution;
    use crate::report::Status;

    fn setup(space: ModelSpace, region: Region, res: usize) -> HarmonicFunctionSetup {
        HarmonicFunctionSetup {
            id: "t".into(),
            space,
            region,
            half_width: 0.9,
            resolution: res,
            rho: parse_involution("reflect:1", &space).unwrap(),
            solver_tol: 1e-8,
            tolerance_factor: 10.0,
            flat_oracle: true,
        }
    }

    #[test]
    fn odd_polynomial_on_square() {
        let s = setup(ModelSpace::euclidean_real(2), Region::Box, 21);
        let r = verify_harmonic_function_reflection(&s, |x| x[0].powi(3) * x[1] - x[0] * x[1].powi(3)).unwrap();
        assert_eq!(r.conclusion, Status::Pass);
        assert!(r.max_of("odd_reflection") < 1e-9);
    }

    #[test]
    fn hyperbolic_disk_with_flat_oracle() {
        let s = setup(ModelSpace::ball(1), Region::Disk { radius: 0.9 }, 21);
        let r = verify_harmonic_function_reflection(&s, |x| x[1] / x[0].hypot(x[1])).unwrap();
        assert_eq!(r.conclusion, Status::Pass, "{r:?}");
        assert!(r.max_of("flat_oracle") < 1e-8);
    }

    #[test]
    fn even_data_is_not_applicable() {
        let s = setup(ModelSpace::ball(1), Region::Disk { radius: 0.9 }, 15);
        let r = verify_harmonic_function_reflection(&s, |x| x[1] * x[1] + 0.5).unwrap();
        assert_eq!(r.conclusion, Status::NotApplicable);
        assert!(r.max_of("odd_reflection") > 100.0 * 1e-7);
    }
}
