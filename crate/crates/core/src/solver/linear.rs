use std::sync::Arc;

use crate::geometry::ModelSpace;

use super::energy::{Stencil, TargetFields};
use super::{DiscreteMap, GridDomain, SolveOutcome, SolverError, TensionReport};

#[derive(Clone, Debug)]
pub struct LinearOptions {
    /// Tension tolerance checked after the solve.
    pub tol: f64,
    /// Iteration cap; defaults to ten times the number of unknowns.
    pub max_iters: Option<usize>,
}

impl Default for LinearOptions {
    fn default() -> Self {
        LinearOptions { tol: 1e-8, max_iters: None }
    }
}

/// Harmonic function with boundary values `boundary` for the divergence-form
/// operator `(1/sqrt g) d_i (sqrt g g^{ij} d_j u)`. Solved by Jacobi
/// preconditioned conjugate gradients down to rounding level.
pub fn laplace_beltrami_solve<F>(
    domain: Arc<GridDomain>,
    boundary: F,
    opts: &LinearOptions,
) -> Result<SolveOutcome, SolverError>
where
    F: Fn(&[f64]) -> f64,
{
    let target = ModelSpace::euclidean_real(1);
    let stencil = Stencil::new(&domain)?;
    let flat = TargetFields::flat(1);
    let n = domain.len();
    let mut u = vec![0.0; n];
    for b in domain.boundary_nodes() {
        u[b] = boundary(&domain.coords_vec(b));
        if !u[b].is_finite() {
            return Err(SolverError::ValueLeftTargetDomain { node: b });
        }
    }
    let interior = stencil.interior().to_vec();
    let vol = domain.cell_volume();
    let precond: Vec<f64> = interior.iter().map(|&i| 1.0 / (vol * stencil.sqrtg(i) * stencil.diag(i))).collect();

    // K restricted to interior unknowns, via the energy gradient with zero boundary
    let mut scratch = vec![0.0; n];
    let mut apply = |x: &[f64], out: &mut [f64]| {
        for (k, &i) in interior.iter().enumerate() {
            scratch[i] = x[k];
        }
        let g = stencil.gradient(&scratch, 1, &flat);
        for (k, &i) in interior.iter().enumerate() {
            out[k] = g[i];
        }
    };

    let grad0 = stencil.gradient(&u, 1, &flat);
    let mut r: Vec<f64> = interior.iter().map(|&i| -grad0[i]).collect();
    let b_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = vec![0.0; interior.len()];
    let mut z: Vec<f64> = r.iter().zip(&precond).map(|(a, p)| a * p).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut q = vec![0.0; interior.len()];
    let max_iters = opts.max_iters.unwrap_or(10 * interior.len().max(10));
    let mut iterations = 0;
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    while iterations < max_iters && b_norm > 0.0 {
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= 1e-15 * b_norm {
            break;
        }
        // stop once the residual stops improving for a while (rounding floor)
        if r_norm < 0.5 * best {
            best = r_norm;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > 200 {
                break;
            }
        }
        apply(&p, &mut q);
        let pq: f64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
        if pq <= 0.0 {
            break;
        }
        let alpha = rz / pq;
        for k in 0..x.len() {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        for k in 0..x.len() {
            z[k] = r[k] * precond[k];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..x.len() {
            p[k] = z[k] + beta * p[k];
        }
        iterations += 1;
    }
    for (k, &i) in interior.iter().enumerate() {
        u[i] = x[k];
    }
    let map = DiscreteMap::from_values(domain, target, u)?;
    let grad = stencil.gradient(map.values(), 1, &flat);
    let tension: TensionReport = stencil.tension_from_gradient(&grad, 1, &flat);
    let energy = stencil.energy(map.values(), 1, &flat);
    if !(tension.max_norm <= opts.tol) {
        return Err(SolverError::NonConvergence { iterations, residual: tension.max_norm, map: Box::new(map) });
    }
    Ok(SolveOutcome { residual: tension.max_norm, map, iterations, energy, tension, history: Vec::new() })
}
