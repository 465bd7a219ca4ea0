use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geometry::{ChartPoint, ModelSpace};

use super::energy::{check_sizes, Stencil, TargetFields, TensionReport};
use super::{DiscreteMap, GridDomain, SolverError};

/// Smallest step before a solve gives up.
pub const STEP_FLOOR: f64 = 1e-12;
/// Accepted steps after which a reduced step is restored.
const RESET_AFTER: usize = 5;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Tension tolerance; defaults to 1e-8 for flat targets and 1e-6 otherwise.
    pub tol: Option<f64>,
    pub initial_step: f64,
    /// Starting interior values (`node * m + a`). Defaults to the mean of
    /// the boundary values.
    pub init: Option<Vec<f64>>,
    /// Record a history row every this many iterations (0 = endpoints only).
    pub history_every: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_iters: 200_000, tol: None, initial_step: 1.0, init: None, history_every: 100 }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolveOptions { tol: Some(tol), ..Default::default() }
    }

    pub fn tolerance_for(&self, target: &ModelSpace) -> f64 {
        self.tol.unwrap_or(if target.is_flat() { 1e-8 } else { 1e-6 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub iteration: usize,
    pub energy: f64,
    pub residual: f64,
    pub step: f64,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub map: DiscreteMap,
    pub iterations: usize,
    pub residual: f64,
    pub energy: f64,
    pub tension: TensionReport,
    pub history: Vec<HistoryRow>,
}

/// Harmonic map with the given boundary values, by preconditioned gradient
/// descent on the discrete energy.
pub fn solve_dirichlet<F>(
    domain: Arc<GridDomain>,
    target: ModelSpace,
    boundary: F,
    opts: &SolveOptions,
) -> Result<SolveOutcome, SolverError>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let m = target.real_dim();
    let mut values = vec![0.0; domain.len() * m];
    let mut mean = vec![0.0; m];
    let mut count = 0usize;
    for n in domain.boundary_nodes() {
        let v = boundary(&domain.coords_vec(n));
        if v.len() != m {
            return Err(SolverError::InvalidGrid(format!("boundary value has {} components, want {m}", v.len())));
        }
        for a in 0..m {
            mean[a] += v[a];
        }
        count += 1;
        values[n * m..(n + 1) * m].copy_from_slice(&v);
    }
    for x in mean.iter_mut() {
        *x /= count.max(1) as f64;
    }
    for n in domain.interior_nodes() {
        match &opts.init {
            Some(init) => {
                if init.len() != values.len() {
                    return Err(SolverError::InvalidGrid("initial field has the wrong length".into()));
                }
                values[n * m..(n + 1) * m].copy_from_slice(&init[n * m..(n + 1) * m]);
            }
            None => values[n * m..(n + 1) * m].copy_from_slice(&mean),
        }
    }
    let map = DiscreteMap::from_values(domain, target, values)?;
    relax(map, opts)
}

/// Runs the descent from `map`, whose boundary values are kept fixed.
pub fn relax(mut map: DiscreteMap, opts: &SolveOptions) -> Result<SolveOutcome, SolverError> {
    check_sizes(&map)?;
    map.check_values()?;
    let tol = opts.tolerance_for(map.target());
    let target = *map.target();
    let domain = map.domain_arc().clone();
    let m = target.real_dim();
    let stencil = Stencil::new(&domain)?;

    let mut fields = TargetFields::new(&domain, &target, map.values(), true)?;
    let mut grad = stencil.gradient(map.values(), m, &fields);
    let mut tension = stencil.tension_from_gradient(&grad, m, &fields);
    let mut e = stencil.energy(map.values(), m, &fields);
    let mut step = opts.initial_step;
    let mut accepted_run = 0usize;
    let mut history = vec![HistoryRow { iteration: 0, energy: e, residual: tension.max_norm, step }];
    let mut iter = 0usize;
    let mut candidate = map.values().to_vec();

    loop {
        if tension.max_norm < tol {
            break;
        }
        if !tension.max_norm.is_finite() || iter >= opts.max_iters {
            history.push(HistoryRow { iteration: iter, energy: e, residual: tension.max_norm, step });
            return Err(SolverError::NonConvergence {
                iterations: iter,
                residual: tension.max_norm,
                map: Box::new(map),
            });
        }
        loop {
            if step < STEP_FLOOR {
                return Err(SolverError::StepFloor { iterations: iter, residual: tension.max_norm });
            }
            candidate.copy_from_slice(map.values());
            let mut inside = true;
            for &n in stencil.interior() {
                let scale = step / stencil.diag(n);
                for a in 0..m {
                    candidate[n * m + a] += scale * tension.field[n * m + a];
                }
                if !target.is_flat() {
                    let p = ChartPoint::new(candidate[n * m..(n + 1) * m].to_vec());
                    if !p.map(|p| target.contains(&p)).unwrap_or(false) {
                        inside = false;
                        break;
                    }
                }
            }
            if !inside {
                step *= 0.5;
                accepted_run = 0;
                continue;
            }
            let efields = TargetFields::new(&domain, &target, &candidate, false)?;
            let ec = stencil.energy(&candidate, m, &efields);
            // slack absorbs rounding in the energy sum near convergence
            if ec <= e + 1e-14 * e.abs() {
                e = ec;
                break;
            }
            step *= 0.5;
            accepted_run = 0;
        }
        map.values_mut().copy_from_slice(&candidate);
        iter += 1;
        accepted_run += 1;
        if accepted_run >= RESET_AFTER && step < opts.initial_step {
            step = opts.initial_step;
            accepted_run = 0;
        }
        fields = TargetFields::new(&domain, &target, map.values(), true)?;
        grad = stencil.gradient(map.values(), m, &fields);
        tension = stencil.tension_from_gradient(&grad, m, &fields);
        if opts.history_every > 0 && iter % opts.history_every == 0 {
            history.push(HistoryRow { iteration: iter, energy: e, residual: tension.max_norm, step });
        }
    }
    if history.last().map(|h| h.iteration) != Some(iter) {
        history.push(HistoryRow { iteration: iter, energy: e, residual: tension.max_norm, step });
    }
    Ok(SolveOutcome { residual: tension.max_norm, map, iterations: iter, energy: e, tension, history })
}
