use std::sync::Arc;

use crate::geometry::{ChartPoint, ModelSpace};

use super::{GridDomain, SolverError};

/// Grid-sampled map from the domain's source chart into a target chart.
/// Values of inactive nodes are stored as zeros and never read.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMap {
    domain: Arc<GridDomain>,
    target: ModelSpace,
    values: Vec<f64>,
}

impl DiscreteMap {
    pub fn from_values(domain: Arc<GridDomain>, target: ModelSpace, values: Vec<f64>) -> Result<Self, SolverError> {
        let m = target.real_dim();
        if values.len() != domain.len() * m {
            return Err(SolverError::InvalidGrid(format!(
                "expected {} values, got {}",
                domain.len() * m,
                values.len()
            )));
        }
        let map = DiscreteMap { domain, target, values };
        map.check_values()?;
        Ok(map)
    }

    /// Samples `f` at every active node.
    pub fn from_fn<F>(domain: Arc<GridDomain>, target: ModelSpace, f: F) -> Result<Self, SolverError>
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let m = target.real_dim();
        let mut values = vec![0.0; domain.len() * m];
        for n in domain.active_nodes() {
            let v = f(&domain.coords_vec(n));
            if v.len() != m {
                return Err(SolverError::InvalidGrid(format!("map returned {} components, want {m}", v.len())));
            }
            values[n * m..(n + 1) * m].copy_from_slice(&v);
        }
        Self::from_values(domain, target, values)
    }

    pub fn constant(domain: Arc<GridDomain>, target: ModelSpace, c: &[f64]) -> Result<Self, SolverError> {
        let c = c.to_vec();
        Self::from_fn(domain, target, move |_| c.clone())
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn domain_arc(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn target(&self) -> &ModelSpace {
        &self.target
    }

    pub fn target_dim(&self) -> usize {
        self.target.real_dim()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn value(&self, node: usize) -> &[f64] {
        let m = self.target_dim();
        &self.values[node * m..(node + 1) * m]
    }

    pub fn point(&self, node: usize) -> ChartPoint {
        ChartPoint::new(self.value(node).to_vec()).expect("values are finite")
    }

    /// Every active value must be finite and inside the target domain.
    pub fn check_values(&self) -> Result<(), SolverError> {
        for n in self.domain.active_nodes() {
            let v = self.value(n);
            let ok = v.iter().all(|x| x.is_finite())
                && self.target.contains(&ChartPoint::new(v.to_vec()).expect("finite"));
            if !ok {
                return Err(SolverError::ValueLeftTargetDomain { node: n });
            }
        }
        Ok(())
    }

    /// Largest Euclidean distance between values at active nodes.
    pub fn max_distance(&self, other: &DiscreteMap) -> f64 {
        let m = self.target_dim();
        self.domain
            .active_nodes()
            .map(|n| {
                let a = &self.values[n * m..(n + 1) * m];
                let b = &other.values[n * m..(n + 1) * m];
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Value at an arbitrary chart point by multilinear interpolation over
    /// the surrounding cell. Points within 1e-9 of a node return the node
    /// value exactly. `None` if the cell is not fully active.
    pub fn eval_at(&self, x: &[f64]) -> Option<Vec<f64>> {
        let g = &*self.domain;
        if let Some(n) = g.node_near(x, 1e-9) {
            return g.is_active(n).then(|| self.value(n).to_vec());
        }
        let d = g.dim();
        let mut base = Vec::with_capacity(d);
        let mut frac = Vec::with_capacity(d);
        for i in 0..d {
            let t = (x[i] - g.bounds()[i].0) / g.spacing()[i];
            if t < 0.0 || t > (g.resolution()[i] - 1) as f64 {
                return None;
            }
            let k = (t.floor() as usize).min(g.resolution()[i] - 2);
            base.push(k);
            frac.push(t - k as f64);
        }
        let m = self.target_dim();
        let mut out = vec![0.0; m];
        for corner in 0..(1usize << d) {
            let mut idx = base.clone();
            let mut w = 1.0;
            for i in 0..d {
                if corner >> i & 1 == 1 {
                    idx[i] += 1;
                    w *= frac[i];
                } else {
                    w *= 1.0 - frac[i];
                }
            }
            let n = g.node_at(&idx);
            if !g.is_active(n) {
                return None;
            }
            for a in 0..m {
                out[a] += w * self.values[n * m + a];
            }
        }
        Some(out)
    }
}
