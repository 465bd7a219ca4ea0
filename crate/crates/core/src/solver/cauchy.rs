use nalgebra::DMatrix;

use super::{DiscreteMap, SolverError};

/// Values and Jacobians `[d h^b / d x^i]` of a map along a set of nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyData {
    pub nodes: Vec<usize>,
    pub values: Vec<Vec<f64>>,
    /// One `m x d` matrix per node.
    pub jacobians: Vec<DMatrix<f64>>,
}

impl CauchyData {
    /// Largest difference of values and of Jacobian entries, as
    /// `(values, jacobians)`. The node lists must agree.
    pub fn distance(&self, other: &CauchyData) -> Result<(f64, f64), SolverError> {
        if self.nodes != other.nodes {
            return Err(SolverError::InvalidGrid("Cauchy data on different node sets".into()));
        }
        let mut dv = 0.0f64;
        let mut dj = 0.0f64;
        for k in 0..self.nodes.len() {
            for (a, b) in self.values[k].iter().zip(&other.values[k]) {
                dv = dv.max((a - b).abs());
            }
            dj = dj.max((&self.jacobians[k] - &other.jacobians[k]).amax());
        }
        Ok((dv, dj))
    }

    /// `max(values, jacobians)` distance.
    pub fn max_distance(&self, other: &CauchyData) -> Result<f64, SolverError> {
        let (a, b) = self.distance(other)?;
        Ok(a.max(b))
    }
}

/// Jacobians by central differences where both neighbours are active, and
/// second-order one-sided differences `(-3 f0 + 4 f1 - f2) / 2h` otherwise.
pub fn extract_cauchy_data(h: &DiscreteMap, nodes: &[usize]) -> Result<CauchyData, SolverError> {
    if nodes.is_empty() {
        return Err(SolverError::EmptyHypersurface);
    }
    let g = h.domain();
    let d = g.dim();
    let m = h.target_dim();
    let active = |n: Option<usize>| n.filter(|&n| g.is_active(n));
    let mut values = Vec::with_capacity(nodes.len());
    let mut jacobians = Vec::with_capacity(nodes.len());
    for &node in nodes {
        if node >= g.len() || !g.is_active(node) {
            return Err(SolverError::InsufficientStencil { node, axis: 0 });
        }
        let mut jac = DMatrix::zeros(m, d);
        for i in 0..d {
            let hi = g.spacing()[i];
            let plus = active(g.shift(node, i, 1));
            let minus = active(g.shift(node, i, -1));
            let col: Vec<f64> = match (minus, plus) {
                (Some(a), Some(b)) => (0..m).map(|k| (h.value(b)[k] - h.value(a)[k]) / (2.0 * hi)).collect(),
                _ => {
                    let dir: isize = if plus.is_some() { 1 } else { -1 };
                    let n1 = active(g.shift(node, i, dir));
                    let n2 = active(g.shift(node, i, 2 * dir));
                    match (n1, n2) {
                        (Some(n1), Some(n2)) => (0..m)
                            .map(|k| {
                                dir as f64 * (-3.0 * h.value(node)[k] + 4.0 * h.value(n1)[k] - h.value(n2)[k])
                                    / (2.0 * hi)
                            })
                            .collect(),
                        _ => return Err(SolverError::InsufficientStencil { node, axis: i }),
                    }
                }
            };
            for k in 0..m {
                jac[(k, i)] = col[k];
            }
        }
        values.push(h.value(node).to_vec());
        jacobians.push(jac);
    }
    Ok(CauchyData { nodes: nodes.to_vec(), values, jacobians })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::ModelSpace;
    use crate::solver::{GridDomain, Region};

    fn grid() -> Arc<GridDomain> {
        Arc::new(GridDomain::new(ModelSpace::euclidean_real(2), vec![(-1.0, 1.0), (0.0, 1.0)], vec![21, 11], Region::Box).unwrap())
    }

    #[test]
    fn linear_map_on_the_edge() {
        let g = grid();
        let h = DiscreteMap::from_fn(g.clone(), ModelSpace::euclidean_real(2), |x| vec![x[0], -x[1]]).unwrap();
        let nodes = g.nodes_on_plane(1, 0.0);
        let c = extract_cauchy_data(&h, &nodes).unwrap();
        for j in &c.jacobians {
            assert!((j - DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])).amax() < 1e-10);
        }
    }

    #[test]
    fn product_on_the_edge() {
        let g = grid();
        let h = DiscreteMap::from_fn(g.clone(), ModelSpace::euclidean_real(1), |x| vec![x[0] * x[1]]).unwrap();
        let nodes = g.nodes_on_plane(1, 0.0);
        let c = extract_cauchy_data(&h, &nodes).unwrap();
        for (k, &n) in nodes.iter().enumerate() {
            let x = g.coords_vec(n);
            assert!(c.jacobians[k][(0, 0)].abs() < 1e-8);
            assert!((c.jacobians[k][(0, 1)] - x[0]).abs() < 1e-8);
        }
        let again = extract_cauchy_data(&h, &nodes).unwrap();
        assert_eq!(c.max_distance(&again).unwrap(), 0.0);
    }

    #[test]
    fn empty_and_short_stencils() {
        let g = Arc::new(GridDomain::new(ModelSpace::euclidean_real(1), vec![(0.0, 1.0)], vec![5], Region::Box).unwrap());
        let h = DiscreteMap::from_fn(g, ModelSpace::euclidean_real(1), |x| vec![x[0]]).unwrap();
        assert!(matches!(extract_cauchy_data(&h, &[]), Err(SolverError::EmptyHypersurface)));
        assert!(extract_cauchy_data(&h, &[0, 4]).is_ok());
    }
}
