//! Discrete energy and tension field.
//!
//! The energy is summed cell by cell. Every corner `c` of a fully active
//! cell contributes `vol / 2^d * 1/2 A^{ij}(c) G_ab(h(c)) D_i h^a D_j h^b`,
//! where `D_i` is the one-sided difference along the cell edge leaving `c`
//! and `A = sqrt(g) g^{-1}` is the source metric density at `c`. Linear maps
//! are integrated exactly, and on flat spaces the gradient of this energy is
//! the standard `2d+1`-point Laplacian.
//!
//! The tension at an interior node is `-(vol sqrt(g))^{-1} G^{-1} dE/dh`.

use nalgebra::DMatrix;

use crate::geometry::{ChartPoint, ModelSpace};

use super::{DiscreteMap, GridDomain, SolverError};

/// Per-node tension `tau(h)` with its norms (target metric norm per node).
#[derive(Clone, Debug, PartialEq)]
pub struct TensionReport {
    /// `node * m + a` layout; zero on non-interior nodes.
    pub field: Vec<f64>,
    pub max_norm: f64,
    pub l2_norm: f64,
    /// Interior node attaining `max_norm`.
    pub argmax: Option<usize>,
}

/// Source-side data of the discretization, fixed for a grid.
#[derive(Clone, Debug)]
pub(crate) struct Stencil {
    d: usize,
    corners: usize,
    /// `cells * 2^d` corner nodes, corner bit `i` set = upper side on axis `i`.
    cells: Vec<usize>,
    /// `A = sqrt(g) g^{-1}` per node, `d * d` entries.
    a: Vec<f64>,
    sqrtg: Vec<f64>,
    inv_h: Vec<f64>,
    weight: f64,
    vol: f64,
    /// Jacobi scale `sum_i 2 A^{ii} / (sqrt(g) h_i^2)` per node.
    diag: Vec<f64>,
    interior: Vec<usize>,
}

impl Stencil {
    pub(crate) fn new(domain: &GridDomain) -> Result<Self, SolverError> {
        let d = domain.dim();
        let corners = 1usize << d;
        let source = domain.source();
        let n = domain.len();
        let mut a = vec![0.0; n * d * d];
        let mut sqrtg = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let inv_h: Vec<f64> = domain.spacing().iter().map(|h| 1.0 / h).collect();
        for node in domain.active_nodes() {
            let p = domain.coords(node);
            let (ai, sg) = source_density(source, &p)?;
            for i in 0..d {
                for j in 0..d {
                    a[node * d * d + i * d + j] = ai[(i, j)];
                }
                diag[node] += 2.0 * ai[(i, i)] * inv_h[i] * inv_h[i] / sg;
            }
            sqrtg[node] = sg;
        }
        let offsets: Vec<usize> = (0..corners)
            .map(|c| (0..d).filter(|i| c >> i & 1 == 1).map(|i| domain.strides()[i]).sum())
            .collect();
        let mut cells = Vec::new();
        for base in 0..n {
            let idx = domain.multi_index(base);
            if idx.iter().zip(domain.resolution()).any(|(&k, &r)| k + 1 >= r) {
                continue;
            }
            if offsets.iter().all(|&o| domain.is_active(base + o)) {
                cells.extend(offsets.iter().map(|&o| base + o));
            }
        }
        let vol = domain.cell_volume();
        Ok(Stencil {
            d,
            corners,
            cells,
            a,
            sqrtg,
            inv_h,
            weight: vol / corners as f64,
            vol,
            diag,
            interior: domain.interior_nodes().collect(),
        })
    }

    pub(crate) fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub(crate) fn diag(&self, node: usize) -> f64 {
        self.diag[node]
    }

    pub(crate) fn sqrtg(&self, node: usize) -> f64 {
        self.sqrtg[node]
    }

    /// Visits every (cell, corner) term with the corner node, its edge
    /// neighbours, and the edge signs.
    #[inline]
    fn for_each_corner(&self, mut f: impl FnMut(usize, &[usize], &[f64])) {
        let d = self.d;
        let mut nbr = [0usize; 4];
        let mut sign = [0f64; 4];
        for cell in self.cells.chunks_exact(self.corners) {
            for (c, &node) in cell.iter().enumerate() {
                for i in 0..d {
                    nbr[i] = cell[c ^ (1 << i)];
                    sign[i] = if c >> i & 1 == 0 { 1.0 } else { -1.0 };
                }
                f(node, &nbr[..d], &sign[..d]);
            }
        }
    }

    pub(crate) fn energy(&self, values: &[f64], m: usize, fields: &TargetFields) -> f64 {
        let d = self.d;
        let mut total = 0.0;
        let mut dh = [0f64; 16];
        self.for_each_corner(|node, nbr, sign| {
            for i in 0..d {
                for al in 0..m {
                    dh[i * m + al] = sign[i] * (values[nbr[i] * m + al] - values[node * m + al]) * self.inv_h[i];
                }
            }
            let a = &self.a[node * d * d..(node + 1) * d * d];
            let mut s = 0.0;
            for i in 0..d {
                for j in 0..d {
                    let aij = a[i * d + j];
                    if aij == 0.0 {
                        continue;
                    }
                    s += aij * fields.pair(node, &dh[i * m..(i + 1) * m], &dh[j * m..(j + 1) * m]);
                }
            }
            total += 0.5 * self.weight * s;
        });
        total
    }

    /// `dE/dh` at every node, `node * m + a` layout.
    pub(crate) fn gradient(&self, values: &[f64], m: usize, fields: &TargetFields) -> Vec<f64> {
        let d = self.d;
        let mut grad = vec![0.0; values.len()];
        let mut dh = [0f64; 16];
        let mut gd = [0f64; 16];
        self.for_each_corner(|node, nbr, sign| {
            for i in 0..d {
                for al in 0..m {
                    dh[i * m + al] = sign[i] * (values[nbr[i] * m + al] - values[node * m + al]) * self.inv_h[i];
                }
                // G D_i h
                fields.lower(node, &dh[i * m..(i + 1) * m], &mut gd[i * m..(i + 1) * m]);
            }
            let a = &self.a[node * d * d..(node + 1) * d * d];
            for i in 0..d {
                let coef = self.weight * sign[i] * self.inv_h[i];
                for al in 0..m {
                    let mut p = 0.0;
                    for j in 0..d {
                        p += a[i * d + j] * gd[j * m + al];
                    }
                    grad[nbr[i] * m + al] += coef * p;
                    grad[node * m + al] -= coef * p;
                }
            }
            if let Some(dg) = &fields.dg {
                let dg = &dg[node * m * m * m..(node + 1) * m * m * m];
                for ga in 0..m {
                    let mut s = 0.0;
                    for i in 0..d {
                        for j in 0..d {
                            let aij = a[i * d + j];
                            if aij == 0.0 {
                                continue;
                            }
                            let mut q = 0.0;
                            for al in 0..m {
                                for be in 0..m {
                                    q += dg[(ga * m + al) * m + be] * dh[i * m + al] * dh[j * m + be];
                                }
                            }
                            s += aij * q;
                        }
                    }
                    grad[node * m + ga] += 0.5 * self.weight * s;
                }
            }
        });
        grad
    }

    /// Tension from a gradient, interior nodes only.
    pub(crate) fn tension_from_gradient(&self, grad: &[f64], m: usize, fields: &TargetFields) -> TensionReport {
        let mut field = vec![0.0; grad.len()];
        let mut max_norm = 0.0f64;
        let mut sum = 0.0;
        let mut argmax = None;
        let mut tmp = [0f64; 8];
        for &node in &self.interior {
            let scale = -1.0 / (self.vol * self.sqrtg[node]);
            fields.raise(node, &grad[node * m..(node + 1) * m], &mut tmp[..m]);
            for al in 0..m {
                field[node * m + al] = scale * tmp[al];
            }
            let t = &field[node * m..(node + 1) * m];
            let norm = fields.pair(node, t, t).max(0.0).sqrt();
            sum += norm * norm * self.vol;
            if norm.is_nan() {
                max_norm = f64::NAN;
                argmax = Some(node);
            } else if !max_norm.is_nan() && (argmax.is_none() || norm > max_norm) {
                max_norm = norm;
                argmax = Some(node);
            }
        }
        TensionReport { field, max_norm, l2_norm: sum.sqrt(), argmax }
    }
}

/// `(sqrt(g) g^{-1}, sqrt(g))` of the source at `p`.
fn source_density(source: &ModelSpace, p: &ChartPoint) -> Result<(DMatrix<f64>, f64), SolverError> {
    let ginv = source.inverse_metric_at(p)?;
    let sg = source.sqrt_det_at(p)?;
    Ok((ginv * sg, sg))
}

/// Target metric data evaluated along the current values.
#[derive(Clone, Debug)]
pub(crate) struct TargetFields {
    m: usize,
    /// `None` for flat targets (identity metric).
    g: Option<Vec<f64>>,
    ginv: Option<Vec<f64>>,
    /// `d_c G_ab` per node, index `(c * m + a) * m + b`.
    dg: Option<Vec<f64>>,
}

impl TargetFields {
    pub(crate) fn flat(m: usize) -> Self {
        TargetFields { m, g: None, ginv: None, dg: None }
    }

    /// Metric, inverse and first derivatives of the target metric at every
    /// active value. `with_derivative` skips the Christoffel work when only
    /// the energy is needed.
    pub(crate) fn new(
        domain: &GridDomain,
        target: &ModelSpace,
        values: &[f64],
        with_derivative: bool,
    ) -> Result<Self, SolverError> {
        let m = target.real_dim();
        if target.is_flat() {
            return Ok(Self::flat(m));
        }
        let n = domain.len();
        let mut g = vec![0.0; n * m * m];
        let mut ginv = vec![0.0; n * m * m];
        let mut dg = if with_derivative { Some(vec![0.0; n * m * m * m]) } else { None };
        for node in domain.active_nodes() {
            let p = ChartPoint::new(values[node * m..(node + 1) * m].to_vec())
                .map_err(|_| SolverError::ValueLeftTargetDomain { node })?;
            if !target.contains(&p) {
                return Err(SolverError::ValueLeftTargetDomain { node });
            }
            let gm = target.metric_at(&p)?;
            let gi = target.inverse_metric_at(&p)?;
            for i in 0..m {
                for j in 0..m {
                    g[node * m * m + i * m + j] = gm[(i, j)];
                    ginv[node * m * m + i * m + j] = gi[(i, j)];
                }
            }
            if let Some(dg) = dg.as_mut() {
                let gamma = target.christoffel_at(&p)?;
                let out = &mut dg[node * m * m * m..(node + 1) * m * m * m];
                // d_c G_ab = G_ae Gamma^e_cb + G_be Gamma^e_ca
                for c in 0..m {
                    for a in 0..m {
                        for b in 0..m {
                            let mut s = 0.0;
                            for e in 0..m {
                                s += gm[(a, e)] * gamma.get(e, c, b) + gm[(b, e)] * gamma.get(e, c, a);
                            }
                            out[(c * m + a) * m + b] = s;
                        }
                    }
                }
            }
        }
        Ok(TargetFields { m, g: Some(g), ginv: Some(ginv), dg })
    }

    #[inline]
    pub(crate) fn pair(&self, node: usize, v: &[f64], w: &[f64]) -> f64 {
        let m = self.m;
        match &self.g {
            None => v.iter().zip(w).map(|(a, b)| a * b).sum(),
            Some(g) => {
                let g = &g[node * m * m..(node + 1) * m * m];
                let mut s = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        s += g[a * m + b] * v[a] * w[b];
                    }
                }
                s
            }
        }
    }

    #[inline]
    fn lower(&self, node: usize, v: &[f64], out: &mut [f64]) {
        apply(self.g.as_deref(), self.m, node, v, out)
    }

    #[inline]
    fn raise(&self, node: usize, v: &[f64], out: &mut [f64]) {
        apply(self.ginv.as_deref(), self.m, node, v, out)
    }
}

#[inline]
fn apply(mat: Option<&[f64]>, m: usize, node: usize, v: &[f64], out: &mut [f64]) {
    match mat {
        None => out[..m].copy_from_slice(&v[..m]),
        Some(g) => {
            let g = &g[node * m * m..(node + 1) * m * m];
            for a in 0..m {
                let mut s = 0.0;
                for b in 0..m {
                    s += g[a * m + b] * v[b];
                }
                out[a] = s;
            }
        }
    }
}

/// The stencil loops use fixed scratch space: `d * m <= 16`.
pub(crate) fn check_sizes(h: &DiscreteMap) -> Result<(), SolverError> {
    let (d, m) = (h.domain().dim(), h.target_dim());
    if d * m > 16 {
        return Err(SolverError::InvalidGrid(format!(
            "source dimension {d} times target dimension {m} exceeds 16"
        )));
    }
    Ok(())
}

/// Discrete energy of `h`.
pub fn energy(h: &DiscreteMap) -> Result<f64, SolverError> {
    h.check_values()?;
    check_sizes(h)?;
    let stencil = Stencil::new(h.domain())?;
    let fields = TargetFields::new(h.domain(), h.target(), h.values(), false)?;
    Ok(stencil.energy(h.values(), h.target_dim(), &fields))
}

/// Tension field of `h` at interior nodes.
pub fn tension(h: &DiscreteMap) -> Result<TensionReport, SolverError> {
    h.check_values()?;
    let stencil = Stencil::new(h.domain())?;
    tension_with(&stencil, h)
}

pub(crate) fn tension_with(stencil: &Stencil, h: &DiscreteMap) -> Result<TensionReport, SolverError> {
    check_sizes(h)?;
    let fields = TargetFields::new(h.domain(), h.target(), h.values(), true)?;
    let m = h.target_dim();
    let grad = stencil.gradient(h.values(), m, &fields);
    Ok(stencil.tension_from_gradient(&grad, m, &fields))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::solver::Region;

    fn unit_square(res: usize) -> Arc<GridDomain> {
        Arc::new(
            GridDomain::new(ModelSpace::euclidean_real(2), vec![(0.0, 1.0); 2], vec![res; 2], Region::Box).unwrap(),
        )
    }

    #[test]
    fn energy_of_linear_maps() {
        let g = unit_square(21);
        let target = ModelSpace::euclidean_real(2);
        let id = DiscreteMap::from_fn(g.clone(), target, |x| x.to_vec()).unwrap();
        assert!((energy(&id).unwrap() - 1.0).abs() < 1e-10);
        let stretch = DiscreteMap::from_fn(g.clone(), target, |x| vec![2.0 * x[0], 0.0]).unwrap();
        assert!((energy(&stretch).unwrap() - 2.0).abs() < 1e-10);
        let c = DiscreteMap::constant(g, target, &[0.3, -0.2]).unwrap();
        assert_eq!(energy(&c).unwrap(), 0.0);
    }

    #[test]
    fn tension_of_polynomials() {
        let g = unit_square(21);
        let r = ModelSpace::euclidean_real(1);
        let xy = DiscreteMap::from_fn(g.clone(), r, |x| vec![x[0] * x[1]]).unwrap();
        let t = tension(&xy).unwrap();
        assert!(t.max_norm < 1e-12, "{}", t.max_norm);

        let x2 = DiscreteMap::from_fn(g.clone(), r, |x| vec![x[0] * x[0]]).unwrap();
        let t = tension(&x2).unwrap();
        for n in g.interior_nodes() {
            assert!((t.field[n] - 2.0).abs() < 1e-9);
        }
    }

    /// On a flat grid the tension is the 5-point Laplacian.
    #[test]
    fn flat_tension_is_five_point_laplacian() {
        let g = unit_square(9);
        let r = ModelSpace::euclidean_real(1);
        let f = |x: &[f64]| (3.0 * x[0]).sin() * (2.0 * x[1]).exp();
        let h = DiscreteMap::from_fn(g.clone(), r, |x| vec![f(x)]).unwrap();
        let t = tension(&h).unwrap();
        let s = g.spacing()[0];
        for n in g.interior_nodes() {
            let u = |dx: isize, dy: isize| {
                let m = g.shift(g.shift(n, 0, dx).unwrap(), 1, dy).unwrap();
                h.value(m)[0]
            };
            let lap = (u(1, 0) + u(-1, 0) + u(0, 1) + u(0, -1) - 4.0 * u(0, 0)) / (s * s);
            assert!((t.field[n] - lap).abs() < 1e-9 * lap.abs().max(1.0));
        }
    }

    #[test]
    fn value_outside_target_is_rejected() {
        let g = unit_square(5);
        let disk = ModelSpace::ball(1);
        let h = DiscreteMap::from_values(g.clone(), disk, vec![2.0; g.len() * 2]);
        assert!(matches!(h, Err(SolverError::ValueLeftTargetDomain { .. })));
    }

    /// The discrete gradient matches central differences of the energy.
    #[test]
    fn gradient_matches_energy_differences() {
        let g = Arc::new(GridDomain::centered(ModelSpace::ball(1), 0.5, 7, Region::Box).unwrap());
        let target = ModelSpace::ball(1);
        let mut h = DiscreteMap::from_fn(g.clone(), target, |x| vec![0.5 * x[0] + 0.2 * x[1] * x[1], 0.3 * x[0] * x[1]])
            .unwrap();
        let st = Stencil::new(&g).unwrap();
        let fields = TargetFields::new(&g, &target, h.values(), true).unwrap();
        let grad = st.gradient(h.values(), 2, &fields);
        let node = g.interior_nodes().nth(7).unwrap();
        for a in 0..2 {
            let e = 1e-6;
            let k = node * 2 + a;
            let v0 = h.values()[k];
            h.values_mut()[k] = v0 + e;
            let ep = energy(&h).unwrap();
            h.values_mut()[k] = v0 - e;
            let em = energy(&h).unwrap();
            h.values_mut()[k] = v0;
            let fd = (ep - em) / (2.0 * e);
            assert!((fd - grad[k]).abs() < 1e-7, "{fd} vs {}", grad[k]);
        }
    }
}
