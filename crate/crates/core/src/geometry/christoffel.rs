use nalgebra::{DMatrix, DVector};

use super::metric::invert_spd;
use super::{ChartPoint, GeometryError, ModelSpace, SpaceKind};

/// Step of the central differences taken on metric entries.
pub const FD_STEP: f64 = 1e-5;

/// Christoffel symbols of the second kind, `gamma[k][i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Christoffel { dim, data: vec![0.0; dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    fn set(&mut self, k: usize, i: usize, j: usize, value: f64) {
        self.data[(k * self.dim + i) * self.dim + j] = value;
    }

    /// `Gamma^k_ij v^i w^j` for every `k`.
    pub fn contract(&self, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d, |k, _| {
            let mut s = 0.0;
            for i in 0..d {
                if v[i] == 0.0 {
                    continue;
                }
                for j in 0..d {
                    s += self.get(k, i, j) * v[i] * w[j];
                }
            }
            s
        })
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl ModelSpace {
    /// Christoffel symbols at `p`, using the closed form when one is
    /// registered and central finite differences otherwise.
    pub fn christoffel_at(&self, p: &ChartPoint) -> Result<Christoffel, GeometryError> {
        self.check_contains(p)?;
        match self.christoffel_closed_form(p)? {
            Some(gamma) => Ok(gamma),
            None => self.christoffel_fd(p),
        }
    }

    /// Closed-form symbols for the flat spaces, the Poincare disk and `CP^1`.
    pub fn christoffel_closed_form(
        &self,
        p: &ChartPoint,
    ) -> Result<Option<Christoffel>, GeometryError> {
        self.check_contains(p)?;
        if !self.has_metric() {
            return Err(GeometryError::NoMetricAvailable(self.to_string()));
        }
        let dim = self.real_dim();
        let (x, y) = match self.kind() {
            SpaceKind::EuclideanReal(_) | SpaceKind::EuclideanComplex(_) => {
                return Ok(Some(Christoffel::zeros(dim)))
            }
            SpaceKind::ComplexHyperbolicBall(1) | SpaceKind::ComplexProjective(1) => (p[0], p[1]),
            _ => return Ok(None),
        };
        // conformal metric e^{2 phi} |dz|^2
        let r2 = x * x + y * y;
        let dphi = match self.kind() {
            SpaceKind::ComplexHyperbolicBall(_) => [2.0 * x / (1.0 - r2), 2.0 * y / (1.0 - r2)],
            _ => [-2.0 * x / (1.0 + r2), -2.0 * y / (1.0 + r2)],
        };
        Ok(Some(conformal_christoffel(&dphi)))
    }

    /// Christoffel symbols from central differences of the metric entries.
    pub fn christoffel_fd(&self, p: &ChartPoint) -> Result<Christoffel, GeometryError> {
        self.check_contains(p)?;
        if !self.has_metric() {
            return Err(GeometryError::NoMetricAvailable(self.to_string()));
        }
        let dim = self.real_dim();
        let h = FD_STEP;
        let mut dg: Vec<DMatrix<f64>> = Vec::with_capacity(dim);
        for l in 0..dim {
            let mut e = DVector::zeros(dim);
            e[l] = h;
            let plus = p.offset(&e)?;
            let minus = p.offset(&(-e))?;
            if !self.contains(&plus) || !self.contains(&minus) {
                return Err(GeometryError::StencilExitsDomain { space: self.to_string() });
            }
            let gp = self.metric_unchecked(&plus)?;
            let gm = self.metric_unchecked(&minus)?;
            dg.push((gp - gm) / (2.0 * h));
        }
        let ginv = invert_spd(self.metric_unchecked(p)?);
        let mut gamma = Christoffel::zeros(dim);
        for k in 0..dim {
            for i in 0..dim {
                for j in i..dim {
                    let mut s = 0.0;
                    for l in 0..dim {
                        let gkl = ginv[(k, l)];
                        if gkl == 0.0 {
                            continue;
                        }
                        s += gkl * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                    }
                    gamma.set(k, i, j, 0.5 * s);
                    gamma.set(k, j, i, 0.5 * s);
                }
            }
        }
        Ok(gamma)
    }
}

/// `Gamma^k_ij = delta_ik d_j phi + delta_jk d_i phi - delta_ij d_k phi`.
fn conformal_christoffel(dphi: &[f64]) -> Christoffel {
    let d = dphi.len();
    let mut gamma = Christoffel::zeros(d);
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                if i == k {
                    s += dphi[j];
                }
                if j == k {
                    s += dphi[i];
                }
                if i == j {
                    s -= dphi[k];
                }
                gamma.set(k, i, j, s);
            }
        }
    }
    gamma
}
