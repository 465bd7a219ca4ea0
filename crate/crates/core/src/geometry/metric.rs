use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ChartPoint, GeometryError, ModelSpace, SpaceKind, Tangent};

/// Scale of the Fubini-Study metric: `CP^1` becomes the unit round sphere.
pub const FUBINI_STUDY_SCALE: f64 = 4.0;

/// Scale of the ball metric: the unit disk gets curvature `-1`.
pub const BALL_SCALE: f64 = 4.0;

impl ModelSpace {
    /// The metric tensor `g_ij(p)` in chart coordinates.
    pub fn metric_at(&self, p: &ChartPoint) -> Result<DMatrix<f64>, GeometryError> {
        self.check_contains(p)?;
        self.metric_unchecked(p)
    }

    /// The metric without the domain check, for finite-difference stencils
    /// that have already been validated.
    pub(crate) fn metric_unchecked(&self, p: &ChartPoint) -> Result<DMatrix<f64>, GeometryError> {
        let dim = self.real_dim();
        match self.kind() {
            SpaceKind::EuclideanReal(_) | SpaceKind::EuclideanComplex(_) => {
                Ok(DMatrix::identity(dim, dim))
            }
            SpaceKind::ComplexHyperbolicBall(_) => {
                let z = p.to_complex();
                let s = 1.0 - norm_sq(&z);
                Ok(kahler_form(&z, BALL_SCALE / s, BALL_SCALE / (s * s)))
            }
            SpaceKind::ComplexProjective(_) => {
                let w = p.to_complex();
                let s = 1.0 + norm_sq(&w);
                Ok(kahler_form(&w, FUBINI_STUDY_SCALE / s, -FUBINI_STUDY_SCALE / (s * s)))
            }
            SpaceKind::BdiDomain(_) | SpaceKind::HyperquadricChart(..) => {
                Err(GeometryError::NoMetricAvailable(self.to_string()))
            }
        }
    }

    pub fn inverse_metric_at(&self, p: &ChartPoint) -> Result<DMatrix<f64>, GeometryError> {
        let g = self.metric_at(p)?;
        Ok(invert_spd(g))
    }

    /// `sqrt(det g)` at `p`.
    pub fn sqrt_det_at(&self, p: &ChartPoint) -> Result<f64, GeometryError> {
        let g = self.metric_at(p)?;
        let chol = g.cholesky().expect("metric is positive definite");
        Ok(chol.l().diagonal().iter().product())
    }

    /// `g_p(v, w)`.
    pub fn inner(&self, p: &ChartPoint, v: &Tangent, w: &Tangent) -> Result<f64, GeometryError> {
        let g = self.metric_at(p)?;
        Ok(v.dot(&(&g * w)))
    }
}

fn norm_sq(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

/// Real form of the Hermitian matrix `a I + b conj(z) z^t`.
///
/// With `K = p + i q` the `(i, j)` block acting on `(x_i, y_i) x (x_j, y_j)`
/// is `[[p, q], [-q, p]]`, so that `g(v, w) = Re(V^t K conj(W))`.
fn kahler_form(z: &[Complex64], a: f64, b: f64) -> DMatrix<f64> {
    let n = z.len();
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in i..n {
            let mut k = z[i].conj() * z[j] * b;
            if i == j {
                k.re += a;
                // the diagonal is real up to rounding of z_i conj(z_i)
                k.im = 0.0;
            }
            let (p, q) = (k.re, k.im);
            g[(2 * i, 2 * j)] = p;
            g[(2 * i, 2 * j + 1)] = q;
            g[(2 * i + 1, 2 * j)] = -q;
            g[(2 * i + 1, 2 * j + 1)] = p;
            if i != j {
                g[(2 * j, 2 * i)] = p;
                g[(2 * j + 1, 2 * i)] = q;
                g[(2 * j, 2 * i + 1)] = -q;
                g[(2 * j + 1, 2 * i + 1)] = p;
            }
        }
    }
    g
}

pub(crate) fn invert_spd(g: DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    match g.clone().cholesky() {
        Some(chol) => chol.inverse(),
        None => g.try_inverse().unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN)),
    }
}
