use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ChartPoint, GeometryError, Tangent, DOMAIN_MARGIN};

/// Which of the two hyperquadric charts: `w^1 = +sqrt(..)` or `w^1 = -sqrt(..)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    V1,
    V2,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::V1 => 1.0,
            Branch::V2 => -1.0,
        }
    }

    pub fn parse(s: &str) -> Option<Branch> {
        match s.to_ascii_lowercase().as_str() {
            "v1" | "1" => Some(Branch::V1),
            "v2" | "2" => Some(Branch::V2),
            _ => None,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::V1 => write!(f, "v1"),
            Branch::V2 => write!(f, "v2"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// `R^n`.
    EuclideanReal(usize),
    /// `C^n`.
    EuclideanComplex(usize),
    /// `{ z in C^n : |z| < 1 }`.
    ComplexHyperbolicBall(usize),
    /// `CP^n` in the inhomogeneous chart `z^0 != 0`.
    ComplexProjective(usize),
    /// `{ X in R^{2 x n} : X X^t < I_2 }`, coordinates `(X1 row, X2 row)`.
    BdiDomain(usize),
    /// Chart `zeta = (w^2, ..., w^{n+1})` on the hyperquadric `Q_n(C)`.
    HyperquadricChart(usize, Branch),
}

/// A model space: one chart plus its geometric structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelSpace {
    kind: SpaceKind,
}

impl ModelSpace {
    pub fn new(kind: SpaceKind) -> Result<Self, GeometryError> {
        let n = match kind {
            SpaceKind::EuclideanReal(n)
            | SpaceKind::EuclideanComplex(n)
            | SpaceKind::ComplexHyperbolicBall(n)
            | SpaceKind::ComplexProjective(n)
            | SpaceKind::BdiDomain(n)
            | SpaceKind::HyperquadricChart(n, _) => n,
        };
        if n == 0 {
            return Err(GeometryError::InvalidSpace("dimension must be at least 1".into()));
        }
        Ok(ModelSpace { kind })
    }

    pub fn euclidean_real(n: usize) -> Self {
        Self::new(SpaceKind::EuclideanReal(n)).expect("n >= 1")
    }

    pub fn euclidean_complex(n: usize) -> Self {
        Self::new(SpaceKind::EuclideanComplex(n)).expect("n >= 1")
    }

    pub fn ball(n: usize) -> Self {
        Self::new(SpaceKind::ComplexHyperbolicBall(n)).expect("n >= 1")
    }

    pub fn projective(n: usize) -> Self {
        Self::new(SpaceKind::ComplexProjective(n)).expect("n >= 1")
    }

    pub fn bdi(n: usize) -> Self {
        Self::new(SpaceKind::BdiDomain(n)).expect("n >= 1")
    }

    pub fn quadric(n: usize, branch: Branch) -> Self {
        Self::new(SpaceKind::HyperquadricChart(n, branch)).expect("n >= 1")
    }

    /// Builds a space from its configuration identifier.
    pub fn parse(id: &str, n: usize, branch: Option<Branch>) -> Result<Self, GeometryError> {
        let kind = match id {
            "euclidean_r" => SpaceKind::EuclideanReal(n),
            "euclidean_c" => SpaceKind::EuclideanComplex(n),
            "chyp_ball" => SpaceKind::ComplexHyperbolicBall(n),
            "cproj" => SpaceKind::ComplexProjective(n),
            "bdi_domain" => SpaceKind::BdiDomain(n),
            "quadric_chart" => SpaceKind::HyperquadricChart(n, branch.unwrap_or(Branch::V1)),
            other => return Err(GeometryError::InvalidSpace(format!("unknown space `{other}`"))),
        };
        Self::new(kind)
    }

    /// Parses the `Display` form, `id:n` or `quadric_chart:n:branch`.
    pub fn from_descriptor(s: &str) -> Result<Self, GeometryError> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || GeometryError::InvalidSpace(format!("malformed space descriptor `{s}`"));
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let n: usize = parts[1].parse().map_err(|_| bad())?;
        let branch = match parts.get(2) {
            Some(b) => Some(Branch::parse(b).ok_or_else(bad)?),
            None => None,
        };
        Self::parse(parts[0], n, branch)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn id(&self) -> &'static str {
        match self.kind {
            SpaceKind::EuclideanReal(_) => "euclidean_r",
            SpaceKind::EuclideanComplex(_) => "euclidean_c",
            SpaceKind::ComplexHyperbolicBall(_) => "chyp_ball",
            SpaceKind::ComplexProjective(_) => "cproj",
            SpaceKind::BdiDomain(_) => "bdi_domain",
            SpaceKind::HyperquadricChart(..) => "quadric_chart",
        }
    }

    /// The dimension parameter `n` of the space.
    pub fn n(&self) -> usize {
        match self.kind {
            SpaceKind::EuclideanReal(n)
            | SpaceKind::EuclideanComplex(n)
            | SpaceKind::ComplexHyperbolicBall(n)
            | SpaceKind::ComplexProjective(n)
            | SpaceKind::BdiDomain(n)
            | SpaceKind::HyperquadricChart(n, _) => n,
        }
    }

    pub fn real_dim(&self) -> usize {
        match self.kind {
            SpaceKind::EuclideanReal(n) => n,
            _ => 2 * self.n(),
        }
    }

    pub fn is_complex(&self) -> bool {
        !matches!(self.kind, SpaceKind::EuclideanReal(_))
    }

    pub fn has_metric(&self) -> bool {
        !matches!(self.kind, SpaceKind::BdiDomain(_) | SpaceKind::HyperquadricChart(..))
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.kind, SpaceKind::EuclideanReal(_) | SpaceKind::EuclideanComplex(_))
    }

    /// Membership in the open chart domain.
    pub fn contains(&self, p: &ChartPoint) -> bool {
        if p.dim() != self.real_dim() {
            return false;
        }
        let c = p.coords();
        match self.kind {
            SpaceKind::EuclideanReal(_)
            | SpaceKind::EuclideanComplex(_)
            | SpaceKind::ComplexProjective(_) => true,
            SpaceKind::ComplexHyperbolicBall(_) => c.norm_squared() < 1.0 - DOMAIN_MARGIN,
            SpaceKind::BdiDomain(n) => {
                let x1 = c.rows(0, n);
                let x2 = c.rows(n, n);
                let a = 1.0 - x1.norm_squared();
                let d = 1.0 - x2.norm_squared();
                let b = -x1.dot(&x2);
                a > DOMAIN_MARGIN && a * d - b * b > DOMAIN_MARGIN
            }
            SpaceKind::HyperquadricChart(..) => quadric_defect(p).norm() > DOMAIN_MARGIN,
        }
    }

    pub fn check_contains(&self, p: &ChartPoint) -> Result<(), GeometryError> {
        if p.dim() != self.real_dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.real_dim(), got: p.dim() });
        }
        if self.contains(p) {
            Ok(())
        } else {
            Err(GeometryError::PointOutsideDomain { space: self.to_string() })
        }
    }

    /// Applies the complex structure `J`.
    pub fn apply_complex_structure(
        &self,
        p: &ChartPoint,
        v: &Tangent,
    ) -> Result<Tangent, GeometryError> {
        if !self.is_complex() {
            return Err(GeometryError::NotAComplexSpace(self.to_string()));
        }
        self.check_contains(p)?;
        if v.len() != self.real_dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.real_dim(), got: v.len() });
        }
        Ok(self.complex_structure_unchecked(v))
    }

    /// `J` without domain checks; the structure is constant in every chart.
    pub(crate) fn complex_structure_unchecked(&self, v: &Tangent) -> Tangent {
        let dim = self.real_dim();
        let mut out = DVector::zeros(dim);
        match self.kind {
            SpaceKind::BdiDomain(n) => {
                for j in 0..n {
                    out[j] = v[n + j];
                    out[n + j] = -v[j];
                }
            }
            _ => {
                for k in 0..dim / 2 {
                    out[2 * k] = -v[2 * k + 1];
                    out[2 * k + 1] = v[2 * k];
                }
            }
        }
        out
    }

    /// Draws a point from a bounded, well-conditioned part of the chart.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> ChartPoint {
        let radius = match self.kind {
            SpaceKind::ComplexHyperbolicBall(_) => 0.9,
            SpaceKind::ComplexProjective(_) => 10.0,
            _ => 1.0,
        };
        self.sample_point_within(rng, radius)
    }

    /// Draws a point with Euclidean chart norm at most `radius`, restricted to
    /// the domain.
    pub fn sample_point_within<R: Rng + ?Sized>(&self, rng: &mut R, radius: f64) -> ChartPoint {
        let dim = self.real_dim();
        loop {
            let v = match self.kind {
                SpaceKind::BdiDomain(_) => {
                    // entries up to 0.9/sqrt(n) per row keep X X^t well inside I_2
                    let s = 0.9 / (self.n() as f64).sqrt();
                    DVector::from_fn(dim, |_, _| rng.random_range(-s..s))
                }
                SpaceKind::HyperquadricChart(..) => {
                    DVector::from_fn(dim, |_, _| rng.random_range(-radius..radius))
                }
                _ => random_in_ball(rng, dim, radius),
            };
            let p = ChartPoint::from_vector(v).expect("finite sample");
            if self.contains(&p) && self.well_conditioned(&p) {
                return p;
            }
        }
    }

    fn well_conditioned(&self, p: &ChartPoint) -> bool {
        match self.kind {
            SpaceKind::HyperquadricChart(..) => quadric_defect(p).norm() > 1e-3,
            _ => true,
        }
    }

    /// For a hyperquadric chart point, the dependent coordinate `w^1` on this
    /// branch.
    pub fn quadric_w1(&self, p: &ChartPoint) -> Option<Complex64> {
        match self.kind {
            SpaceKind::HyperquadricChart(_, branch) => {
                Some(branch.sign() * (-quadric_defect(p)).sqrt())
            }
            _ => None,
        }
    }

    /// Homogeneous coordinates `[1 : w^1 : zeta^1 : ... : zeta^n]` of a
    /// hyperquadric chart point.
    pub fn quadric_homogeneous(&self, p: &ChartPoint) -> Option<Vec<Complex64>> {
        let w1 = self.quadric_w1(p)?;
        let mut z = vec![Complex64::new(1.0, 0.0), w1];
        z.extend(p.to_complex());
        Some(z)
    }
}

/// `1 + sum zeta_k^2`, which vanishes on the chart boundary.
pub(crate) fn quadric_defect(p: &ChartPoint) -> Complex64 {
    let mut s = Complex64::new(1.0, 0.0);
    for z in p.to_complex() {
        s += z * z;
    }
    s
}

fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> DVector<f64> {
    loop {
        let dir = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        let norm = dir.norm();
        if norm > 1e-3 {
            let r: f64 = rng.random_range(0.0..1.0);
            return dir / norm * radius * r.powf(1.0 / dim as f64);
        }
    }
}

impl fmt::Display for ModelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SpaceKind::HyperquadricChart(n, b) => write!(f, "{}:{}:{}", self.id(), n, b),
            _ => write!(f, "{}:{}", self.id(), self.n()),
        }
    }
}
