use nalgebra::DVector;
use num_complex::Complex64;

use super::GeometryError;

/// Tangent vectors share the chart's real coordinate layout.
pub type Tangent = DVector<f64>;

/// A point in chart coordinates. Entries are always finite.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint(DVector<f64>);

impl ChartPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        Self::from_vector(DVector::from_vec(coords))
    }

    pub fn from_vector(v: DVector<f64>) -> Result<Self, GeometryError> {
        if v.iter().all(|x| x.is_finite()) {
            Ok(ChartPoint(v))
        } else {
            Err(GeometryError::NonFinite)
        }
    }

    /// Interleaves `(re, im)` pairs.
    pub fn from_complex(z: &[Complex64]) -> Result<Self, GeometryError> {
        let coords = z.iter().flat_map(|c| [c.re, c.im]).collect();
        Self::new(coords)
    }

    pub fn origin(dim: usize) -> Self {
        ChartPoint(DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    /// The `k`-th complex coordinate of an interleaved complex chart.
    pub fn complex(&self, k: usize) -> Complex64 {
        Complex64::new(self.0[2 * k], self.0[2 * k + 1])
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        (0..self.0.len() / 2).map(|k| self.complex(k)).collect()
    }

    /// Translates by a tangent vector in chart coordinates.
    pub fn offset(&self, v: &DVector<f64>) -> Result<Self, GeometryError> {
        Self::from_vector(&self.0 + v)
    }

    pub fn distance(&self, other: &ChartPoint) -> f64 {
        (&self.0 - &other.0).norm()
    }
}

impl std::ops::Index<usize> for ChartPoint {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
