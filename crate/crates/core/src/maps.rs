//! Closed-form maps between model spaces.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{Expr, ExprError, Vars};
use crate::geometry::{ChartPoint, GeometryError, ModelSpace};
use crate::solver::DiscreteMap;

#[derive(Debug, Error)]
pub enum MapError {
    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("map needs {expected} components for {space}, got {got}")]
    ComponentCount { space: String, expected: usize, got: usize },

    #[error("holomorphic maps need complex spaces, got {0}")]
    NotComplex(String),

    #[error("value {value:?} lies outside {space}")]
    OutsideTarget { space: String, value: Vec<f64> },

    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub trait ClosedFormMap: Send + Sync {
    fn source(&self) -> &ModelSpace;
    fn target(&self) -> &ModelSpace;
    fn eval(&self, p: &ChartPoint) -> Result<ChartPoint, MapError>;
    fn describe(&self) -> String;
}

/// The map under test in a reflection experiment.
pub enum MapUnderTest {
    Discrete(DiscreteMap),
    Closed(Box<dyn ClosedFormMap>),
}

impl MapUnderTest {
    pub fn source(&self) -> &ModelSpace {
        match self {
            MapUnderTest::Discrete(h) => h.domain().source(),
            MapUnderTest::Closed(f) => f.source(),
        }
    }

    pub fn target(&self) -> &ModelSpace {
        match self {
            MapUnderTest::Discrete(h) => h.target(),
            MapUnderTest::Closed(f) => f.target(),
        }
    }
}

fn checked(target: &ModelSpace, v: Vec<f64>) -> Result<ChartPoint, MapError> {
    let p = ChartPoint::new(v.clone()).map_err(|_| MapError::OutsideTarget { space: target.to_string(), value: v.clone() })?;
    if !target.contains(&p) {
        return Err(MapError::OutsideTarget { space: target.to_string(), value: v });
    }
    Ok(p)
}

/// One real expression per target chart coordinate, in the source
/// coordinates `x0, x1, ...`.
#[derive(Clone, Debug)]
pub struct ExprMap {
    source: ModelSpace,
    target: ModelSpace,
    components: Vec<Expr>,
}

impl ExprMap {
    pub fn new<S: AsRef<str>>(source: ModelSpace, target: ModelSpace, components: &[S]) -> Result<Self, MapError> {
        if components.len() != target.real_dim() {
            return Err(MapError::ComponentCount {
                space: target.to_string(),
                expected: target.real_dim(),
                got: components.len(),
            });
        }
        let components = components
            .iter()
            .map(|c| Expr::parse(c.as_ref(), Vars::Real(source.real_dim())))
            .collect::<Result<_, _>>()?;
        Ok(ExprMap { source, target, components })
    }

    /// Values without the target-domain check, as used for boundary data.
    pub fn eval_raw(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|e| e.eval_real(x)).collect()
    }
}

impl ClosedFormMap for ExprMap {
    fn source(&self) -> &ModelSpace {
        &self.source
    }

    fn target(&self) -> &ModelSpace {
        &self.target
    }

    fn eval(&self, p: &ChartPoint) -> Result<ChartPoint, MapError> {
        checked(&self.target, self.eval_raw(p.as_slice()))
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self.components.iter().map(|e| e.to_string()).collect();
        format!("({})", parts.join(", "))
    }
}

/// One complex expression in `z1, ..., zn` per complex target coordinate.
#[derive(Clone, Debug)]
pub struct HolomorphicMap {
    source: ModelSpace,
    target: ModelSpace,
    components: Vec<Expr>,
}

impl HolomorphicMap {
    pub fn new<S: AsRef<str>>(source: ModelSpace, target: ModelSpace, components: &[S]) -> Result<Self, MapError> {
        for s in [&source, &target] {
            if s.real_dim() % 2 != 0 {
                return Err(MapError::NotComplex(s.to_string()));
            }
        }
        let m = target.real_dim() / 2;
        if components.len() != m {
            return Err(MapError::ComponentCount { space: target.to_string(), expected: m, got: components.len() });
        }
        let vars = Vars::Complex(source.real_dim() / 2);
        let components = components.iter().map(|c| Expr::parse(c.as_ref(), vars)).collect::<Result<_, _>>()?;
        Ok(HolomorphicMap { source, target, components })
    }

    pub fn eval_raw(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.components.iter().map(|e| e.eval_complex(z)).collect()
    }
}

impl ClosedFormMap for HolomorphicMap {
    fn source(&self) -> &ModelSpace {
        &self.source
    }

    fn target(&self) -> &ModelSpace {
        &self.target
    }

    fn eval(&self, p: &ChartPoint) -> Result<ChartPoint, MapError> {
        let w = self.eval_raw(&p.to_complex());
        checked(&self.target, w.iter().flat_map(|c| [c.re, c.im]).collect())
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self.components.iter().map(|e| e.to_string()).collect();
        format!("({})", parts.join(", "))
    }
}

/// Central-difference Jacobian of `f` at `p`, one column per source coordinate.
pub fn jacobian_fd(f: &dyn ClosedFormMap, p: &ChartPoint, step: f64) -> Result<DMatrix<f64>, MapError> {
    let d = f.source().real_dim();
    let m = f.target().real_dim();
    let mut jac = DMatrix::zeros(m, d);
    for i in 0..d {
        let mut e = DVector::zeros(d);
        e[i] = step;
        let plus = f.eval(&p.offset(&e)?)?;
        let minus = f.eval(&p.offset(&(-e))?)?;
        let col = (plus.coords() - minus.coords()) / (2.0 * step);
        jac.set_column(i, &col);
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expression_maps() {
        let f = ExprMap::new(ModelSpace::euclidean_real(2), ModelSpace::euclidean_real(1), &["x*y"]).unwrap();
        let p = ChartPoint::new(vec![2.0, -3.0]).unwrap();
        assert_eq!(f.eval(&p).unwrap().as_slice(), &[-6.0]);
        assert!(ExprMap::new(ModelSpace::euclidean_real(2), ModelSpace::euclidean_real(2), &["x"]).is_err());
    }

    #[test]
    fn holomorphic_maps_and_domains() {
        let f = HolomorphicMap::new(ModelSpace::euclidean_complex(1), ModelSpace::ball(1), &["z^2"]).unwrap();
        let inside = ChartPoint::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(f.eval(&inside).unwrap().as_slice(), &[0.0, 0.5]);
        let outside = ChartPoint::new(vec![1.5, 0.0]).unwrap();
        assert!(matches!(f.eval(&outside), Err(MapError::OutsideTarget { .. })));
        assert!(HolomorphicMap::new(ModelSpace::euclidean_real(3), ModelSpace::ball(1), &["z"]).is_err());
    }

    #[test]
    fn jacobian_of_square() {
        let f = HolomorphicMap::new(ModelSpace::euclidean_complex(1), ModelSpace::euclidean_complex(1), &["z^2"]).unwrap();
        let p = ChartPoint::new(vec![1.0, 2.0]).unwrap();
        let j = jacobian_fd(&f, &p, 1e-5).unwrap();
        // 2z = 2 + 4i as a real 2x2 block
        let want = DMatrix::from_row_slice(2, 2, &[2.0, -4.0, 4.0, 2.0]);
        assert!((j - want).amax() < 1e-8);
    }
}
