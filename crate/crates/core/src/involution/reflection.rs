use crate::geometry::{ChartPoint, ModelSpace, SpaceKind, Tangent};

use super::{FixedSet, HolomorphySign, Involution, InvolutionError};

/// Sign flip of a subset of chart coordinates.
#[derive(Clone, Debug)]
pub struct CoordinateReflection {
    space: ModelSpace,
    name: String,
    flipped: Vec<bool>,
    holomorphy: HolomorphySign,
    fixed: FixedSet,
    congruent_duplicate: bool,
}

impl CoordinateReflection {
    fn build(
        space: ModelSpace,
        name: String,
        flipped_coords: Vec<usize>,
        holomorphy: HolomorphySign,
    ) -> Self {
        let dim = space.real_dim();
        let mut flipped = vec![false; dim];
        for &i in &flipped_coords {
            flipped[i] = true;
        }
        CoordinateReflection {
            space,
            name,
            flipped,
            holomorphy,
            fixed: FixedSet::new(dim, flipped_coords),
            congruent_duplicate: false,
        }
    }

    pub fn flipped(&self) -> &[bool] {
        &self.flipped
    }

    /// Set for `sigma_q` with `q > [n/2]`, whose fixed set is congruent to
    /// the one for `n - q`.
    pub fn is_congruent_duplicate(&self) -> bool {
        self.congruent_duplicate
    }

    fn flip(&self, v: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
        let mut out = v.clone();
        for (i, &f) in self.flipped.iter().enumerate() {
            if f {
                out[i] = -out[i];
            }
        }
        out
    }
}

impl Involution for CoordinateReflection {
    fn space(&self) -> &ModelSpace {
        &self.space
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn apply(&self, p: &ChartPoint) -> ChartPoint {
        ChartPoint::from_vector(self.flip(p.coords())).expect("sign flips keep entries finite")
    }

    fn differential(&self, _p: &ChartPoint, v: &Tangent) -> Tangent {
        self.flip(v)
    }

    fn holomorphy(&self) -> HolomorphySign {
        self.holomorphy
    }

    fn fixed_set(&self) -> &FixedSet {
        &self.fixed
    }

    fn is_linear(&self) -> bool {
        true
    }
}

/// `sigma_q (X1; X2) = (-p_b(X1) + p_e(X1); p_b(X2) - p_e(X2))` on the
/// `R^{2 x n}` domain.
///
/// The map is accepted for `0 <= q <= n`; the fixed sets are the real forms
/// only for `q <= [n/2]`, larger `q` are flagged as congruent duplicates.
pub fn make_sigma_q(n: usize, q: usize) -> Result<CoordinateReflection, InvolutionError> {
    if n == 0 {
        return Err(InvolutionError::InvalidQ { q, n, reason: "n must be at least 1" });
    }
    if q > n {
        return Err(InvolutionError::InvalidQ { q, n, reason: "need 0 <= q <= n" });
    }
    let space = ModelSpace::bdi(n);
    // coordinates: X1 = 0..n, X2 = n..2n
    let flipped: Vec<usize> = (0..q).chain(n + q..2 * n).collect();
    let mut r = CoordinateReflection::build(
        space,
        format!("sigma_{q} on {space}"),
        flipped,
        HolomorphySign::AntiHolomorphic,
    );
    r.congruent_duplicate = q > n / 2;
    Ok(r)
}

/// `tau_q(zeta) = -p_b(chi) + p_e(chi) + i (p_b(v) - p_e(v))` on a
/// hyperquadric chart, `zeta = chi + i v`.
pub fn make_tau_q(
    n: usize,
    q: usize,
    branch: crate::geometry::Branch,
) -> Result<CoordinateReflection, InvolutionError> {
    if n == 0 || q == 0 || q > n {
        return Err(InvolutionError::InvalidQ { q, n, reason: "need 1 <= q <= n" });
    }
    let space = ModelSpace::quadric(n, branch);
    // Re zeta^j for j < q, Im zeta^j for j >= q (0-based)
    let flipped: Vec<usize> = (0..n).map(|j| if j < q { 2 * j } else { 2 * j + 1 }).collect();
    Ok(CoordinateReflection::build(
        space,
        format!("tau_{q} on {space}"),
        flipped,
        HolomorphySign::AntiHolomorphic,
    ))
}

/// Coordinatewise complex conjugation `z -> conj(z)`.
pub fn make_conjugation(space: ModelSpace) -> Result<CoordinateReflection, InvolutionError> {
    match space.kind() {
        SpaceKind::EuclideanComplex(_)
        | SpaceKind::ComplexHyperbolicBall(_)
        | SpaceKind::ComplexProjective(_) => {}
        _ => return Err(InvolutionError::UnsupportedSpace(space.to_string())),
    }
    let flipped = (0..space.n()).map(|k| 2 * k + 1).collect();
    Ok(CoordinateReflection::build(
        space,
        format!("conjugation on {space}"),
        flipped,
        HolomorphySign::AntiHolomorphic,
    ))
}

/// Reflection `x_i -> -x_i` for the listed coordinates, e.g. `y -> -y` on
/// `R^2` or `t -> -t` on `R`.
pub fn make_reflection(
    space: ModelSpace,
    coords: &[usize],
) -> Result<CoordinateReflection, InvolutionError> {
    let dim = space.real_dim();
    if let Some(&bad) = coords.iter().find(|&&i| i >= dim) {
        return Err(InvolutionError::IndexOutOfRange { q: bad, n: dim });
    }
    let list = coords.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    Ok(CoordinateReflection::build(
        space,
        format!("reflection[{list}] on {space}"),
        coords.to_vec(),
        HolomorphySign::NotApplicable,
    ))
}
