use nalgebra::DMatrix;
use rand::Rng;

use crate::geometry::{ChartPoint, ModelSpace, Tangent};
use crate::report::{ReportBuilder, VerificationReport};

use super::{unit, FixedSet, HolomorphySign, Involution};

#[derive(Clone, Copy, Debug)]
pub struct InvolutionTolerances {
    pub involutivity: f64,
    pub isometry: f64,
    pub holomorphy: f64,
    pub fixed_set: f64,
}

impl Default for InvolutionTolerances {
    fn default() -> Self {
        InvolutionTolerances { involutivity: 1e-12, isometry: 1e-8, holomorphy: 1e-10, fixed_set: 1e-12 }
    }
}

/// Matrix of the differential at `p` in chart coordinates.
pub fn differential_matrix(inv: &dyn Involution, p: &ChartPoint) -> DMatrix<f64> {
    let dim = inv.space().real_dim();
    let mut d = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        d.set_column(j, &inv.differential(p, &unit(dim, j)));
    }
    d
}

/// Checks involutivity, isometry, the holomorphy-sign identity and fixed-set
/// consistency on `samples` random points.
///
/// Residuals:
/// - `involutivity`: `|s(s(p)) - p|`
/// - `isometry`: entrywise `|D^t G(s(p)) D - G(p)|`, relative to `max|G(p)|`
/// - `holomorphy`: `|D J v -/+ J D v|`
/// - `fixed_set`: `|s(q) - q|` at projected points `q`, plus membership
///   disagreements with `s(p) = p`
/// - `eigen`: `|(D - I)(D + I)|` at fixed points, and the mismatch between
///   `rank(D + I)` and the fixed-set dimension
pub fn verify_involution<R: Rng + ?Sized>(
    inv: &dyn Involution,
    samples: usize,
    tol: &InvolutionTolerances,
    rng: &mut R,
) -> VerificationReport {
    let space = *inv.space();
    let mut b = ReportBuilder::new(format!("verify_involution[{}]", inv.name()));
    b.headline("involutivity");
    let fixed = inv.fixed_set();
    let dim = space.real_dim();

    for _ in 0..samples.max(1) {
        let p = space.sample_point(rng);
        let sp = inv.apply(&p);
        b.record("involutivity", tol.involutivity, inv.apply(&sp).distance(&p));
        b.hypothesis("image stays in domain", space.contains(&sp));

        let d = differential_matrix(inv, &p);
        if space.has_metric() && space.contains(&sp) {
            if let (Ok(g), Ok(gs)) = (space.metric_at(&p), space.metric_at(&sp)) {
                let pulled = d.transpose() * gs * &d;
                let scale = g.amax().max(1.0);
                b.record("isometry", tol.isometry, (pulled - &g).amax() / scale);
            }
        }

        if space.is_complex() && inv.holomorphy() != HolomorphySign::NotApplicable {
            let v: Tangent = Tangent::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
            let djv = &d * space.complex_structure_unchecked(&v);
            let jdv = space.complex_structure_unchecked(&(&d * &v));
            let r = match inv.holomorphy() {
                HolomorphySign::AntiHolomorphic => (djv + jdv).amax(),
                _ => (djv - jdv).amax(),
            };
            b.record("holomorphy", tol.holomorphy, r);
        }

        // a generic point is fixed iff it satisfies the membership predicate
        let is_fixed = sp.distance(&p) <= tol.fixed_set;
        let member = fixed.contains(&p, tol.fixed_set);
        b.record("fixed_set", tol.fixed_set, if is_fixed == member { 0.0 } else { 1.0 });

        let q = fixed.project_point(&p);
        if space.contains(&q) {
            check_fixed_point(inv, fixed, &q, tol, &mut b);
        }
    }
    b.record("eigen", tol.fixed_set, 0.0);
    b.finish()
}

fn check_fixed_point(
    inv: &dyn Involution,
    fixed: &FixedSet,
    q: &ChartPoint,
    tol: &InvolutionTolerances,
    b: &mut ReportBuilder,
) {
    b.record("fixed_set", tol.fixed_set, inv.apply(q).distance(q));
    b.record("fixed_set", tol.fixed_set, if fixed.contains(q, tol.fixed_set) { 0.0 } else { 1.0 });

    let dim = q.dim();
    let d = differential_matrix(inv, q);
    let id = DMatrix::<f64>::identity(dim, dim);
    b.record("eigen", tol.fixed_set, ((&d - &id) * (&d + &id)).amax());
    let plus_dim = (&d + &id).rank(1e-9);
    // D^2 = I, so the image of D + I is the +1 eigenspace
    b.record("eigen", tol.fixed_set, (plus_dim as f64 - fixed.dim() as f64).abs());
}

/// Injected-fault control: `s(p) + delta * e_coord`.
pub struct PerturbedInvolution<I: Involution> {
    pub inner: I,
    pub delta: f64,
    pub coord: usize,
}

impl<I: Involution> Involution for PerturbedInvolution<I> {
    fn space(&self) -> &ModelSpace {
        self.inner.space()
    }

    fn name(&self) -> String {
        format!("perturbed {}", self.inner.name())
    }

    fn apply(&self, p: &ChartPoint) -> ChartPoint {
        let mut v = self.inner.apply(p).into_vector();
        v[self.coord] += self.delta;
        ChartPoint::from_vector(v).expect("finite")
    }

    fn differential(&self, p: &ChartPoint, v: &Tangent) -> Tangent {
        self.inner.differential(p, v)
    }

    fn holomorphy(&self) -> HolomorphySign {
        self.inner.holomorphy()
    }

    fn fixed_set(&self) -> &FixedSet {
        self.inner.fixed_set()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Branch;
    use crate::involution::{make_conjugation, make_reflection, make_sigma_q, make_tau_q};
    use crate::report::Status;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn sigma_is_exact() {
        let s = make_sigma_q(3, 1).unwrap();
        let r = verify_involution(&s, 200, &InvolutionTolerances::default(), &mut rng());
        assert_eq!(r.conclusion, Status::Pass);
        for name in ["involutivity", "holomorphy", "fixed_set", "eigen"] {
            assert_eq!(r.max_of(name), 0.0, "{name}");
        }
        assert!(r.residual("isometry").is_none());
    }

    #[test]
    fn conjugation_on_ball_is_an_isometry() {
        let c = make_conjugation(ModelSpace::ball(2)).unwrap();
        let r = verify_involution(&c, 200, &InvolutionTolerances::default(), &mut rng());
        assert_eq!(r.conclusion, Status::Pass);
        assert!(r.max_of("isometry") < 1e-10);
    }

    #[test]
    fn every_registered_involution_passes() {
        let tol = InvolutionTolerances::default();
        let mut g = rng();
        let mut invs: Vec<Box<dyn Involution>> = vec![
            Box::new(make_conjugation(ModelSpace::euclidean_complex(3)).unwrap()),
            Box::new(make_conjugation(ModelSpace::projective(2)).unwrap()),
            Box::new(make_reflection(ModelSpace::euclidean_real(2), &[1]).unwrap()),
        ];
        for n in 1..=4 {
            for q in 0..=n / 2 {
                invs.push(Box::new(make_sigma_q(n, q).unwrap()));
            }
            for q in 1..=n {
                invs.push(Box::new(make_tau_q(n, q, Branch::V2).unwrap()));
            }
        }
        for inv in &invs {
            let r = verify_involution(inv.as_ref(), 50, &tol, &mut g);
            assert_eq!(r.conclusion, Status::Pass, "{}", inv.name());
        }
    }

    #[test]
    fn corrupted_involution_fails() {
        // coordinate 1 of X1 is not flipped by sigma_1 on n = 3
        let s = PerturbedInvolution { inner: make_sigma_q(3, 1).unwrap(), delta: 1e-3, coord: 1 };
        let r = verify_involution(&s, 200, &InvolutionTolerances::default(), &mut rng());
        assert_eq!(r.conclusion, Status::Fail);
        assert!((r.max_of("involutivity") - 2e-3).abs() < 1e-12);
    }
}
