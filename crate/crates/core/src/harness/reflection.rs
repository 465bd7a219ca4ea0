use std::sync::Arc;

use rand::Rng;

use crate::geometry::ChartPoint;
use crate::involution::Involution;
use crate::maps::{jacobian_fd, ClosedFormMap, MapUnderTest};
use crate::report::{ReportBuilder, VerificationReport};
use crate::solver::{extract_cauchy_data, DiscreteMap};

use super::{normal_condition, HarnessError};

/// Checks `h(sigma1(p)) = sigma2(h(p))` for a map `h` between the spaces of
/// two involutions.
pub struct ReflectionExperiment {
    pub id: String,
    pub sigma1: Arc<dyn Involution>,
    pub sigma2: Arc<dyn Involution>,
    pub map: MapUnderTest,
    /// Tolerance of the identity residual.
    pub tolerance: f64,
    /// Tolerance of the two hypothesis checks.
    pub hypothesis_tol: f64,
    /// Random samples for closed-form maps.
    pub samples: usize,
}

const FD_STEP: f64 = 1e-6;
/// Grid nodes closer than this to the fixed set count as lying on it.
const ON_FIXED_SET: f64 = 1e-12;

pub fn verify_reflection_identity<R: Rng + ?Sized>(
    exp: &ReflectionExperiment,
    rng: &mut R,
) -> Result<VerificationReport, HarnessError> {
    let (s1, s2) = (exp.sigma1.as_ref(), exp.sigma2.as_ref());
    if s1.space() != exp.map.source() || s2.space() != exp.map.target() {
        return Err(HarnessError::Invalid(format!(
            "involutions act on {} and {}, the map goes {} -> {}",
            s1.space(),
            s2.space(),
            exp.map.source(),
            exp.map.target()
        )));
    }
    if !(exp.tolerance > 0.0) {
        return Err(HarnessError::Invalid("tolerance must be positive".into()));
    }
    let mut b = ReportBuilder::new(exp.id.clone());
    b.headline("reflection");
    match &exp.map {
        MapUnderTest::Discrete(h) => discrete(&mut b, h, exp)?,
        MapUnderTest::Closed(f) => closed(&mut b, f.as_ref(), exp, rng)?,
    }
    Ok(b.finish())
}

fn discrete(b: &mut ReportBuilder, h: &DiscreteMap, exp: &ReflectionExperiment) -> Result<(), HarnessError> {
    let (s1, s2) = (exp.sigma1.as_ref(), exp.sigma2.as_ref());
    let g = h.domain();
    let snap = 1e-9 * g.spacing().iter().cloned().fold(f64::INFINITY, f64::min);

    let on_b1: Vec<usize> = g.active_nodes().filter(|&n| s1.fixed_set().defect(&g.coords(n)) <= ON_FIXED_SET).collect();
    let mut in_b2 = 0.0f64;
    for &n in &on_b1 {
        in_b2 = in_b2.max(s2.fixed_set().defect(&h.point(n)));
    }
    b.hypothesis("h(B1) in B2", in_b2 <= exp.hypothesis_tol);
    b.note(format!("max B2 defect of h on {} fixed nodes: {in_b2:.3e}", on_b1.len()));
    let inner: Vec<usize> = on_b1.iter().copied().filter(|&n| g.is_interior(n)).collect();
    if inner.is_empty() {
        b.note("no interior grid node lies on the fixed set of sigma1");
    } else {
        let cd = extract_cauchy_data(h, &inner)?;
        let mut worst = 0.0f64;
        for (k, &n) in cd.nodes.iter().enumerate() {
            worst = worst.max(normal_condition(&cd.jacobians[k], &h.point(n), s1, s2));
        }
        b.hypothesis("normal condition", worst <= exp.hypothesis_tol);
        b.note(format!("max normal-condition defect: {worst:.3e}"));
    }

    let tol = exp.tolerance;
    for n in g.active_nodes() {
        let x = g.coords(n);
        let sx = s1.apply(&x);
        let reflected = match g.node_near(sx.as_slice(), snap).filter(|&m| g.is_active(m)) {
            Some(m) => h.value(m).to_vec(),
            None => h.eval_at(sx.as_slice()).ok_or(HarnessError::SigmaLeavesDomain { node: n })?,
        };
        let lhs = ChartPoint::new(reflected)?;
        let rhs = s2.apply(&h.point(n));
        b.record("reflection", tol, lhs.distance(&rhs));
    }
    Ok(())
}

fn closed<R: Rng + ?Sized>(
    b: &mut ReportBuilder,
    f: &dyn ClosedFormMap,
    exp: &ReflectionExperiment,
    rng: &mut R,
) -> Result<(), HarnessError> {
    let (s1, s2) = (exp.sigma1.as_ref(), exp.sigma2.as_ref());
    let source = f.source();
    let mut in_b2 = 0.0f64;
    let mut normal = 0.0f64;
    let mut identity = Vec::with_capacity(exp.samples);
    for i in 0..exp.samples {
        let p = source.sample_point(rng);
        let q = s1.fixed_set().project_point(&p);
        if source.contains(&q) {
            let hq = f.eval(&q)?;
            in_b2 = in_b2.max(s2.fixed_set().defect(&hq));
            let jac = jacobian_fd(f, &q, FD_STEP)?;
            normal = normal.max(normal_condition(&jac, &hq, s1, s2));
        }
        let sp = s1.apply(&p);
        if !source.contains(&sp) {
            return Err(HarnessError::SigmaLeavesDomain { node: i });
        }
        identity.push(f.eval(&sp)?.distance(&s2.apply(&f.eval(&p)?)));
    }
    b.hypothesis("h(B1) in B2", in_b2 <= exp.hypothesis_tol);
    // finite-difference Jacobians limit this check to about FD_STEP^2
    b.hypothesis("normal condition", normal <= exp.hypothesis_tol.max(1e-6));
    b.note(format!("max B2 defect {in_b2:.3e}, max normal-condition defect {normal:.3e}"));
    b.residual("reflection", exp.tolerance).extend(identity);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ModelSpace;
    use crate::harness::parse_involution;
    use crate::maps::{ExprMap, HolomorphicMap};
    use crate::report::Status;
    use crate::solver::{solve_dirichlet, GridDomain, Region, SolveOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(42)
    }

    #[test]
    fn odd_product_reflects_exactly() {
        let r2 = ModelSpace::euclidean_real(2);
        let r1 = ModelSpace::euclidean_real(1);
        let exp = ReflectionExperiment {
            id: "xy".into(),
            sigma1: parse_involution("reflect:1", &r2).unwrap(),
            sigma2: parse_involution("negate", &r1).unwrap(),
            map: MapUnderTest::Closed(Box::new(ExprMap::new(r2, r1, &["x*y"]).unwrap())),
            tolerance: 1e-12,
            hypothesis_tol: 1e-10,
            samples: 200,
        };
        let r = verify_reflection_identity(&exp, &mut rng()).unwrap();
        assert_eq!(r.conclusion, Status::Pass);
        assert_eq!(r.max_of("reflection"), 0.0);
    }

    #[test]
    fn square_commutes_with_conjugation() {
        let c = ModelSpace::euclidean_complex(1);
        let conj = parse_involution("conjugation", &c).unwrap();
        let exp = ReflectionExperiment {
            id: "z2".into(),
            sigma1: conj.clone(),
            sigma2: conj,
            map: MapUnderTest::Closed(Box::new(HolomorphicMap::new(c, c, &["z^2"]).unwrap())),
            tolerance: 1e-12,
            hypothesis_tol: 1e-10,
            samples: 200,
        };
        let r = verify_reflection_identity(&exp, &mut rng()).unwrap();
        assert_eq!(r.conclusion, Status::Pass);
        assert_eq!(r.max_of("reflection"), 0.0);
    }

    #[test]
    fn non_real_coefficients_are_not_applicable() {
        let c = ModelSpace::euclidean_complex(1);
        let conj = parse_involution("conjugation", &c).unwrap();
        let exp = ReflectionExperiment {
            id: "iz".into(),
            sigma1: conj.clone(),
            sigma2: conj,
            map: MapUnderTest::Closed(Box::new(HolomorphicMap::new(c, c, &["i*z"]).unwrap())),
            tolerance: 1e-12,
            hypothesis_tol: 1e-10,
            samples: 50,
        };
        let r = verify_reflection_identity(&exp, &mut rng()).unwrap();
        assert_eq!(r.conclusion, Status::NotApplicable);
        assert!(r.max_of("reflection") > 1e-3);
    }

    #[test]
    fn solved_disk_map_reflects() {
        let disk = ModelSpace::ball(1);
        let g = Arc::new(GridDomain::centered(disk, 0.9, 17, Region::Disk { radius: 0.9 }).unwrap());
        let p = HolomorphicMap::new(ModelSpace::euclidean_complex(1), disk, &["0.5*z + 0.2*z^2 + 0.1*z^3"]).unwrap();
        let bd = |x: &[f64]| {
            let w = p.eval_raw(&[num_complex::Complex64::new(x[0], x[1])]);
            vec![w[0].re, w[0].im]
        };
        let out = solve_dirichlet(g, disk, bd, &SolveOptions::default()).unwrap();
        let conj = parse_involution("conjugation", &disk).unwrap();
        let exp = ReflectionExperiment {
            id: "disk".into(),
            sigma1: conj.clone(),
            sigma2: conj,
            map: MapUnderTest::Discrete(out.map),
            tolerance: 1e-5,
            hypothesis_tol: 1e-5,
            samples: 0,
        };
        let r = verify_reflection_identity(&exp, &mut rng()).unwrap();
        assert_eq!(r.conclusion, Status::Pass, "{r:?}");
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let r2 = ModelSpace::euclidean_real(2);
        let exp = ReflectionExperiment {
            id: "bad".into(),
            sigma1: parse_involution("reflect:1", &r2).unwrap(),
            sigma2: parse_involution("reflect:1", &r2).unwrap(),
            map: MapUnderTest::Closed(Box::new(ExprMap::new(r2, ModelSpace::euclidean_real(1), &["x"]).unwrap())),
            tolerance: 1e-12,
            hypothesis_tol: 1e-10,
            samples: 5,
        };
        assert!(matches!(verify_reflection_identity(&exp, &mut rng()), Err(HarnessError::Invalid(_))));
    }
}
