use rand::Rng;

use crate::chains::{ChainFamily, RecursiveChain};
use crate::involution::Involution;
use crate::maps::{jacobian_fd, ClosedFormMap};
use crate::report::{DataTable, ReportBuilder, VerificationReport};

use super::{normal_condition, HarnessError};

const HYPOTHESIS_TOL: f64 = 1e-10;
/// Finite-difference Jacobians limit the normal-condition check.
const NORMAL_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-6;

/// Checks `f(sigma1(p)) = sigma2(f(p))` level by level along a chain, where
/// `sigma1` is the chain's real form. Before that, `f(B1) in B2` and the
/// normal condition are checked on samples of `B1`.
pub fn verify_recursive_reflection<R: Rng + ?Sized>(
    id: &str,
    chain: &RecursiveChain,
    f: &dyn ClosedFormMap,
    sigma2: &dyn Involution,
    samples: usize,
    tolerance: f64,
    rng: &mut R,
) -> Result<VerificationReport, HarnessError> {
    let sigma1 = chain.real_form();
    let ambient = chain.ambient();
    if f.source() != ambient || f.target() != sigma2.space() {
        return Err(HarnessError::Invalid(format!(
            "map {} -> {} does not fit the chain on {ambient} and {}",
            f.source(),
            f.target(),
            sigma2.space()
        )));
    }
    let mut b = ReportBuilder::new(id);
    b.headline(&format!("reflection_L{}", chain.n()));
    if chain.family() == ChainFamily::ComplexProjective {
        b.note("compact family: exploratory");
    }

    let mut in_b2 = 0.0f64;
    let mut normal = 0.0f64;
    let mut checked = 0usize;
    for _ in 0..samples {
        let q = sigma1.fixed_set().project_point(&ambient.sample_point(rng));
        if !ambient.contains(&q) {
            continue;
        }
        let fq = f.eval(&q)?;
        in_b2 = in_b2.max(sigma2.fixed_set().defect(&fq));
        normal = normal.max(normal_condition(&jacobian_fd(f, &q, FD_STEP)?, &fq, sigma1, sigma2));
        checked += 1;
    }
    b.hypothesis("f(B1) in B2", checked > 0 && in_b2 <= HYPOTHESIS_TOL);
    b.hypothesis("normal condition", checked > 0 && normal <= NORMAL_TOL);
    b.note(format!("{checked} samples of B1: max B2 defect {in_b2:.3e}, max normal-condition defect {normal:.3e}"));

    let mut table = DataTable::new(&["level", "max_residual"]);
    for k in 1..=chain.n() {
        let name = format!("reflection_L{k}");
        let stat = b.residual(&name, tolerance);
        for _ in 0..samples {
            let p = chain.sample_level(k, rng);
            let lhs = f.eval(&sigma1.apply(&p))?;
            let rhs = sigma2.apply(&f.eval(&p)?);
            stat.push(lhs.distance(&rhs));
        }
        let worst = stat.max;
        table.push(vec![k as f64, worst]);
    }
    b.table("levels", table);
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::build_chain;
    use crate::geometry::{Branch, ModelSpace};
    use crate::involution::make_conjugation;
    use crate::maps::HolomorphicMap;
    use crate::report::Status;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(5)
    }

    #[test]
    fn euclidean_polynomial() {
        let chain = build_chain(ChainFamily::Euclidean, 2, None, Branch::V1).unwrap();
        let c1 = ModelSpace::euclidean_complex(1);
        let f = HolomorphicMap::new(*chain.ambient(), c1, &["z1^2 + z2"]).unwrap();
        let s2 = make_conjugation(c1).unwrap();
        let r = verify_recursive_reflection("e", &chain, &f, &s2, 100, 1e-12, &mut rng()).unwrap();
        assert_eq!(r.conclusion, Status::Pass, "{r:?}");
        assert!(r.residuals.values().all(|s| s.max == 0.0));
        assert_eq!(r.tables["levels"].rows.len(), 2);
    }

    #[test]
    fn hyperbolic_coordinate_map() {
        let chain = build_chain(ChainFamily::HermitianHyperbolic, 2, None, Branch::V1).unwrap();
        let disk = ModelSpace::ball(1);
        let f = HolomorphicMap::new(*chain.ambient(), disk, &["z1"]).unwrap();
        let s2 = make_conjugation(disk).unwrap();
        let r = verify_recursive_reflection("h", &chain, &f, &s2, 100, 1e-12, &mut rng()).unwrap();
        assert_eq!(r.conclusion, Status::Pass, "{r:?}");
    }

    #[test]
    fn rotated_coordinate_is_not_applicable() {
        let chain = build_chain(ChainFamily::Euclidean, 2, None, Branch::V1).unwrap();
        let c1 = ModelSpace::euclidean_complex(1);
        let f = HolomorphicMap::new(*chain.ambient(), c1, &["i*z1"]).unwrap();
        let s2 = make_conjugation(c1).unwrap();
        let r = verify_recursive_reflection("c", &chain, &f, &s2, 50, 1e-12, &mut rng()).unwrap();
        assert_eq!(r.conclusion, Status::NotApplicable);
        assert!(!r.hypotheses["f(B1) in B2"]);
        assert!(r.max_of("reflection_L2") > 1e-3);
    }
}
