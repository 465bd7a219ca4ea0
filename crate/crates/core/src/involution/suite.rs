//! Batch checks of the `sigma_q` and `tau_q` families over all admissible
//! parameters up to a given `n`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geometry::{Branch, ChartPoint, Tangent};
use crate::report::{ReportBuilder, VerificationReport};

use super::{
    make_sigma_q, make_tau_q, projection_begin, projection_end, verify_involution, Involution,
    InvolutionTolerances, PerturbedInvolution,
};

enum Family {
    Sigma,
    Tau,
}

struct Case {
    family: Family,
    inv: Box<dyn Involution>,
}

/// `sigma_q` for `0 <= q <= n` and `tau_q` for `1 <= q <= n` on both chart
/// branches, for every `1 <= n <= n_max`. A non-zero `fault` shifts every
/// image along the first coordinate.
fn cases(n_max: usize, fault: f64) -> Vec<Case> {
    let wrap = |inv: super::CoordinateReflection| -> Box<dyn Involution> {
        if fault == 0.0 {
            Box::new(inv)
        } else {
            Box::new(PerturbedInvolution { inner: inv, delta: fault, coord: 0 })
        }
    };
    let mut out = Vec::new();
    for n in 1..=n_max {
        for q in 0..=n {
            out.push(Case { family: Family::Sigma, inv: wrap(make_sigma_q(n, q).expect("admissible q")) });
        }
        for branch in [Branch::V1, Branch::V2] {
            for q in 1..=n {
                out.push(Case { family: Family::Tau, inv: wrap(make_tau_q(n, q, branch).expect("admissible q")) });
            }
        }
    }
    out
}

/// Multiplication by `i` on interleaved complex coordinates.
fn times_i(v: &Tangent) -> Tangent {
    let mut out = v.clone();
    for k in 0..v.len() / 2 {
        out[2 * k] = -v[2 * k + 1];
        out[2 * k + 1] = v[2 * k];
    }
    out
}

/// Exact identities on `samples` random points per case, all with
/// tolerance 0:
/// - `sigma_involutive`, `tau_involutive`: `s(s(p)) = p`
/// - `sigma_anticommutes_j`: `sigma(J0 v) = -J0 sigma(v)`
/// - `tau_antilinear`: `tau(i zeta) = -i tau(zeta)`
/// - `projections`: `p_b(x, q) + p_e(x, q) = x` for `x` in `R^n`
pub fn algebraic_identity_suite<R: Rng + ?Sized>(
    n_max: usize,
    samples: usize,
    fault: f64,
    rng: &mut R,
) -> VerificationReport {
    let mut b = ReportBuilder::new(format!("algebraic_identities[n <= {n_max}]"));
    b.headline("sigma_involutive");
    let all = cases(n_max, fault);
    for case in &all {
        let inv = case.inv.as_ref();
        let space = *inv.space();
        for _ in 0..samples {
            let p = space.sample_point(rng);
            let back = inv.apply(&inv.apply(&p)).distance(&p);
            let v = p.coords().clone();
            match case.family {
                Family::Sigma => {
                    b.record("sigma_involutive", 0.0, back);
                    let lhs = inv.apply(&point(space.complex_structure_unchecked(&v)));
                    let rhs = space.complex_structure_unchecked(inv.apply(&p).coords());
                    b.record("sigma_anticommutes_j", 0.0, (lhs.coords() + rhs).amax());
                }
                Family::Tau => {
                    b.record("tau_involutive", 0.0, back);
                    let lhs = inv.apply(&point(times_i(&v)));
                    let rhs = times_i(inv.apply(&p).coords());
                    b.record("tau_antilinear", 0.0, (lhs.coords() + rhs).amax());
                }
            }
        }
    }
    for n in 1..=n_max {
        for q in 0..=n {
            for _ in 0..samples {
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let pb = projection_begin(&x, q).expect("q <= n");
                let pe = projection_end(&x, q).expect("q <= n");
                let d = x.iter().zip(pb.iter().zip(&pe)).map(|(a, (u, v))| (u + v - a).abs()).fold(0.0, f64::max);
                b.record("projections", 0.0, d);
            }
        }
    }
    b.note(format!("{} involutions, {samples} samples each", all.len()));
    b.finish()
}

fn point(v: Tangent) -> ChartPoint {
    ChartPoint::from_vector(v).expect("finite")
}

/// [`verify_involution`] for every case, `samples` points each: fixed sets
/// against the defining equations, differential eigenvalues and their
/// multiplicities, holomorphy sign and, where a metric exists, isometry.
/// Cases run in parallel, each from its own seed derived from `seed`.
pub fn fixed_set_suite(n_max: usize, samples: usize, fault: f64, seed: u64) -> VerificationReport {
    let all = cases(n_max, fault);
    let tol = InvolutionTolerances::default();
    let reports: Vec<VerificationReport> = all
        .par_iter()
        .enumerate()
        .map(|(i, case)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            verify_involution(case.inv.as_ref(), samples, &tol, &mut rng)
        })
        .collect();
    let mut b = ReportBuilder::new(format!("fixed_sets[n <= {n_max}]"));
    b.headline("fixed_set");
    for r in reports {
        for (name, stat) in &r.residuals {
            b.residual(name, stat.tolerance).merge(stat);
        }
        for (name, &holds) in &r.hypotheses {
            b.hypothesis(name, holds);
        }
    }
    b.note(format!("{} involutions, {samples} samples each", all.len()));
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    #[test]
    fn small_suites_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = algebraic_identity_suite(3, 5, 0.0, &mut rng);
        assert_eq!(r.conclusion, Status::Pass, "{r:?}");
        assert!(r.residuals.values().all(|s| s.max == 0.0 && s.count > 0));
        let f = fixed_set_suite(3, 20, 0.0, 1);
        assert_eq!(f.conclusion, Status::Pass, "{f:?}");
    }

    #[test]
    fn faults_are_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = algebraic_identity_suite(2, 3, 1e-3, &mut rng);
        assert_eq!(r.conclusion, Status::Fail);
        assert!(r.max_of("sigma_involutive") >= 1e-3);
        let f = fixed_set_suite(2, 10, 1e-3, 1);
        assert_ne!(f.conclusion, Status::Pass);
    }
}
