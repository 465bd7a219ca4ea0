use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::report::{ReportBuilder, VerificationReport};

use super::HarnessError;

/// Samples closer than this to a pole are skipped.
pub const POLE_EXCLUSION: f64 = 1e-6;
/// Tolerance on rounding-level identities, relative to `max(1, |f|)`.
const EXACT_TOL: f64 = 1e-12;

/// `p(z) / q(z)` with coefficients in ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
    poles: Option<Vec<Complex64>>,
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn trim(mut c: Vec<Complex64>) -> Vec<Complex64> {
    while c.len() > 1 && c.last() == Some(&Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    c
}

impl RationalFunction {
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self, HarnessError> {
        if num.is_empty() || den.is_empty() {
            return Err(HarnessError::Invalid("numerator and denominator need coefficients".into()));
        }
        if den.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
            return Err(HarnessError::Invalid("denominator is identically zero".into()));
        }
        if num.iter().chain(&den).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(HarnessError::Invalid("coefficients must be finite".into()));
        }
        let den = trim(den);
        let poles = den.iter().all(|c| c.im == 0.0).then(|| real_roots_companion(&den));
        Ok(RationalFunction { num: trim(num), den, poles })
    }

    pub fn real(num: &[f64], den: &[f64]) -> Result<Self, HarnessError> {
        let c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(c(num), c(den))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.num, z) / horner(&self.den, z)
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.num.iter().chain(&self.den).all(|c| c.im == 0.0)
    }

    /// Poles, when the denominator has real coefficients.
    pub fn poles(&self) -> Option<&[Complex64]> {
        self.poles.as_deref()
    }

    pub fn near_pole(&self, z: Complex64) -> bool {
        match &self.poles {
            Some(p) => p.iter().any(|&w| (z - w).norm() < POLE_EXCLUSION),
            None => {
                let scale: f64 = self.den.iter().map(|c| c.norm()).sum();
                horner(&self.den, z).norm() < POLE_EXCLUSION * scale
            }
        }
    }
}

/// Roots of a real polynomial as eigenvalues of its companion matrix.
fn real_roots_companion(c: &[Complex64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = c[d].re;
    let mut m = DMatrix::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -c[i].re / lead;
    }
    m.complex_eigenvalues().iter().cloned().collect()
}

fn relative(d: f64, scale: f64) -> f64 {
    d / scale.max(1.0)
}

/// Checks `f(conj z) = conj f(z)` on random points of the disk of `radius`,
/// after checking that `f` is real on the real axis.
pub fn meromorphic_reflection_check<R: Rng + ?Sized>(
    id: &str,
    f: &RationalFunction,
    samples: usize,
    radius: f64,
    rng: &mut R,
) -> Result<VerificationReport, HarnessError> {
    let mut b = ReportBuilder::new(id);
    b.headline("reflection");
    let mut real_axis = 0.0f64;
    let mut reflection = Vec::with_capacity(samples);
    let mut attempts = 0usize;
    let mut real_done = 0usize;
    while (reflection.len() < samples || real_done < samples) && attempts < 100 * samples.max(1) {
        attempts += 1;
        if real_done < samples {
            let x = Complex64::new(rng.random_range(-radius..radius), 0.0);
            if !f.near_pole(x) {
                let v = f.eval(x);
                real_axis = real_axis.max(relative(v.im.abs(), v.norm()));
                real_done += 1;
            }
        }
        if reflection.len() < samples {
            let r = radius * rng.random::<f64>().sqrt();
            let t = rng.random_range(0.0..std::f64::consts::TAU);
            let z = Complex64::from_polar(r, t);
            if !f.near_pole(z) {
                let v = f.eval(z);
                reflection.push(relative((f.eval(z.conj()) - v.conj()).norm(), v.norm()));
            }
        }
    }
    if reflection.is_empty() || real_done == 0 {
        return Err(HarnessError::AllSamplesNearPoles(POLE_EXCLUSION));
    }
    b.hypothesis("real on the real axis", real_axis <= EXACT_TOL);
    b.note(format!("max relative |Im f(x)| on the real axis: {real_axis:.3e}"));
    b.residual("reflection", EXACT_TOL).extend(reflection);
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reciprocal_at_i() {
        let f = RationalFunction::real(&[1.0], &[0.0, 1.0]).unwrap();
        let i = Complex64::i();
        assert_eq!(f.eval(i.conj()), i);
        assert_eq!(f.eval(i).conj(), i);
        assert_eq!(f.poles().unwrap().len(), 1);
        assert!(f.poles().unwrap()[0].norm() < 1e-15);
    }

    #[test]
    fn real_rational_passes() {
        let f = RationalFunction::real(&[1.0, 0.0, 1.0], &[-2.0, 1.0]).unwrap();
        let r = meromorphic_reflection_check("m", &f, 500, 3.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(r.conclusion, Status::Pass);
        assert!(r.max_of("reflection") < 1e-12);
        assert_eq!(r.residual("reflection").unwrap().count, 500);
        let p = f.poles().unwrap();
        assert!((p[0] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rotation_is_rejected_by_hypothesis() {
        let f = RationalFunction::new(vec![Complex64::new(0.0, 0.0), Complex64::i()], vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert!(!f.has_real_coefficients());
        let r = meromorphic_reflection_check("iz", &f, 200, 2.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(r.conclusion, Status::NotApplicable);
        assert!(r.max_of("reflection") > 100.0 * 1e-12);
    }

    #[test]
    fn bad_inputs() {
        assert!(RationalFunction::real(&[], &[1.0]).is_err());
        assert!(RationalFunction::real(&[1.0], &[0.0, 0.0]).is_err());
        // zero-radius sampling at a pole
        let f = RationalFunction::real(&[1.0], &[0.0, 1.0]).unwrap();
        let e = meromorphic_reflection_check("p", &f, 10, 1e-9, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(matches!(e, Err(HarnessError::AllSamplesNearPoles(_))));
    }
}
