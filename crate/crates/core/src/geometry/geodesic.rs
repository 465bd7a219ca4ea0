use nalgebra::DVector;

use super::{ChartPoint, GeometryError, ModelSpace, Tangent};

/// A sampled geodesic `t -> x(t)` with its velocities.
#[derive(Clone, Debug, PartialEq)]
pub struct Geodesic {
    pub times: Vec<f64>,
    pub points: Vec<ChartPoint>,
    pub velocities: Vec<Tangent>,
}

impl Geodesic {
    /// Largest relative deviation of `g(x', x')` from its initial value.
    pub fn speed_drift(&self, space: &ModelSpace) -> Result<f64, GeometryError> {
        let s0 = space.inner(&self.points[0], &self.velocities[0], &self.velocities[0])?;
        let mut worst = 0.0f64;
        for (p, v) in self.points.iter().zip(&self.velocities) {
            let s = space.inner(p, v, v)?;
            worst = worst.max(((s - s0) / s0).abs());
        }
        Ok(worst)
    }

    pub fn end(&self) -> &ChartPoint {
        self.points.last().expect("non-empty trajectory")
    }
}

impl ModelSpace {
    /// Integrates `x'' + Gamma(x', x') = 0` with classical RK4 from `(p, v)`
    /// up to `t_end`. The last step is shortened to land on `t_end`.
    pub fn geodesic_integrate(
        &self,
        p: &ChartPoint,
        v: &Tangent,
        t_end: f64,
        dt: f64,
    ) -> Result<Geodesic, GeometryError> {
        if dt <= 0.0 || !dt.is_finite() || t_end < 0.0 || !t_end.is_finite() {
            return Err(GeometryError::InvalidParameters(format!("dt = {dt}, t_end = {t_end}")));
        }
        self.check_contains(p)?;
        if v.len() != self.real_dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.real_dim(), got: v.len() });
        }
        let mut traj = Geodesic {
            times: vec![0.0],
            points: vec![p.clone()],
            velocities: vec![v.clone()],
        };
        let mut t = 0.0;
        let mut x = p.coords().clone();
        let mut u = v.clone();
        while t < t_end - 1e-15 {
            let h = dt.min(t_end - t);
            match self.rk4_step(&x, &u, h) {
                Some((nx, nu)) => {
                    x = nx;
                    u = nu;
                }
                None => return Err(GeometryError::TrajectoryLeftDomain { partial: Box::new(traj) }),
            }
            t += h;
            traj.times.push(t);
            traj.points.push(ChartPoint::from_vector(x.clone()).expect("checked finite"));
            traj.velocities.push(u.clone());
        }
        Ok(traj)
    }

    fn acceleration(&self, x: &DVector<f64>) -> Option<impl Fn(&DVector<f64>) -> DVector<f64>> {
        let p = ChartPoint::from_vector(x.clone()).ok()?;
        if !self.contains(&p) {
            return None;
        }
        let gamma = self.christoffel_at(&p).ok()?;
        Some(move |u: &DVector<f64>| -gamma.contract(u, u))
    }

    fn rk4_step(
        &self,
        x: &DVector<f64>,
        u: &DVector<f64>,
        h: f64,
    ) -> Option<(DVector<f64>, DVector<f64>)> {
        let a1 = self.acceleration(x)?(u);
        let x2 = x + u * (h / 2.0);
        let u2 = u + &a1 * (h / 2.0);
        let a2 = self.acceleration(&x2)?(&u2);
        let x3 = x + &u2 * (h / 2.0);
        let u3 = u + &a2 * (h / 2.0);
        let a3 = self.acceleration(&x3)?(&u3);
        let x4 = x + &u3 * h;
        let u4 = u + &a3 * h;
        let a4 = self.acceleration(&x4)?(&u4);
        let nx = x + (u + &u2 * 2.0 + &u3 * 2.0 + &u4) * (h / 6.0);
        let nu = u + (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (h / 6.0);
        let p = ChartPoint::from_vector(nx.clone()).ok()?;
        if !self.contains(&p) || nu.iter().any(|c| !c.is_finite()) {
            return None;
        }
        Some((nx, nu))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_geodesic_is_a_line() {
        let s = ModelSpace::euclidean_real(2);
        let g = s
            .geodesic_integrate(&ChartPoint::origin(2), &DVector::from_vec(vec![1.0, 0.0]), 1.0, 0.01)
            .unwrap();
        assert!((g.end()[0] - 1.0).abs() < 1e-12);
        assert_eq!(g.end()[1], 0.0);
        assert!((g.times.last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disk_geodesic_through_origin_stays_real() {
        let s = ModelSpace::ball(1);
        let g = s
            .geodesic_integrate(&ChartPoint::origin(2), &DVector::from_vec(vec![1.0, 0.0]), 2.0, 1e-3)
            .unwrap();
        for p in &g.points {
            assert!(p[1].abs() < 1e-9);
        }
        assert!(g.end()[0] > 0.0 && g.end()[0] < 1.0);
    }

    #[test]
    fn speed_is_conserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for space in [ModelSpace::ball(1), ModelSpace::ball(2), ModelSpace::projective(1), ModelSpace::projective(2)] {
            for _ in 0..5 {
                let p = space.sample_point_within(&mut rng, 0.6);
                let mut v = DVector::from_fn(space.real_dim(), |_, _| rng.random_range(-1.0..1.0));
                let speed = space.inner(&p, &v, &v).unwrap().sqrt();
                v /= speed;
                let g = space.geodesic_integrate(&p, &v, 2.0, 1e-3).unwrap();
                let drift = g.speed_drift(&space).unwrap();
                assert!(drift < 1e-6, "{space}: {drift}");
            }
        }
    }

    #[test]
    fn leaving_the_ball_returns_partial_trajectory() {
        // flat-speed shot at the boundary: the chart speed blows up near |z| = 1
        let s = ModelSpace::ball(1);
        let p = ChartPoint::new(vec![0.999, 0.0]).unwrap();
        let err = s.geodesic_integrate(&p, &DVector::from_vec(vec![1.0, 0.0]), 1.0, 0.05).unwrap_err();
        match err {
            GeometryError::TrajectoryLeftDomain { partial } => assert!(!partial.points.is_empty()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_step() {
        let s = ModelSpace::euclidean_real(1);
        assert!(s
            .geodesic_integrate(&ChartPoint::origin(1), &DVector::from_vec(vec![1.0]), 1.0, 0.0)
            .is_err());
    }
}
