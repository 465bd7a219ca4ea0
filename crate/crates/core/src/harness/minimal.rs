use nalgebra::{Matrix2, Vector2, Vector3};
use rand::Rng;

use crate::report::{ReportBuilder, VerificationReport};

use super::HarnessError;

/// Pass tolerance when `rho(p)` is located on the surface in closed form.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
/// Pass tolerance when `rho(p)` is located by nearest-point search.
pub const SEARCH_TOL: f64 = 1e-5;

/// A line through the origin; `rotate` is the rotation by pi about it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    dir: Vector3<f64>,
}

impl Line {
    pub fn new(dir: Vector3<f64>) -> Result<Line, HarnessError> {
        let n = dir.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(HarnessError::Invalid("line direction must be a non-zero finite vector".into()));
        }
        Ok(Line { dir: dir / n })
    }

    /// `x`, `y`, `z`, or a direction `a,b,c`.
    pub fn parse(s: &str) -> Result<Line, HarnessError> {
        match s.trim() {
            "x" => Line::new(Vector3::x()),
            "y" => Line::new(Vector3::y()),
            "z" => Line::new(Vector3::z()),
            other => {
                let v: Vec<f64> = other
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| HarnessError::Invalid(format!("bad line `{other}`")))?;
                if v.len() != 3 {
                    return Err(HarnessError::Invalid(format!("bad line `{other}`")));
                }
                Line::new(Vector3::new(v[0], v[1], v[2]))
            }
        }
    }

    pub fn dir(&self) -> &Vector3<f64> {
        &self.dir
    }

    pub fn rotate(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.dir * (2.0 * p.dot(&self.dir)) - p
    }
}

pub trait ParametricSurface: Send + Sync {
    fn name(&self) -> String;
    fn point(&self, u: f64, v: f64) -> Vector3<f64>;
    /// Parameter box `[(u0, u1), (v0, v1)]`.
    fn param_box(&self) -> [(f64, f64); 2];
    /// Parameters of `line.rotate(point(u, v))` when known in closed form.
    fn reflected_params(&self, _line: &Line, _u: f64, _v: f64) -> Option<(f64, f64)> {
        None
    }
}

/// `(u cos v, u sin v, c v)`.
#[derive(Clone, Copy, Debug)]
pub struct Helicoid {
    pub c: f64,
    pub u_max: f64,
    pub v_max: f64,
}

impl Default for Helicoid {
    fn default() -> Self {
        Helicoid { c: 1.0, u_max: 2.0, v_max: std::f64::consts::PI }
    }
}

impl ParametricSurface for Helicoid {
    fn name(&self) -> String {
        format!("helicoid(c={})", self.c)
    }

    fn point(&self, u: f64, v: f64) -> Vector3<f64> {
        Vector3::new(u * v.cos(), u * v.sin(), self.c * v)
    }

    fn param_box(&self) -> [(f64, f64); 2] {
        [(-self.u_max, self.u_max), (-self.v_max, self.v_max)]
    }

    fn reflected_params(&self, line: &Line, u: f64, v: f64) -> Option<(f64, f64)> {
        if *line.dir() == Vector3::x() {
            Some((u, -v))
        } else if *line.dir() == Vector3::z() {
            Some((-u, v))
        } else {
            None
        }
    }
}

/// `u a + v b` for `(u, v)` in `[-1, 1]^2`.
#[derive(Clone, Copy, Debug)]
pub struct Plane {
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
}

impl ParametricSurface for Plane {
    fn name(&self) -> String {
        format!("plane({:?}, {:?})", self.a.as_slice(), self.b.as_slice())
    }

    fn point(&self, u: f64, v: f64) -> Vector3<f64> {
        self.a * u + self.b * v
    }

    fn param_box(&self) -> [(f64, f64); 2] {
        [(-1.0, 1.0), (-1.0, 1.0)]
    }

    fn reflected_params(&self, line: &Line, u: f64, v: f64) -> Option<(f64, f64)> {
        (self.a == *line.dir() && self.b.dot(line.dir()) == 0.0).then_some((u, -v))
    }
}

/// A surface pushed along its unit normal by `eps sin(u) (1 - cos v) / 2`.
///
/// The bump vanishes on the curve `v = 0`, so a line lying there stays on
/// the surface, and it is even in `v`, which breaks the symmetry
/// `(u, v) -> (u, -v)`.
pub struct BumpedSurface {
    pub inner: Box<dyn ParametricSurface>,
    pub eps: f64,
}

impl ParametricSurface for BumpedSurface {
    fn name(&self) -> String {
        format!("{} + {:e} bump", self.inner.name(), self.eps)
    }

    fn point(&self, u: f64, v: f64) -> Vector3<f64> {
        let h = 1e-6;
        let du = (self.inner.point(u + h, v) - self.inner.point(u - h, v)) / (2.0 * h);
        let dv = (self.inner.point(u, v + h) - self.inner.point(u, v - h)) / (2.0 * h);
        let n = du.cross(&dv).normalize();
        self.inner.point(u, v) + n * (self.eps * u.sin() * (1.0 - v.cos()) / 2.0)
    }

    fn param_box(&self) -> [(f64, f64); 2] {
        self.inner.param_box()
    }
}

const COARSE: usize = 40;

/// Distance from `x` to the surface: coarse parameter scan, then damped
/// Gauss-Newton on `|S(u, v) - x|^2` within the parameter box.
pub fn distance_to_surface(s: &dyn ParametricSurface, x: &Vector3<f64>) -> f64 {
    let [(u0, u1), (v0, v1)] = s.param_box();
    let mut best = (u0, v0, f64::INFINITY);
    for i in 0..=COARSE {
        for j in 0..=COARSE {
            let u = u0 + (u1 - u0) * i as f64 / COARSE as f64;
            let v = v0 + (v1 - v0) * j as f64 / COARSE as f64;
            let d = (s.point(u, v) - x).norm();
            if d < best.2 {
                best = (u, v, d);
            }
        }
    }
    let (mut u, mut v, mut d) = best;
    let h = 1e-7;
    for _ in 0..50 {
        let r = s.point(u, v) - x;
        let ju = (s.point(u + h, v) - s.point(u - h, v)) / (2.0 * h);
        let jv = (s.point(u, v + h) - s.point(u, v - h)) / (2.0 * h);
        let jtj = Matrix2::new(ju.dot(&ju), ju.dot(&jv), jv.dot(&ju), jv.dot(&jv));
        let jtr = Vector2::new(ju.dot(&r), jv.dot(&r));
        let Some(step) = jtj.try_inverse().map(|m| -(m * jtr)) else { break };
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-6 {
            let un = (u + t * step[0]).clamp(u0, u1);
            let vn = (v + t * step[1]).clamp(v0, v1);
            let dn = (s.point(un, vn) - x).norm();
            if dn < d {
                (u, v, d) = (un, vn, dn);
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved || d < 1e-15 {
            break;
        }
    }
    d
}

/// Checks that the rotation by pi about `line` maps the surface to itself,
/// on `samples` random parameter points. The line must lie on the surface.
pub fn minimal_surface_reflection_check<R: Rng + ?Sized>(
    id: &str,
    surface: &dyn ParametricSurface,
    line: &Line,
    samples: usize,
    rng: &mut R,
) -> Result<VerificationReport, HarnessError> {
    let [(u0, u1), (v0, v1)] = surface.param_box();
    let reach = u1.abs().min(u0.abs()).min(1.0);
    let mut off_line = 0.0f64;
    for k in 0..=10 {
        let t = -reach + 2.0 * reach * k as f64 / 10.0;
        off_line = off_line.max(distance_to_surface(surface, &(line.dir() * t)));
    }
    if off_line > CLOSED_FORM_TOL {
        return Err(HarnessError::LineNotOnSurface(off_line));
    }
    let mut b = ReportBuilder::new(id);
    b.note(format!("{} about {:?}", surface.name(), line.dir().as_slice()));
    let mut closed = Vec::new();
    let mut searched = Vec::new();
    for _ in 0..samples {
        let u = rng.random_range(u0..u1);
        let v = rng.random_range(v0..v1);
        let q = line.rotate(&surface.point(u, v));
        match surface.reflected_params(line, u, v) {
            Some((ur, vr)) => closed.push((q - surface.point(ur, vr)).norm()),
            None => searched.push(distance_to_surface(surface, &q)),
        }
    }
    if !closed.is_empty() {
        b.residual("closed_form_distance", CLOSED_FORM_TOL).extend(closed);
        b.headline("closed_form_distance");
    }
    if !searched.is_empty() {
        b.residual("search_distance", SEARCH_TOL).extend(searched);
        b.headline("search_distance");
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(3)
    }

    struct Searched(Helicoid);

    impl ParametricSurface for Searched {
        fn name(&self) -> String {
            self.0.name()
        }
        fn point(&self, u: f64, v: f64) -> Vector3<f64> {
            self.0.point(u, v)
        }
        fn param_box(&self) -> [(f64, f64); 2] {
            self.0.param_box()
        }
    }

    #[test]
    fn helicoid_is_exactly_symmetric() {
        let r = minimal_surface_reflection_check("h", &Helicoid::default(), &Line::parse("x").unwrap(), 1000, &mut rng())
            .unwrap();
        assert_eq!(r.conclusion, Status::Pass);
        assert_eq!(r.max_of("closed_form_distance"), 0.0);
    }

    #[test]
    fn search_agrees_with_closed_form() {
        let r = minimal_surface_reflection_check("h", &Searched(Helicoid::default()), &Line::parse("x").unwrap(), 100, &mut rng())
            .unwrap();
        assert_eq!(r.conclusion, Status::Pass);
        assert!(r.max_of("search_distance") < 1e-9);
    }

    #[test]
    fn plane_through_line() {
        let p = Plane { a: Vector3::x(), b: Vector3::new(0.0, 0.6, 0.8) };
        let r = minimal_surface_reflection_check("p", &p, &Line::parse("x").unwrap(), 200, &mut rng()).unwrap();
        assert_eq!(r.max_of("closed_form_distance"), 0.0);
    }

    #[test]
    fn bump_is_detected() {
        let s = BumpedSurface { inner: Box::new(Helicoid::default()), eps: 1e-3 };
        let r = minimal_surface_reflection_check("b", &s, &Line::parse("x").unwrap(), 300, &mut rng()).unwrap();
        assert_eq!(r.conclusion, Status::Fail);
        let d = r.max_of("search_distance");
        assert!(d > 100.0 * SEARCH_TOL && d < 3e-3, "{d}");
    }

    #[test]
    fn line_off_the_surface() {
        let r = minimal_surface_reflection_check("h", &Helicoid::default(), &Line::parse("y").unwrap(), 10, &mut rng());
        assert!(matches!(r, Err(HarnessError::LineNotOnSurface(_))));
        assert!(Line::parse("0,0,0").is_err());
        assert!(Line::parse("1,2").is_err());
    }
}
