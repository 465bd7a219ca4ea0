use std::sync::Arc;

use crate::geometry::{ChartPoint, ModelSpace};
use crate::involution::Involution;
use crate::report::{DataTable, ReportBuilder, VerificationReport};
use crate::solver::{laplace_beltrami_solve, tension, DiscreteMap, GridDomain, LinearOptions, Region};

use super::HarnessError;

const ON_FIXED_SET: f64 = 1e-12;

pub struct SchwarzExtension {
    /// `h` on the half grid, `sigma2 . h . sigma1` on the mirrored half.
    pub map: DiscreteMap,
    /// Interior nodes of the extended grid on the fixed set of `sigma1`.
    pub seam_nodes: Vec<usize>,
    /// Largest chart norm of the tension at the seam nodes.
    pub seam_tension: f64,
}

/// Axes flipped by a coordinate reflection, or `None` for other involutions.
fn flipped_axes(s: &dyn Involution) -> Option<Vec<usize>> {
    if !s.is_linear() {
        return None;
    }
    let d = s.space().real_dim();
    let mut out = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        let img = s.apply(&ChartPoint::new(e.clone()).ok()?);
        for (j, &v) in img.as_slice().iter().enumerate() {
            let want = if j == i { v.abs() == 1.0 } else { v == 0.0 };
            if !want {
                return None;
            }
        }
        if img[i] == -1.0 {
            out.push(i);
        }
    }
    Some(out)
}

/// Extends a map given on one side of the fixed set of `sigma1` by
/// `sigma2 . h . sigma1`. The half grid must touch the fixed set: every
/// flipped axis has a bound at 0 (or is already symmetric).
pub fn schwarz_extend(
    h_half: &DiscreteMap,
    sigma1: &dyn Involution,
    sigma2: &dyn Involution,
    tol: f64,
) -> Result<SchwarzExtension, HarnessError> {
    let g = h_half.domain();
    if sigma1.space() != g.source() || sigma2.space() != h_half.target() {
        return Err(HarnessError::Invalid("involutions do not act on the source and target of the map".into()));
    }
    let axes = flipped_axes(sigma1)
        .ok_or_else(|| HarnessError::Invalid(format!("{} is not a coordinate reflection", sigma1.name())))?;
    for n in g.active_nodes() {
        if sigma1.fixed_set().defect(&g.coords(n)) <= ON_FIXED_SET {
            let defect = sigma2.fixed_set().defect(&h_half.point(n));
            if !(defect <= tol) {
                return Err(HarnessError::FixedSetValueMismatch { node: n, defect });
            }
        }
    }
    let mut bounds = g.bounds().to_vec();
    let mut res = g.resolution().to_vec();
    for &i in &axes {
        let (lo, hi) = bounds[i];
        if (lo + hi).abs() <= 1e-12 {
            continue;
        } else if lo.abs() <= 1e-12 {
            bounds[i] = (-hi, hi);
        } else if hi.abs() <= 1e-12 {
            bounds[i] = (lo, -lo);
        } else {
            return Err(HarnessError::Invalid(format!("axis {i} does not end on the fixed set")));
        }
        res[i] = 2 * res[i] - 1;
    }
    let region = match g.region() {
        Region::HalfDisk { radius } => Region::Disk { radius },
        r => r,
    };
    let ext = Arc::new(GridDomain::new(*g.source(), bounds, res, region)?);
    let snap = 1e-9 * g.spacing().iter().cloned().fold(f64::INFINITY, f64::min);
    let m = h_half.target_dim();
    let mut values = vec![0.0; ext.len() * m];
    for n in ext.active_nodes() {
        let x = ext.coords(n);
        let direct = g.node_near(x.as_slice(), snap).filter(|&k| g.is_active(k));
        let v = match direct {
            Some(k) => h_half.value(k).to_vec(),
            None => {
                let sx = sigma1.apply(&x);
                let k = g
                    .node_near(sx.as_slice(), snap)
                    .filter(|&k| g.is_active(k))
                    .ok_or(HarnessError::SigmaLeavesDomain { node: n })?;
                sigma2.apply(&h_half.point(k)).as_slice().to_vec()
            }
        };
        values[n * m..(n + 1) * m].copy_from_slice(&v);
    }
    let map = DiscreteMap::from_values(ext.clone(), *h_half.target(), values)?;
    let seam_nodes: Vec<usize> =
        ext.interior_nodes().filter(|&n| sigma1.fixed_set().defect(&ext.coords(n)) <= ON_FIXED_SET).collect();
    let t = tension(&map)?;
    let seam_tension = seam_nodes
        .iter()
        .map(|&n| t.field[n * m..(n + 1) * m].iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    Ok(SchwarzExtension { map, seam_nodes, seam_tension })
}

/// Fourth-order Laplacian of a scalar map on a flat source, at the nodes one
/// spacing away from the hyperplane `x_axis = 0` with all other coordinates
/// in `[-band, band]`. Stencils that leave the active set are skipped.
pub fn seam_residual(h: &DiscreteMap, axis: usize, band: f64) -> f64 {
    let g = h.domain();
    let d = g.dim();
    let m = h.target_dim();
    let hs = g.spacing()[axis];
    let mut worst = 0.0f64;
    'nodes: for n in g.active_nodes() {
        let x = g.coords_vec(n);
        if (x[axis] - hs).abs() > 1e-9 * hs {
            continue;
        }
        if (0..d).any(|j| j != axis && x[j].abs() > band + 1e-12) {
            continue;
        }
        let mut lap = vec![0.0; m];
        for i in 0..d {
            let mut nb = [0usize; 5];
            for (s, slot) in (-2isize..=2).zip(nb.iter_mut()) {
                match g.shift(n, i, s).filter(|&k| g.is_active(k)) {
                    Some(k) => *slot = k,
                    None => continue 'nodes,
                }
            }
            let h2 = g.spacing()[i] * g.spacing()[i];
            for (a, l) in lap.iter_mut().enumerate() {
                let u = |k: usize| h.value(nb[k])[a];
                *l += (-u(0) + 16.0 * u(1) - 30.0 * u(2) + 16.0 * u(3) - u(4)) / (12.0 * h2);
            }
        }
        worst = worst.max(lap.iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    worst
}

/// One refinement level of [`schwarz_convergence_study`].
#[derive(Clone, Debug)]
pub struct SchwarzStudy {
    pub spacing: f64,
    pub seam_residual: f64,
    pub seam_tension: f64,
    pub extension_vs_full: f64,
}

/// Least-squares slope of `ln r` against `ln h`.
fn fitted_order(rows: &[SchwarzStudy]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.spacing.ln(), r.seam_residual.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Classical Schwarz reflection on a flat disk of `radius`: solve on the
/// upper half-disk with data `boundary` (which must vanish on the diameter),
/// extend oddly, and compare with a solve on the full disk. Repeated over
/// `resolutions` to fit the convergence order of [`seam_residual`].
pub fn schwarz_convergence_study<F>(
    id: &str,
    boundary: F,
    radius: f64,
    resolutions: &[usize],
    band: f64,
    min_order: f64,
    tol: f64,
) -> Result<VerificationReport, HarnessError>
where
    F: Fn(&[f64]) -> f64,
{
    if resolutions.len() < 2 {
        return Err(HarnessError::Invalid("a convergence study needs at least two grids".into()));
    }
    let plane = ModelSpace::euclidean_real(2);
    let line = ModelSpace::euclidean_real(1);
    let s1 = crate::involution::make_reflection(plane, &[1])?;
    let s2 = crate::involution::make_reflection(line, &[0])?;
    let mut b = ReportBuilder::new(id);
    b.headline("order_gap");
    let mut table = DataTable::new(&["spacing", "seam_residual", "seam_tension", "extension_vs_full"]);
    let mut rows = Vec::new();
    let opts = LinearOptions { tol, max_iters: None };
    for &res in resolutions {
        let half = Arc::new(GridDomain::centered(plane, radius, res, Region::HalfDisk { radius })?);
        let full = Arc::new(GridDomain::centered(plane, radius, res, Region::Disk { radius })?);
        let u_half = laplace_beltrami_solve(half, &boundary, &opts)?;
        let ext = match schwarz_extend(&u_half.map, &s1, &s2, tol) {
            Ok(e) => e,
            Err(HarnessError::FixedSetValueMismatch { node, defect }) => {
                b.hypothesis("h(B1) in B2", false);
                b.record("diameter_value", tol, defect);
                b.note(format!("boundary data does not vanish on the diameter (node {node}, value {defect:.3e})"));
                return Ok(b.finish());
            }
            Err(e) => return Err(e),
        };
        b.hypothesis("h(B1) in B2", true);
        let u_full = laplace_beltrami_solve(full, &boundary, &opts)?;
        let row = SchwarzStudy {
            spacing: u_half.map.domain().spacing()[0],
            seam_residual: seam_residual(&ext.map, 1, band),
            seam_tension: ext.seam_tension,
            extension_vs_full: ext.map.max_distance(&u_full.map),
        };
        b.record("seam_tension", tol, row.seam_tension);
        b.record("extension_vs_full", tol, row.extension_vs_full);
        table.push(vec![row.spacing, row.seam_residual, row.seam_tension, row.extension_vs_full]);
        rows.push(row);
    }
    let order = fitted_order(&rows);
    b.note(format!("fitted seam-residual order {order:.3} (required >= {min_order})"));
    b.record("order_gap", 0.0, if order.is_nan() { f64::NAN } else { (min_order - order).max(0.0) });
    b.table("convergence", table);
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::involution::make_reflection;
    use crate::report::Status;

    fn half_square(res: usize) -> Arc<GridDomain> {
        Arc::new(GridDomain::new(ModelSpace::euclidean_real(2), vec![(-1.0, 1.0), (0.0, 1.0)], vec![res, res], Region::Box).unwrap())
    }

    #[test]
    fn product_extends_to_itself() {
        let g = half_square(11);
        let r1 = ModelSpace::euclidean_real(1);
        let h = DiscreteMap::from_fn(g, r1, |x| vec![x[0] * x[1]]).unwrap();
        let s1 = make_reflection(ModelSpace::euclidean_real(2), &[1]).unwrap();
        let s2 = make_reflection(r1, &[0]).unwrap();
        let ext = schwarz_extend(&h, &s1, &s2, 1e-12).unwrap();
        let eg = ext.map.domain();
        assert_eq!(eg.resolution(), &[11, 21]);
        for n in eg.active_nodes() {
            let x = eg.coords_vec(n);
            assert!((ext.map.value(n)[0] - x[0] * x[1]).abs() < 1e-15);
        }
        assert!(ext.seam_tension < 1e-12);
        assert_eq!(ext.seam_nodes.len(), 9);
    }

    #[test]
    fn constants_extend_to_constants() {
        let g = half_square(7);
        let r2 = ModelSpace::euclidean_real(2);
        let h = DiscreteMap::constant(g, r2, &[0.3, 0.0]).unwrap();
        let s1 = make_reflection(r2, &[1]).unwrap();
        let s2 = make_reflection(r2, &[1]).unwrap();
        let ext = schwarz_extend(&h, &s1, &s2, 1e-12).unwrap();
        assert!(ext.map.values().chunks(2).all(|v| v == [0.3, 0.0]));
        assert_eq!(ext.seam_tension, 0.0);
    }

    #[test]
    fn values_off_the_target_fixed_set_are_rejected() {
        let g = half_square(7);
        let r1 = ModelSpace::euclidean_real(1);
        let h = DiscreteMap::from_fn(g, r1, |x| vec![x[0] + x[1]]).unwrap();
        let s1 = make_reflection(ModelSpace::euclidean_real(2), &[1]).unwrap();
        let s2 = make_reflection(r1, &[0]).unwrap();
        assert!(matches!(schwarz_extend(&h, &s1, &s2, 1e-12), Err(HarnessError::FixedSetValueMismatch { .. })));
    }

    #[test]
    fn fourth_order_laplacian_is_exact_on_quartics() {
        let g = Arc::new(GridDomain::centered(ModelSpace::euclidean_real(2), 1.0, 21, Region::Box).unwrap());
        // x^4 - 6 x^2 y^2 + y^4 is harmonic
        let h = DiscreteMap::from_fn(g, ModelSpace::euclidean_real(1), |x| {
            vec![x[0].powi(4) - 6.0 * x[0] * x[0] * x[1] * x[1] + x[1].powi(4)]
        })
        .unwrap();
        assert!(seam_residual(&h, 1, 0.5) < 1e-11);
    }

    #[test]
    fn small_study_converges() {
        let r = schwarz_convergence_study("s", |x| x[0].exp() * x[1].sin(), 0.9, &[13, 25], 0.45, 1.9, 1e-9).unwrap();
        assert_eq!(r.conclusion, Status::Pass, "{r:?}");
        let even = schwarz_convergence_study("e", |x| x[0].exp() * x[1].cos(), 0.9, &[13, 25], 0.45, 1.9, 1e-9).unwrap();
        assert_eq!(even.conclusion, Status::NotApplicable);
    }
}
