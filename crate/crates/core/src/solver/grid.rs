use std::fmt;

use crate::geometry::{ChartPoint, ModelSpace};

use super::SolverError;

/// Part of the bounding box that carries active nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    /// The full box.
    Box,
    /// `|x| <= radius` over all coordinates.
    Disk { radius: f64 },
    /// `|x| <= radius` and `x_1 >= 0` (the second coordinate).
    HalfDisk { radius: f64 },
}

const REGION_SLACK: f64 = 1e-12;

impl Region {
    pub fn contains(&self, x: &[f64]) -> bool {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match *self {
            Region::Box => true,
            Region::Disk { radius } => r2.sqrt() <= radius + REGION_SLACK,
            Region::HalfDisk { radius } => {
                r2.sqrt() <= radius + REGION_SLACK && x.get(1).is_none_or(|&y| y >= -REGION_SLACK)
            }
        }
    }

    pub fn parse(s: &str) -> Option<Region> {
        let s = s.trim();
        if s == "box" {
            return Some(Region::Box);
        }
        let (kind, r) = s.split_once(':')?;
        let radius: f64 = r.parse().ok()?;
        if !(radius > 0.0) {
            return None;
        }
        match kind {
            "disk" => Some(Region::Disk { radius }),
            "half_disk" => Some(Region::HalfDisk { radius }),
            _ => None,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Box => write!(f, "box"),
            Region::Disk { radius } => write!(f, "disk:{radius}"),
            Region::HalfDisk { radius } => write!(f, "half_disk:{radius}"),
        }
    }
}

/// Uniform tensor grid over a chart of the source space. Node indices run
/// with axis 0 fastest.
///
/// A node is active when it lies in the region and in the source domain.
/// An active node is a boundary node when it sits on the edge of the box or
/// has an inactive node among its `3^d` neighbours; the rest are interior.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDomain {
    source: ModelSpace,
    bounds: Vec<(f64, f64)>,
    resolution: Vec<usize>,
    region: Region,
    spacing: Vec<f64>,
    strides: Vec<usize>,
    active: Vec<bool>,
    boundary: Vec<bool>,
    hypersurface: Option<Vec<usize>>,
}

impl GridDomain {
    pub fn new(
        source: ModelSpace,
        bounds: Vec<(f64, f64)>,
        resolution: Vec<usize>,
        region: Region,
    ) -> Result<Self, SolverError> {
        let d = source.real_dim();
        if bounds.len() != d || resolution.len() != d {
            return Err(SolverError::InvalidGrid(format!(
                "source {source} has dimension {d}, got {} bounds and {} resolutions",
                bounds.len(),
                resolution.len()
            )));
        }
        if d > 4 {
            return Err(SolverError::InvalidGrid("source dimension above 4".into()));
        }
        for (&(lo, hi), &r) in bounds.iter().zip(&resolution) {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(SolverError::InvalidGrid(format!("bad bounds [{lo}, {hi}]")));
            }
            if r < 5 {
                return Err(SolverError::InvalidGrid(format!("resolution {r} below 5")));
            }
        }
        let spacing: Vec<f64> =
            bounds.iter().zip(&resolution).map(|(&(lo, hi), &r)| (hi - lo) / (r - 1) as f64).collect();
        let mut strides = vec![1usize; d];
        for i in 1..d {
            strides[i] = strides[i - 1] * resolution[i - 1];
        }
        let total: usize = resolution.iter().product();
        let mut g = GridDomain {
            source,
            bounds,
            resolution,
            region,
            spacing,
            strides,
            active: vec![false; total],
            boundary: vec![false; total],
            hypersurface: None,
        };
        for node in 0..total {
            let x = g.coords_vec(node);
            let p = ChartPoint::new(x.clone()).map_err(|_| SolverError::InvalidGrid("non-finite node".into()))?;
            g.active[node] = region.contains(&x) && source.contains(&p);
        }
        if !g.active.iter().any(|&a| a) {
            return Err(SolverError::InvalidGrid("no node lies in the region".into()));
        }
        for node in 0..total {
            if g.active[node] {
                g.boundary[node] = g.on_box_edge(node) || g.neighbourhood(node).iter().any(|&m| !g.active[m]);
            }
        }
        Ok(g)
    }

    /// Square grid `[-r, r]^d` restricted to `region`.
    pub fn centered(source: ModelSpace, half_width: f64, resolution: usize, region: Region) -> Result<Self, SolverError> {
        let d = source.real_dim();
        Self::new(source, vec![(-half_width, half_width); d], vec![resolution; d], region)
    }

    pub fn with_hypersurface(mut self, nodes: Vec<usize>) -> Self {
        self.hypersurface = Some(nodes);
        self
    }

    pub fn source(&self) -> &ModelSpace {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn is_active(&self, node: usize) -> bool {
        self.active[node]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary[node]
    }

    pub fn is_interior(&self, node: usize) -> bool {
        self.active[node] && !self.boundary[node]
    }

    pub fn active_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&n| self.active[n])
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&n| self.is_interior(n))
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&n| self.boundary[n])
    }

    pub fn hypersurface_nodes(&self) -> Option<&[usize]> {
        self.hypersurface.as_deref()
    }

    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        self.resolution
            .iter()
            .zip(&self.strides)
            .map(|(&r, &s)| (node / s) % r)
            .collect()
    }

    pub fn node_at(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn coords_vec(&self, node: usize) -> Vec<f64> {
        self.multi_index(node)
            .iter()
            .enumerate()
            .map(|(i, &k)| self.bounds[i].0 + k as f64 * self.spacing[i])
            .collect()
    }

    pub fn coords(&self, node: usize) -> ChartPoint {
        ChartPoint::new(self.coords_vec(node)).expect("finite grid coordinates")
    }

    /// Neighbour of `node` shifted by `step` along `axis`, if on the grid.
    pub fn shift(&self, node: usize, axis: usize, step: isize) -> Option<usize> {
        let k = (node / self.strides[axis]) % self.resolution[axis];
        let t = k as isize + step;
        if t < 0 || t >= self.resolution[axis] as isize {
            return None;
        }
        Some((node as isize + step * self.strides[axis] as isize) as usize)
    }

    fn on_box_edge(&self, node: usize) -> bool {
        self.multi_index(node).iter().zip(&self.resolution).any(|(&k, &r)| k == 0 || k + 1 == r)
    }

    /// The `3^d - 1` neighbours of a node that is not on the box edge.
    fn neighbourhood(&self, node: usize) -> Vec<usize> {
        let d = self.dim();
        let mut out = Vec::with_capacity(3usize.pow(d as u32));
        for code in 0..3usize.pow(d as u32) {
            let mut m = node as isize;
            let mut c = code;
            let mut zero = true;
            for i in 0..d {
                let off = (c % 3) as isize - 1;
                c /= 3;
                if off != 0 {
                    zero = false;
                }
                m += off * self.strides[i] as isize;
            }
            if !zero {
                out.push(m as usize);
            }
        }
        out
    }

    /// Grid node closest to `x`, if `x` is within `tol` of it.
    pub fn node_near(&self, x: &[f64], tol: f64) -> Option<usize> {
        let mut idx = Vec::with_capacity(self.dim());
        for (i, &xi) in x.iter().enumerate() {
            let t = (xi - self.bounds[i].0) / self.spacing[i];
            let k = t.round();
            if k < 0.0 || k >= self.resolution[i] as f64 {
                return None;
            }
            if ((k - t) * self.spacing[i]).abs() > tol {
                return None;
            }
            idx.push(k as usize);
        }
        Some(self.node_at(&idx))
    }

    /// Active nodes whose coordinate `axis` equals `value` (within 1e-9).
    pub fn nodes_on_plane(&self, axis: usize, value: f64) -> Vec<usize> {
        self.active_nodes()
            .filter(|&n| (self.coords_vec(n)[axis] - value).abs() <= 1e-9)
            .collect()
    }

    /// Header-style description `lo:hi:res` per axis.
    pub fn describe_axes(&self) -> String {
        self.bounds
            .iter()
            .zip(&self.resolution)
            .map(|(&(lo, hi), r)| format!("{lo}:{hi}:{r}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}
