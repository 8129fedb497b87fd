//! Sampled stand-ins for `S_F` and the nearest-point distance oracle.

use kdtree::distance::squared_euclidean;
use kdtree::KdTree;
use rayon::prelude::*;

use crate::error::{check_dim, input, Error, Result};
use crate::spectral::SymPolyMatrix;

/// Grid size above which the resolution is coarsened.
pub const MAX_GRID_POINTS: usize = 1_000_000;
/// Default threshold for counting a grid point as feasible.
pub const DEFAULT_FEAS_TOL: f64 = 1e-9;

/// Points with `f ≤ feas_tol`, indexed for nearest-neighbour queries.
pub struct FeasibleCloud {
    points: Vec<Vec<f64>>,
    tree: Option<KdTree<f64, usize, Vec<f64>>>,
    dim: usize,
    pub feas_tol: f64,
    /// Grid step actually used; `None` for clouds built from arbitrary points.
    pub resolution: Option<f64>,
    /// Number of candidate points examined.
    pub candidates: usize,
}

impl std::fmt::Debug for FeasibleCloud {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FeasibleCloud")
            .field("points", &self.points.len())
            .field("feas_tol", &self.feas_tol)
            .field("resolution", &self.resolution)
            .finish()
    }
}

/// Step that keeps the grid over `[lo, hi]` within `cap` points.
pub fn effective_resolution(lo: &[f64], hi: &[f64], requested: f64, cap: usize) -> f64 {
    let count = |h: f64| -> f64 { lo.iter().zip(hi).map(|(a, b)| ((b - a) / h).floor() + 1.0).product() };
    let mut h = requested;
    while count(h) > cap as f64 {
        h *= 1.25;
    }
    h
}

fn grid_axes(lo: &[f64], hi: &[f64], h: f64) -> Vec<Vec<f64>> {
    lo.iter()
        .zip(hi)
        .map(|(a, b)| {
            let steps = ((b - a) / h).floor() as usize;
            let mut axis: Vec<f64> = (0..=steps).map(|k| a + k as f64 * h).collect();
            if b - axis[steps] > 1e-12 * h {
                axis.push(*b);
            }
            axis
        })
        .collect()
}

impl FeasibleCloud {
    /// Keeps the points of `candidates` that satisfy every `F ⪯ feas_tol`.
    pub fn from_points(fs: &[&SymPolyMatrix], candidates: Vec<Vec<f64>>, feas_tol: f64) -> Result<Self> {
        let Some(first) = fs.first() else {
            return input("feasible cloud needs at least one matrix");
        };
        let dim = first.n();
        for f in fs {
            check_dim(dim, f.n(), "feasible cloud matrices")?;
        }
        let total = candidates.len();
        let keep: Vec<Option<Vec<f64>>> = candidates
            .into_par_iter()
            .map(|x| -> Result<Option<Vec<f64>>> {
                check_dim(dim, x.len(), "feasible cloud candidate")?;
                for f in fs {
                    if !(f.f(&x)? <= feas_tol) {
                        return Ok(None);
                    }
                }
                Ok(Some(x))
            })
            .collect::<Result<_>>()?;
        let points: Vec<Vec<f64>> = keep.into_iter().flatten().collect();
        Self::index(points, dim, feas_tol, None, total)
    }

    /// Grid over `[lo, hi]` with step `resolution`, coarsened to at most
    /// [`MAX_GRID_POINTS`]; the upper bound of each axis is always included.
    pub fn from_grid(fs: &[&SymPolyMatrix], lo: &[f64], hi: &[f64], resolution: f64, feas_tol: f64) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() || lo.iter().zip(hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return input("grid box needs finite bounds lo <= hi of equal length");
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return input(format!("grid resolution must be positive, got {resolution}"));
        }
        let h = effective_resolution(lo, hi, resolution, MAX_GRID_POINTS);
        let axes = grid_axes(lo, hi, h);
        let total: usize = axes.iter().map(Vec::len).product();
        let candidates = (0..total)
            .map(|mut idx| {
                axes.iter()
                    .map(|axis| {
                        let c = axis[idx % axis.len()];
                        idx /= axis.len();
                        c
                    })
                    .collect()
            })
            .collect();
        let mut cloud = Self::from_points(fs, candidates, feas_tol)?;
        cloud.resolution = Some(h);
        Ok(cloud)
    }

    fn index(points: Vec<Vec<f64>>, dim: usize, feas_tol: f64, resolution: Option<f64>, candidates: usize) -> Result<Self> {
        let tree = if points.is_empty() {
            None
        } else {
            let mut t = KdTree::with_capacity(dim, 64);
            for (i, p) in points.iter().enumerate() {
                t.add(p.clone(), i).map_err(|e| Error::Numeric(format!("kd-tree insert failed: {e:?}")))?;
            }
            Some(t)
        };
        Ok(Self { points, tree, dim, feas_tol, resolution, candidates })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// `min_a ‖x − a‖` over the cloud together with the minimizer's index.
    pub fn nearest(&self, x: &[f64]) -> Result<(f64, usize)> {
        check_dim(self.dim, x.len(), "distance query")?;
        let Some(tree) = &self.tree else {
            return Err(Error::FeasibleSampleNotFound(format!(
                "no sampled point with f <= {} among {} candidates",
                self.feas_tol, self.candidates
            )));
        };
        let hits = tree
            .nearest(x, 1, &squared_euclidean)
            .map_err(|e| Error::Numeric(format!("kd-tree query failed: {e:?}")))?;
        let (d2, &idx) = hits.first().ok_or_else(|| Error::Numeric("kd-tree returned no neighbour".into()))?;
        Ok((d2.sqrt(), idx))
    }

    /// Upper bound on `dist(x, S)`; its excess over the true distance is
    /// limited by the resolution inside the sampled box.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        Ok(self.nearest(x)?.0)
    }
}
