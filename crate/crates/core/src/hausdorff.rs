//! Finite point clouds in `R^A` and their exact Hausdorff distance.

use rayon::prelude::*;

use crate::config::LabelSet;
use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Where a sampled cloud came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub weights: Vec<f64>,
    pub facets: Vec<LabelSet>,
    pub seed: u64,
    pub density: usize,
}

/// A nonempty finite set of points of `R^A`, usually of the simplex `Δ^A`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vector>,
    pub provenance: Provenance,
}

impl PointCloud {
    pub fn new(points: Vec<Vector>, provenance: Provenance) -> Result<Self> {
        let d = points.first().ok_or(Error::Empty("point cloud"))?.len();
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(Error::LabelMismatch(d, p.len()));
        }
        Ok(Self { points, provenance })
    }

    pub fn from_points(points: Vec<Vector>) -> Result<Self> {
        Self::new(points, Provenance::default())
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Whether every point lies in the simplex `Δ^A` up to `eps`.
    pub fn in_simplex(&self, eps: f64) -> bool {
        self.points
            .iter()
            .all(|p| p.iter().all(|&x| x >= -eps) && (p.sum() - 1.0).abs() <= eps)
    }
}

fn directed(p: &[Vector], q: &[Vector]) -> f64 {
    p.par_iter()
        .map(|x| {
            q.iter()
                .map(|y| (x - y).norm_squared())
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
        .sqrt()
}

/// `max(max_{p∈P} min_{q∈Q} |p − q|, max_{q∈Q} min_{p∈P} |p − q|)`.
pub fn hausdorff_distance(p: &PointCloud, q: &PointCloud) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::LabelMismatch(p.dim(), q.dim()));
    }
    Ok(directed(&p.points, &q.points).max(directed(&q.points, &p.points)))
}
