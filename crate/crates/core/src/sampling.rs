//! Sampling of projective toric varieties and of complexes `Z(S, w)` through
//! the inverse moment map.
//!
//! Every sample is produced by choosing a moment target `u` and solving for
//! the unique point of `w.Z_F` over it, so clouds of different complexes can
//! be sampled at matching moments. Random targets come from per-facet
//! streams `(seed, facet index)`, which keeps parallel runs reproducible.

use rand::Rng;
use rayon::prelude::*;

use crate::birch::birch_inverse;
use crate::config::{LabelSet, PointConfig, Weights};
use crate::error::Result;
use crate::hausdorff::{PointCloud, Provenance};
use crate::linalg::{simplex_volume, Vector};
use crate::rng;
use crate::secondary::generic_triangulation;
use crate::subdivision::Subdivision;

/// The complex `Z(S, w) = ∪_{F∈S} w.Z_F`.
#[derive(Debug, Clone)]
pub struct ToricComplex {
    pub subdivision: Subdivision,
    pub weights: Weights,
}

impl ToricComplex {
    pub fn new(a: &PointConfig, subdivision: Subdivision, weights: Weights) -> Result<Self> {
        a.check_weights(&weights)?;
        Ok(Self {
            subdivision,
            weights,
        })
    }
}

/// Vertices and barycenters of all faces of `conv(F)`.
pub fn skeleton_targets(a: &PointConfig, labels: &[usize]) -> Result<Vec<Vector>> {
    let sub = a.restrict(labels)?;
    let mut out = Vec::new();
    for f in sub.hull_faces()? {
        let c = f
            .members
            .iter()
            .fold(Vector::zeros(a.ambient()), |acc, &m| acc + sub.point(m));
        out.push(c / f.members.len() as f64);
    }
    Ok(out)
}

/// `n` uniform random points of `conv(F)`.
pub fn uniform_targets<R: Rng>(
    a: &PointConfig,
    labels: &[usize],
    n: usize,
    r: &mut R,
) -> Result<Vec<Vector>> {
    let sub = a.restrict(labels)?;
    if sub.dim() == 0 {
        return Ok(vec![sub.point(0).clone(); n]);
    }
    let t = generic_triangulation(&sub)?;
    let y = sub.affine_coords();
    let vols: Vec<f64> = t
        .facets()
        .iter()
        .map(|f| simplex_volume(&f.iter().map(|&i| y[i].clone()).collect::<Vec<_>>()))
        .collect();
    let total: f64 = vols.iter().sum();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut pick = r.random_range(0.0..total);
        let mut idx = vols.len() - 1;
        for (i, v) in vols.iter().enumerate() {
            if pick < *v {
                idx = i;
                break;
            }
            pick -= v;
        }
        let f = &t.facets()[idx];
        let c = rng::simplex_weights(r, f.len());
        out.push(
            f.iter()
                .zip(&c)
                .fold(Vector::zeros(a.ambient()), |acc, (&i, x)| {
                    acc + sub.point(i) * *x
                }),
        );
    }
    Ok(out)
}

/// Solves for the point of `w.Z_F` over each target, embedded in `Δ^A`.
pub fn lift_targets(
    a: &PointConfig,
    labels: &[usize],
    w: &Weights,
    targets: &[Vector],
) -> Result<Vec<Vector>> {
    let sub = a.restrict(labels)?;
    let wf = Vector::from_fn(labels.len(), |i, _| w[labels[i]]);
    targets
        .iter()
        .map(|u| {
            let sol = birch_inverse(&sub, &wf, u)?;
            let mut z = Vector::zeros(a.len());
            for (j, &i) in labels.iter().enumerate() {
                z[i] = sol.z[j];
            }
            Ok(z)
        })
        .collect()
}

/// Samples `Z(S, w)`: for each facet, its skeleton plus `n` uniform moment
/// targets, each lifted through the inverse moment map on that facet.
pub fn sample_complex(
    a: &PointConfig,
    cx: &ToricComplex,
    n: usize,
    seed: u64,
) -> Result<PointCloud> {
    let facets = cx.subdivision.facets();
    let parts: Vec<Vec<Vector>> = facets
        .par_iter()
        .enumerate()
        .map(|(j, f)| {
            let mut r = rng::stream(seed, j as u64);
            let mut targets = skeleton_targets(a, f)?;
            targets.extend(uniform_targets(a, f, n, &mut r)?);
            lift_targets(a, f, &cx.weights, &targets)
        })
        .collect::<Result<Vec<_>>>()?;
    PointCloud::new(
        parts.into_iter().flatten().collect(),
        Provenance {
            weights: cx.weights.iter().copied().collect(),
            facets: facets.to_vec(),
            seed,
            density: n,
        },
    )
}

/// Samples `w.Z_A` itself (the trivial complex).
pub fn sample_variety(a: &PointConfig, w: &Weights, n: usize, seed: u64) -> Result<PointCloud> {
    let all: LabelSet = (0..a.len()).collect();
    let cx = ToricComplex {
        subdivision: Subdivision::from_faces([all].into_iter().collect()),
        weights: w.clone(),
    };
    sample_complex(a, &cx, n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::{is_member_projective, support_face, AffinePoint, ProjPoint};
    use crate::hausdorff::hausdorff_distance;
    use crate::linalg::vector;
    use crate::subdivision::regular_subdivision;

    fn line() -> PointConfig {
        PointConfig::from_points(vec![vector(&[0.0]), vector(&[1.0]), vector(&[2.0])], false)
            .unwrap()
    }

    #[test]
    fn skeleton_samples_are_members() {
        let a = PointConfig::from_points(
            vec![
                vector(&[0.0, 0.0]),
                vector(&[2.0, 0.0]),
                vector(&[0.0, 2.0]),
                vector(&[1.0, 1.5]),
            ],
            false,
        )
        .unwrap();
        let w = vector(&[1.0, 1.0, 1.0, 1.0]);
        let c = sample_variety(&a, &w, 0, 0).unwrap();
        assert!(c.in_simplex(1e-12));
        for p in c.points() {
            assert!(is_member_projective(&a, &ProjPoint { coords: p.clone() }));
        }
    }

    #[test]
    fn two_segment_complex_supports() {
        let a = line();
        let s = regular_subdivision(&a, &vector(&[0.0, -1.0, 0.0])).unwrap();
        let cx = ToricComplex::new(&a, s, vector(&[1.0, 1.0, 1.0])).unwrap();
        let c = sample_complex(&a, &cx, 20, 3).unwrap();
        for p in c.points() {
            let f = support_face(&a, &AffinePoint { coords: p.clone() })
                .unwrap_or_else(|_| (0..3).filter(|&i| p[i] > 1e-9).collect());
            assert!(f.iter().all(|i| [0, 1].contains(i)) || f.iter().all(|i| [1, 2].contains(i)));
        }
    }

    #[test]
    fn sampling_is_deterministic_and_refines() {
        let a = PointConfig::from_points(
            vec![
                vector(&[0.0, 0.0]),
                vector(&[2.0, 0.0]),
                vector(&[0.0, 2.0]),
                vector(&[2.0, 2.0]),
            ],
            false,
        )
        .unwrap();
        let w = vector(&[1.0, 2.0, 1.0, 0.5]);
        let c1 = sample_variety(&a, &w, 50, 9).unwrap();
        assert_eq!(c1, sample_variety(&a, &w, 50, 9).unwrap());
        let reference = sample_variety(&a, &w, 3000, 1).unwrap();
        let d_small =
            hausdorff_distance(&sample_variety(&a, &w, 20, 2).unwrap(), &reference).unwrap();
        let d_large =
            hausdorff_distance(&sample_variety(&a, &w, 800, 2).unwrap(), &reference).unwrap();
        assert!(d_large < d_small);
    }
}
