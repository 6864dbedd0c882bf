//! Incremental double-description conversion from an inequality description
//! `{x : E x = 0, A x ≥ 0}` to generators (lineality basis plus extreme rays).
//!
//! The cone is first restricted to `null(E)` and then split into its lineality
//! space and a pointed part living in the row space of `A`. The pointed part is
//! built row by row starting from a simplicial cone; adjacency of rays is
//! decided combinatorially from their tight-constraint sets.

use fixedbitset::FixedBitSet;
use nalgebra::DMatrix;

use crate::linalg::{null_space, Subspace, Vector};

/// Generator description of a polyhedral cone.
#[derive(Debug, Clone)]
pub struct Generators {
    pub lineality: Subspace,
    /// Unit extreme rays, each orthogonal to the lineality space.
    pub rays: Vec<Vector>,
}

/// Converts `{x ∈ R^d : e·x = 0 ∀e ∈ eqs, a·x ≥ 0 ∀a ∈ ineqs}` to generators.
pub fn convert(ambient: usize, eqs: &[Vector], ineqs: &[Vector], eps: f64) -> Generators {
    let w = null_space(eqs, ambient, eps);
    if w.dim() == 0 {
        return Generators {
            lineality: Subspace::zero(ambient),
            rays: Vec::new(),
        };
    }
    let k = w.dim();
    // Rows of A in the coordinates of null(E).
    let rows: Vec<Vector> = ineqs
        .iter()
        .filter_map(|a| {
            let r = w.coords(a);
            let n = r.norm();
            (n > eps).then(|| r / n)
        })
        .collect();
    let row_space = Subspace::span(&rows, k, eps);
    let lin_local = row_space.complement();
    let lineality = lift(&w, &lin_local, ambient);
    let r = row_space.dim();
    if r == 0 {
        return Generators {
            lineality,
            rays: Vec::new(),
        };
    }
    let b: Vec<Vector> = rows
        .iter()
        .filter_map(|a| {
            let y = row_space.coords(a);
            let n = y.norm();
            (n > eps).then(|| y / n)
        })
        .collect();
    let rays_local = pointed_rays(&b, r, eps);
    let to_ambient = w.basis() * row_space.basis();
    let mut rays: Vec<Vector> = Vec::new();
    for y in rays_local {
        let x = &to_ambient * y;
        let n = x.norm();
        if n > eps {
            push_unique(&mut rays, x / n, eps);
        }
    }
    Generators { lineality, rays }
}

fn lift(w: &Subspace, local: &Subspace, ambient: usize) -> Subspace {
    if local.dim() == 0 {
        return Subspace::zero(ambient);
    }
    Subspace::from_orthonormal(w.basis() * local.basis())
}

fn push_unique(rays: &mut Vec<Vector>, x: Vector, eps: f64) {
    let tol = eps.sqrt().min(1e-6).max(10.0 * eps);
    if !rays.iter().any(|y| (y - &x).norm() <= tol) {
        rays.push(x);
    }
}

struct Ray {
    y: Vector,
    tight: FixedBitSet,
}

/// Extreme rays of the pointed cone `{y ∈ R^r : b·y ≥ 0}` where the unit rows
/// `b` have full rank `r`.
fn pointed_rays(rows: &[Vector], r: usize, eps: f64) -> Vec<Vector> {
    let m = rows.len();
    let initial = independent_rows(rows, r);
    let b0 = DMatrix::from_rows(
        &initial
            .iter()
            .map(|&i| rows[i].transpose())
            .collect::<Vec<_>>(),
    );
    let inv = b0
        .try_inverse()
        .expect("greedily pivoted rows are independent");
    let mut processed = FixedBitSet::with_capacity(m);
    for &i in &initial {
        processed.insert(i);
    }
    let mut rays: Vec<Ray> = (0..r)
        .map(|j| {
            let y = inv.column(j).into_owned();
            let y = &y / y.norm();
            Ray {
                tight: tight_set(&y, rows, &processed, eps),
                y,
            }
        })
        .collect();

    for i in 0..m {
        if processed.contains(i) {
            continue;
        }
        let row = &rows[i];
        let vals: Vec<f64> = rays.iter().map(|ray| row.dot(&ray.y)).collect();
        if vals.iter().all(|&s| s >= -eps) {
            processed.insert(i);
            for (ray, &s) in rays.iter_mut().zip(&vals) {
                if s.abs() <= eps {
                    ray.tight.insert(i);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&j| vals[j] > eps).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&j| vals[j] < -eps).collect();
        let mut new_vecs: Vec<Vector> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                if !adjacent(&rays, p, n, r) {
                    continue;
                }
                let y = &rays[n].y * vals[p] - &rays[p].y * vals[n];
                let norm = y.norm();
                if norm > eps {
                    new_vecs.push(y / norm);
                }
            }
        }
        processed.insert(i);
        let mut next: Vec<Vector> = (0..rays.len())
            .filter(|&j| vals[j] >= -eps)
            .map(|j| rays[j].y.clone())
            .collect();
        for y in new_vecs {
            push_unique(&mut next, y, eps);
        }
        rays = next
            .into_iter()
            .map(|y| Ray {
                tight: tight_set(&y, rows, &processed, eps),
                y,
            })
            .collect();
    }
    rays.into_iter().map(|ray| ray.y).collect()
}

fn tight_set(y: &Vector, rows: &[Vector], processed: &FixedBitSet, eps: f64) -> FixedBitSet {
    let mut t = FixedBitSet::with_capacity(rows.len());
    for i in processed.ones() {
        if rows[i].dot(y).abs() <= eps {
            t.insert(i);
        }
    }
    t
}

fn adjacent(rays: &[Ray], p: usize, n: usize, r: usize) -> bool {
    let mut common = rays[p].tight.clone();
    common.intersect_with(&rays[n].tight);
    if common.count_ones(..) + 2 < r {
        return false;
    }
    !rays
        .iter()
        .enumerate()
        .any(|(j, ray)| j != p && j != n && common.is_subset(&ray.tight))
}

/// Greedy pivoting: picks `r` rows that span `R^r`, each time the row with the
/// largest component orthogonal to those already chosen.
fn independent_rows(rows: &[Vector], r: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut ortho: Vec<Vector> = Vec::new();
    while chosen.len() < r {
        let mut best: Option<(usize, f64, Vector)> = None;
        for (i, row) in rows.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut res = row.clone();
            for _ in 0..2 {
                for q in &ortho {
                    let c = q.dot(&res);
                    res -= q * c;
                }
            }
            let n = res.norm();
            if best.as_ref().is_none_or(|(_, bn, _)| n > *bn) {
                best = Some((i, n, res));
            }
        }
        let (i, n, res) = best.expect("rows span the reduced space");
        chosen.push(i);
        ortho.push(res / n);
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    fn has_ray(rays: &[Vector], x: &[f64]) -> bool {
        let x = vector(x);
        let x = &x / x.norm();
        rays.iter().any(|r| (r - &x).norm() < 1e-9)
    }

    #[test]
    fn orthant() {
        let g = convert(2, &[], &[vector(&[1.0, 0.0]), vector(&[0.0, 1.0])], 1e-9);
        assert_eq!(g.lineality.dim(), 0);
        assert_eq!(g.rays.len(), 2);
        assert!(has_ray(&g.rays, &[1.0, 0.0]) && has_ray(&g.rays, &[0.0, 1.0]));
    }

    #[test]
    fn square_pyramid_has_four_rays() {
        // x3 ≥ |x1|, x3 ≥ |x2| in R^3.
        let ineqs = [
            vector(&[1.0, 0.0, 1.0]),
            vector(&[-1.0, 0.0, 1.0]),
            vector(&[0.0, 1.0, 1.0]),
            vector(&[0.0, -1.0, 1.0]),
        ];
        let g = convert(3, &[], &ineqs, 1e-9);
        assert_eq!(g.rays.len(), 4);
        for s in [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0],
            [-1.0, 1.0, 1.0],
            [-1.0, -1.0, 1.0],
        ] {
            assert!(has_ray(&g.rays, &s));
        }
    }

    #[test]
    fn half_plane_has_lineality() {
        let g = convert(2, &[], &[vector(&[0.0, 1.0])], 1e-9);
        assert_eq!(g.lineality.dim(), 1);
        assert_eq!(g.rays.len(), 1);
        assert!(has_ray(&g.rays, &[0.0, 1.0]));
    }

    #[test]
    fn equalities_restrict() {
        let g = convert(
            3,
            &[vector(&[0.0, 0.0, 1.0])],
            &[vector(&[1.0, 0.0, 0.0]), vector(&[0.0, 1.0, 0.0])],
            1e-9,
        );
        assert_eq!(g.rays.len(), 2);
        assert!(has_ray(&g.rays, &[1.0, 0.0, 0.0]));
    }

    #[test]
    fn contradictory_pair_gives_origin() {
        let g = convert(1, &[], &[vector(&[1.0]), vector(&[-1.0])], 1e-9);
        assert_eq!(g.lineality.dim(), 0);
        assert!(g.rays.is_empty());
    }

    #[test]
    fn no_constraints_is_everything() {
        let g = convert(3, &[], &[], 1e-9);
        assert_eq!(g.lineality.dim(), 3);
        assert!(g.rays.is_empty());
    }
}
