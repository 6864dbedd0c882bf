//! Dense linear algebra helpers: checked pairings, orthonormal bases,
//! complements and subspace comparisons.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A real vector, used both for cocharacters (the space `N`) and for
/// characters (the dual space `M`).
pub type Vector = DVector<f64>;

/// Builds a vector from a slice.
pub fn vector(coords: &[f64]) -> Vector {
    DVector::from_column_slice(coords)
}

/// The standard pairing `u·v`, rejecting mismatched dimensions.
pub fn pair(u: &Vector, v: &Vector) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(u.dot(v))
}

pub(crate) fn check_dim(v: &Vector, d: usize) -> Result<()> {
    if v.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: v.len(),
        });
    }
    Ok(())
}

/// A linear subspace stored through an orthonormal basis (columns of a
/// `d × k` matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self {
            basis: DMatrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            basis: DMatrix::identity(ambient, ambient),
        }
    }

    /// Span of the given vectors. Vectors are normalized first, so `eps` is a
    /// relative rank threshold.
    pub fn span(vectors: &[Vector], ambient: usize, eps: f64) -> Self {
        let cols: Vec<Vector> = vectors
            .iter()
            .filter_map(|v| {
                let n = v.norm();
                (n > eps).then(|| v / n)
            })
            .collect();
        if cols.is_empty() {
            return Self::zero(ambient);
        }
        let m = DMatrix::from_columns(&cols);
        let svd = m.svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let smax = svd.singular_values.max().max(1.0);
        let keep: Vec<Vector> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, s)| **s > eps * smax)
            .map(|(i, _)| u.column(i).into_owned())
            .collect();
        if keep.is_empty() {
            return Self::zero(ambient);
        }
        Self {
            basis: DMatrix::from_columns(&keep),
        }
    }

    pub fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        Self { basis }
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        (0..self.dim())
            .map(|i| self.basis.column(i).into_owned())
            .collect()
    }

    /// Coordinates of the orthogonal projection in the stored basis.
    pub fn coords(&self, v: &Vector) -> Vector {
        self.basis.tr_mul(v)
    }

    pub fn project(&self, v: &Vector) -> Vector {
        &self.basis * self.basis.tr_mul(v)
    }

    /// Component of `v` orthogonal to the subspace.
    pub fn reject(&self, v: &Vector) -> Vector {
        v - self.project(v)
    }

    pub fn contains(&self, v: &Vector, eps: f64) -> bool {
        self.reject(v).norm() <= eps * v.norm().max(1.0)
    }

    /// Orthogonal complement, computed by Gram-Schmidt over the standard
    /// basis with greedy pivoting.
    pub fn complement(&self) -> Self {
        let d = self.ambient();
        let mut cols: Vec<Vector> = self.basis_vectors();
        let mut out: Vec<Vector> = Vec::new();
        for _ in 0..d.saturating_sub(self.dim()) {
            let mut best: Option<(f64, Vector)> = None;
            for i in 0..d {
                let mut e = Vector::zeros(d);
                e[i] = 1.0;
                for _ in 0..2 {
                    for c in &cols {
                        let p = c.dot(&e);
                        e -= c * p;
                    }
                }
                let n = e.norm();
                if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
                    best = Some((n, e));
                }
            }
            let (n, e) = best.expect("ambient dimension positive");
            let e = e / n;
            cols.push(e.clone());
            out.push(e);
        }
        if out.is_empty() {
            Self::zero(d)
        } else {
            Self {
                basis: DMatrix::from_columns(&out),
            }
        }
    }

    /// Sum of two subspaces.
    pub fn join(&self, other: &Self, eps: f64) -> Self {
        let mut v = self.basis_vectors();
        v.extend(other.basis_vectors());
        Self::span(&v, self.ambient(), eps)
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Two subspaces are equal when their orthogonal projectors agree.
    pub fn same_as(&self, other: &Self, eps: f64) -> bool {
        self.ambient() == other.ambient()
            && self.dim() == other.dim()
            && (self.projector() - other.projector()).amax() <= eps.sqrt().min(1e-6).max(eps)
    }

    pub fn is_subspace_of(&self, other: &Self, eps: f64) -> bool {
        self.basis_vectors()
            .iter()
            .all(|b| other.contains(b, eps.sqrt().min(1e-6).max(eps)))
    }
}

/// Orthonormal basis of `{x : r·x = 0 for all rows r}`.
pub fn null_space(rows: &[Vector], ambient: usize, eps: f64) -> Subspace {
    Subspace::span(rows, ambient, eps).complement()
}

/// Numerical rank of a family of vectors.
pub fn rank(vectors: &[Vector], ambient: usize, eps: f64) -> usize {
    Subspace::span(vectors, ambient, eps).dim()
}

/// Affine hull data of a finite point set: an origin and an orthonormal basis
/// of the direction space.
#[derive(Debug, Clone)]
pub struct AffineFrame {
    pub origin: Vector,
    pub directions: Subspace,
}

impl AffineFrame {
    pub fn of_points(points: &[Vector], ambient: usize, eps: f64) -> Self {
        let origin = if points.is_empty() {
            Vector::zeros(ambient)
        } else {
            points.iter().fold(Vector::zeros(ambient), |acc, p| acc + p) / points.len() as f64
        };
        let scale = points
            .iter()
            .map(|p| (p - &origin).norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        let diffs: Vec<Vector> = points.iter().map(|p| (p - &origin) / scale).collect();
        let directions = Subspace::span(&diffs, ambient, eps);
        Self { origin, directions }
    }

    pub fn dim(&self) -> usize {
        self.directions.dim()
    }

    pub fn coords(&self, p: &Vector) -> Vector {
        self.directions.coords(&(p - &self.origin))
    }

    pub fn point(&self, coords: &Vector) -> Vector {
        &self.origin + self.directions.basis() * coords
    }

    /// Distance from `p` to the affine hull.
    pub fn distance(&self, p: &Vector) -> f64 {
        self.directions.reject(&(p - &self.origin)).norm()
    }
}

/// Largest pairwise distance of a point set.
pub fn diameter(points: &[Vector]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max((p - q).norm());
        }
    }
    d
}

/// Absolute value of the determinant of the `k × k` matrix of edge vectors,
/// divided by `k!`: the `k`-volume of a simplex given in `k`-dimensional
/// coordinates.
pub fn simplex_volume(vertices: &[Vector]) -> f64 {
    let k = vertices.len().saturating_sub(1);
    if k == 0 {
        return 1.0;
    }
    let cols: Vec<Vector> = vertices[1..].iter().map(|v| v - &vertices[0]).collect();
    let m = DMatrix::from_columns(&cols);
    if m.nrows() != k {
        // Gram determinant for simplices embedded in a larger space.
        let g = m.tr_mul(&m);
        return g.determinant().max(0.0).sqrt() / factorial(k);
    }
    m.determinant().abs() / factorial(k)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_checks_dimensions() {
        assert_eq!(
            pair(&vector(&[1.0, 2.0]), &vector(&[3.0, 4.0])).unwrap(),
            11.0
        );
        assert!(matches!(
            pair(&vector(&[1.0]), &vector(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn complement_is_orthogonal() {
        let s = Subspace::span(&[vector(&[1.0, 1.0, 0.0])], 3, 1e-12);
        let c = s.complement();
        assert_eq!(c.dim(), 2);
        for b in c.basis_vectors() {
            assert!(s.coords(&b).norm() < 1e-12);
            assert!((b.norm() - 1.0).abs() < 1e-12);
        }
        assert!(s.join(&c, 1e-12).same_as(&Subspace::full(3), 1e-12));
    }

    #[test]
    fn rank_of_dependent_family() {
        let v = [
            vector(&[1.0, 2.0]),
            vector(&[2.0, 4.0]),
            vector(&[0.0, 0.0]),
        ];
        assert_eq!(rank(&v, 2, 1e-9), 1);
        assert_eq!(null_space(&v, 2, 1e-9).dim(), 1);
    }

    #[test]
    fn simplex_volumes() {
        let tri = [
            vector(&[0.0, 0.0]),
            vector(&[2.0, 0.0]),
            vector(&[0.0, 3.0]),
        ];
        assert!((simplex_volume(&tri) - 3.0).abs() < 1e-12);
        let seg = [vector(&[0.0, 0.0]), vector(&[3.0, 4.0])];
        assert!((simplex_volume(&seg) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn affine_frame_of_collinear_points() {
        let pts = [
            vector(&[0.0, 1.0]),
            vector(&[1.0, 1.0]),
            vector(&[2.0, 1.0]),
        ];
        let f = AffineFrame::of_points(&pts, 2, 1e-9);
        assert_eq!(f.dim(), 1);
        assert!(f.distance(&vector(&[5.0, 1.0])) < 1e-12);
        assert!((f.distance(&vector(&[5.0, 2.0])) - 1.0).abs() < 1e-12);
    }
}
