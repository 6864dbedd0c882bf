//! Polytopes as convex hulls of finite point sets, their face structure and
//! their inner normal fans.
//!
//! Faces are read off the homogenization `cone{(a, 1)}`: its nonzero faces are
//! in bijection with the nonempty faces of the hull.

use crate::cone::{incidence_tol, Cone, MAX_AMBIENT_DIM};
use crate::error::{Error, Result};
use crate::fan::{ConeId, Fan};
use crate::linalg::{check_dim, AffineFrame, Vector};

/// A nonempty face of `conv(points)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HullFace {
    /// Indices of all input points lying on the face, ascending.
    pub members: Vec<usize>,
    /// Affine dimension of the face.
    pub dim: usize,
    /// The affine functional `x ↦ normal·x + offset` is nonnegative on the
    /// hull and vanishes exactly on this face.
    pub normal: Vector,
    pub offset: f64,
}

pub(crate) fn homogenize(p: &Vector) -> Vector {
    let d = p.len();
    Vector::from_fn(d + 1, |i, _| if i < d { p[i] } else { 1.0 })
}

/// The cone over `(p, 1)` for all points.
pub(crate) fn homogenized_cone(points: &[Vector], ambient: usize, eps: f64) -> Result<Cone> {
    if ambient + 1 > MAX_AMBIENT_DIM {
        return Err(Error::DimensionTooLarge(ambient + 1));
    }
    let lifted: Vec<Vector> = points.iter().map(homogenize).collect();
    Cone::new(ambient + 1, &lifted, eps)
}

/// All nonempty faces of `conv(points)`, sorted by dimension; the last entry
/// is the whole hull.
pub fn hull_faces(points: &[Vector], ambient: usize, eps: f64) -> Result<Vec<HullFace>> {
    if points.is_empty() {
        return Err(Error::Empty("point set"));
    }
    for p in points {
        check_dim(p, ambient)?;
    }
    let k = homogenized_cone(points, ambient, eps)?;
    let tol = incidence_tol(eps);
    let mut out = Vec::new();
    for face in k.face_lattice().faces {
        if face.dim == 0 {
            continue;
        }
        let e = &face.exposing;
        let members: Vec<usize> = points
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                let h = homogenize(p);
                e.dot(&h).abs() <= tol * h.norm()
            })
            .map(|(i, _)| i)
            .collect();
        out.push(HullFace {
            members,
            dim: face.dim - 1,
            normal: e.rows(0, ambient).into_owned(),
            offset: e[ambient],
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Polytope {
    ambient: usize,
    eps: f64,
    vertices: Vec<Vector>,
    faces: Vec<HullFace>,
}

/// The inner normal fan of a polytope together with the face of the polytope
/// attached to each cone.
#[derive(Debug, Clone)]
pub struct NormalFan {
    pub fan: Fan,
    /// `faces[id]` lists the vertex indices of the face minimized by the
    /// functionals in the relative interior of cone `id`.
    pub faces: Vec<Vec<usize>>,
}

impl NormalFan {
    /// The cone `σ_F` of the face with the given vertex set.
    pub fn cone_of_face(&self, vertices: &[usize]) -> Option<ConeId> {
        self.faces.iter().position(|f| f == vertices)
    }
}

impl Polytope {
    /// Convex hull of `points`; only the extreme points are kept as vertices.
    pub fn new(points: &[Vector], eps: f64) -> Result<Self> {
        let ambient = points.first().ok_or(Error::Empty("polytope"))?.len();
        let faces = hull_faces(points, ambient, eps)?;
        let vertex_ids: Vec<usize> = faces
            .iter()
            .filter(|f| f.dim == 0)
            .map(|f| f.members[0])
            .collect();
        let mut sorted = vertex_ids.clone();
        sorted.sort_unstable();
        let vertices: Vec<Vector> = sorted.iter().map(|&i| points[i].clone()).collect();
        // Re-index faces by vertex position, dropping non-extreme members.
        let faces = faces
            .into_iter()
            .map(|mut f| {
                f.members = f
                    .members
                    .iter()
                    .filter_map(|m| sorted.iter().position(|v| v == m))
                    .collect();
                f
            })
            .collect();
        Ok(Self {
            ambient,
            eps,
            vertices,
            faces,
        })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.faces.last().map_or(0, |f| f.dim)
    }

    /// Nonempty faces as vertex-index sets with exposing functionals.
    pub fn faces(&self) -> &[HullFace] {
        &self.faces
    }

    /// Inner facet inequalities `n·x + c ≥ 0`.
    pub fn facet_inequalities(&self) -> Vec<(Vector, f64)> {
        let d = self.dim();
        self.faces
            .iter()
            .filter(|f| d > 0 && f.dim + 1 == d)
            .map(|f| (f.normal.clone(), f.offset))
            .collect()
    }

    pub fn affine_frame(&self) -> AffineFrame {
        AffineFrame::of_points(&self.vertices, self.ambient, self.eps)
    }

    /// The inner normal fan, one cone per nonempty face.
    pub fn normal_fan(&self) -> Result<NormalFan> {
        normal_fan_of(&self.vertices, &self.faces, self.ambient, self.eps)
    }
}

/// Normal fan of `conv(points)` given its faces; the face attached to each
/// cone is reported with the same indexing as `faces[..].members`.
pub fn normal_fan_of(
    points: &[Vector],
    faces: &[HullFace],
    ambient: usize,
    eps: f64,
) -> Result<NormalFan> {
    let cones = faces
        .iter()
        .map(|f| {
            let f0 = &points[f.members[0]];
            let eqs: Vec<Vector> = f.members[1..].iter().map(|&i| &points[i] - f0).collect();
            let ineqs: Vec<Vector> = points.iter().map(|a| a - f0).collect();
            Cone::from_inequalities(ambient, &eqs, &ineqs, eps)
        })
        .collect::<Result<Vec<_>>>()?;
    let fan = Fan::new(ambient, cones.clone(), eps)?;
    let mut labels = vec![Vec::new(); fan.len()];
    for (f, c) in faces.iter().zip(&cones) {
        let id = fan
            .find(c)
            .ok_or_else(|| Error::InvalidGeometry("normal cone missing from fan".into()))?;
        labels[id] = f.members.clone();
    }
    if labels.iter().any(|f| f.is_empty()) {
        return Err(Error::InvalidGeometry(
            "normal fan has a cone without a face".into(),
        ));
    }
    Ok(NormalFan { fan, faces: labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    const EPS: f64 = 1e-9;

    fn pts(p: &[&[f64]]) -> Vec<Vector> {
        p.iter().map(|x| vector(x)).collect()
    }

    #[test]
    fn segment_normal_fan() {
        let p = Polytope::new(&pts(&[&[0.0], &[1.0]]), EPS).unwrap();
        let nf = p.normal_fan().unwrap();
        assert_eq!(nf.fan.len(), 3);
        assert!(nf.fan.is_complete());
        let pos = nf.fan.minimal_containing_cone(&vector(&[1.0])).unwrap();
        assert_eq!(nf.faces[pos], vec![0]);
        let neg = nf.fan.minimal_containing_cone(&vector(&[-1.0])).unwrap();
        assert_eq!(nf.faces[neg], vec![1]);
        assert_eq!(nf.faces[0], vec![0, 1]);
    }

    #[test]
    fn simplex_normal_fan_is_projective_fan() {
        for n in 1..=3 {
            let verts: Vec<Vector> = (0..=n)
                .map(|i| {
                    let mut e = Vector::zeros(n + 1);
                    e[i] = 1.0;
                    e
                })
                .collect();
            let p = Polytope::new(&verts, EPS).unwrap();
            let nf = p.normal_fan().unwrap();
            let proj = Fan::projective(n, EPS).unwrap();
            assert_eq!(nf.fan.len(), proj.len());
            for c in proj.cones() {
                assert!(nf.fan.find(c).is_some());
            }
            // σ_I is attached to the face opposite to I.
            for (id, face) in nf.faces.iter().enumerate() {
                let c = nf.fan.cone(id).unwrap();
                for i in 0..=n {
                    let mut e = Vector::zeros(n + 1);
                    e[i] = 1.0;
                    assert_eq!(c.contains(&e), !face.contains(&i));
                }
            }
        }
    }

    #[test]
    fn square_normal_fan() {
        let p = Polytope::new(
            &pts(&[
                &[0.0, 0.0],
                &[1.0, 0.0],
                &[1.0, 1.0],
                &[0.0, 1.0],
                &[0.5, 0.5],
            ]),
            EPS,
        )
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.faces().len(), 9);
        let nf = p.normal_fan().unwrap();
        assert_eq!(nf.fan.len(), 9);
        assert!(nf.fan.is_complete());
        let dims: Vec<usize> = nf.fan.cones().iter().map(|c| c.dim()).collect();
        assert_eq!(dims, vec![0, 1, 1, 1, 1, 2, 2, 2, 2]);
        // The open first quadrant minimizes at the origin vertex.
        let q = nf
            .fan
            .minimal_containing_cone(&vector(&[1.0, 2.0]))
            .unwrap();
        assert_eq!(nf.faces[q].len(), 1);
        assert!(p.vertices()[nf.faces[q][0]].norm() < 1e-12);
    }

    #[test]
    fn collinear_hull_faces() {
        let f = hull_faces(&pts(&[&[0.0, 1.0], &[1.0, 1.0], &[2.0, 1.0]]), 2, EPS).unwrap();
        let m: Vec<Vec<usize>> = f.iter().map(|f| f.members.clone()).collect();
        assert_eq!(m, vec![vec![0], vec![2], vec![0, 1, 2]]);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(Polytope::new(&[], EPS), Err(Error::Empty(_))));
    }
}
