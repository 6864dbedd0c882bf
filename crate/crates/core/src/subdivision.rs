//! Regular subdivisions `S(λ)` induced by lifts, triangulation tests, GKZ
//! vectors and the linear data of secondary cones.
//!
//! The lower faces of `Q_λ = conv{(a, λ_a)}` are read off the face lattice of
//! `cone{(y_a, λ_a, 1)}`, where `y_a` are coordinates in the affine span of
//! `conv(A)`: a face is lower when some functional exposing it has a positive
//! height component.

use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::cone::{incidence_tol, Cone, MAX_AMBIENT_DIM};
use crate::config::{relations_of, LabelSet, Lift, PointConfig};
use crate::error::{Error, Result};
use crate::linalg::{null_space, simplex_volume, Subspace, Vector};
use crate::polytope::Polytope;
use crate::rng;

/// A polyhedral subdivision of a configuration, as a system of label sets
/// closed under taking faces.
#[derive(Debug, Clone, Serialize)]
pub struct Subdivision {
    faces: BTreeSet<LabelSet>,
    facets: Vec<LabelSet>,
    #[serde(skip)]
    lift: Option<Lift>,
}

impl PartialEq for Subdivision {
    fn eq(&self, other: &Self) -> bool {
        self.faces == other.faces
    }
}

impl Eq for Subdivision {}

impl Hash for Subdivision {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.faces.hash(state);
    }
}

impl PartialOrd for Subdivision {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subdivision {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.facets
            .cmp(&other.facets)
            .then_with(|| self.faces.cmp(&other.faces))
    }
}

impl Subdivision {
    /// A subdivision from its full face system; facets are the maximal sets.
    pub fn from_faces(faces: BTreeSet<LabelSet>) -> Self {
        let mut facets: Vec<LabelSet> = faces
            .iter()
            .filter(|f| {
                !faces
                    .iter()
                    .any(|g| g.len() > f.len() && f.iter().all(|x| g.contains(x)))
            })
            .cloned()
            .collect();
        facets.sort();
        Self {
            faces,
            facets,
            lift: None,
        }
    }

    /// The subdivision with the given facets, closed under faces computed from
    /// the geometry of `a`.
    pub fn from_facets(a: &PointConfig, facets: &[LabelSet]) -> Result<Self> {
        let mut faces = BTreeSet::new();
        for f in facets {
            let pts: Vec<Vector> = f.iter().map(|&i| a.point(i).clone()).collect();
            for hf in crate::polytope::hull_faces(&pts, a.ambient(), a.tolerance().eps_geom)? {
                faces.insert(hf.members.iter().map(|&m| f[m]).collect::<LabelSet>());
            }
        }
        Ok(Self::from_faces(faces))
    }

    /// The subdivision with the single facet `A`.
    pub fn trivial(a: &PointConfig) -> Result<Self> {
        Self::from_facets(a, &[(0..a.len()).collect()])
    }

    pub fn faces(&self) -> &BTreeSet<LabelSet> {
        &self.faces
    }

    pub fn facets(&self) -> &[LabelSet] {
        &self.facets
    }

    /// The lift this subdivision was computed from, if any.
    pub fn defining_lift(&self) -> Option<&Lift> {
        self.lift.as_ref()
    }

    /// Labels appearing in some facet.
    pub fn participating(&self) -> BTreeSet<usize> {
        self.facets.iter().flatten().copied().collect()
    }

    pub fn is_trivial(&self, n: usize) -> bool {
        self.facets.len() == 1 && self.facets[0].len() == n
    }

    /// Whether every facet of `self` lies in some facet of `other`.
    pub fn refines(&self, other: &Self) -> bool {
        self.facets
            .iter()
            .all(|f| other.facets.iter().any(|g| f.iter().all(|x| g.contains(x))))
    }

    /// Whether every facet consists of affinely independent points.
    pub fn is_triangulation(&self, a: &PointConfig) -> bool {
        let y = a.affine_coords();
        let eps = a.tolerance().eps_geom;
        self.facets.iter().all(|f| {
            let pts: Vec<Vector> = f.iter().map(|&i| y[i].clone()).collect();
            let frame = crate::linalg::AffineFrame::of_points(&pts, y[0].len(), eps);
            frame.dim() + 1 == f.len()
        })
    }

    /// Checks the subdivision axioms: facets are full-dimensional, every
    /// pairwise intersection of facets is a face of the system, and random
    /// points of `conv(A)` are covered by the facets.
    pub fn check(
        &self,
        a: &PointConfig,
        samples: usize,
        seed: u64,
    ) -> std::result::Result<(), String> {
        let y = a.affine_coords();
        let k = a.dim();
        let eps = a.tolerance().eps_geom;
        let mut polys = Vec::new();
        for f in &self.facets {
            let pts: Vec<Vector> = f.iter().map(|&i| y[i].clone()).collect();
            let p = Polytope::new(&pts, eps).map_err(|e| e.to_string())?;
            if p.dim() != k {
                return Err(format!("facet {f:?} is not full-dimensional"));
            }
            polys.push(p);
        }
        for (i, f) in self.facets.iter().enumerate() {
            for g in &self.facets[i + 1..] {
                let meet: LabelSet = f.iter().copied().filter(|x| g.contains(x)).collect();
                if !meet.is_empty() && !self.faces.contains(&meet) {
                    return Err(format!("facets {f:?} and {g:?} meet in a non-face"));
                }
            }
        }
        let mut r = rng::stream(seed, 0);
        let tol = incidence_tol(eps) * a.diameter().max(1.0);
        for _ in 0..samples {
            let w = rng::simplex_weights(&mut r, y.len());
            let u = y
                .iter()
                .zip(&w)
                .fold(Vector::zeros(k), |acc, (p, c)| acc + p * *c);
            let covered = polys.iter().any(|p| {
                p.facet_inequalities()
                    .iter()
                    .all(|(n, c)| n.dot(&u) + c >= -tol * n.norm())
            });
            if !covered {
                return Err(format!("point {u:?} of conv(A) is not covered"));
            }
        }
        Ok(())
    }
}

/// The lifted points `(y_a, λ_a, 1)` in affine coordinates.
fn lifted_points(a: &PointConfig, lam: &Lift) -> Vec<Vector> {
    let y = a.affine_coords();
    let k = a.dim();
    y.iter()
        .zip(lam.iter())
        .map(|(p, &l)| {
            Vector::from_fn(k + 2, |i, _| {
                if i < k {
                    p[i]
                } else if i == k {
                    l
                } else {
                    1.0
                }
            })
        })
        .collect()
}

/// The regular subdivision `S(λ)` from the lower faces of the lifted polytope.
pub fn regular_subdivision(a: &PointConfig, lam: &Lift) -> Result<Subdivision> {
    a.check_lift(lam)?;
    let k = a.dim();
    if k + 2 > MAX_AMBIENT_DIM {
        return Err(Error::DimensionTooLarge(k + 2));
    }
    let eps = a.tolerance().eps_geom;
    let pts = lifted_points(a, lam);
    let cone = Cone::new(k + 2, &pts, eps)?;
    let orth = cone.orth();
    let vertical_lineality = orth.basis_vectors().iter().any(|b| b[k].abs() > eps);
    let tol = incidence_tol(eps);
    let mut faces = BTreeSet::new();
    for face in cone.face_lattice().faces {
        if face.dim == 0 {
            continue;
        }
        let lower = vertical_lineality || face.facets.ones().any(|i| cone.facets()[i][k] > eps);
        if !lower {
            continue;
        }
        let members: LabelSet = pts
            .iter()
            .enumerate()
            .filter(|(_, p)| face.exposing.dot(p).abs() <= tol * p.norm())
            .map(|(i, _)| i)
            .collect();
        faces.insert(members);
    }
    let mut s = Subdivision::from_faces(faces);
    s.lift = Some(lam.clone());
    Ok(s)
}

/// Whether two lifts induce the same regular subdivision.
pub fn same_secondary_cone(a: &PointConfig, lam: &Lift, mu: &Lift) -> Result<bool> {
    Ok(regular_subdivision(a, lam)? == regular_subdivision(a, mu)?)
}

/// Volume of `conv(F)` for a simplex facet, measured in the affine span of
/// `conv(A)`.
fn facet_volume(y: &[Vector], f: &[usize]) -> f64 {
    let v: Vec<Vector> = f.iter().map(|&i| y[i].clone()).collect();
    simplex_volume(&v)
}

/// Euclidean volume of `conv(A)` in its affine span, via any triangulation.
pub fn hull_volume(a: &PointConfig) -> Result<f64> {
    let t = crate::secondary::generic_triangulation(a)?;
    let y = a.affine_coords();
    Ok(t.facets().iter().map(|f| facet_volume(&y, f)).sum())
}

/// The GKZ vector of a triangulation: at `a`, the total volume of the facets
/// containing `a`.
pub fn gkz_vertex(a: &PointConfig, t: &Subdivision) -> Result<Vector> {
    if !t.is_triangulation(a) {
        return Err(Error::NotATriangulation);
    }
    let y = a.affine_coords();
    let mut phi = Vector::zeros(a.len());
    for f in t.facets() {
        let v = facet_volume(&y, f);
        for &i in f {
            phi[i] += v;
        }
    }
    Ok(phi)
}

/// A cone of the secondary fan, represented by its subdivision and a lift in
/// its relative interior.
#[derive(Debug, Clone)]
pub struct SecondaryCone {
    pub subdivision: Subdivision,
    pub lift: Lift,
}

impl SecondaryCone {
    pub fn of_lift(a: &PointConfig, lam: &Lift) -> Result<Self> {
        Ok(Self {
            subdivision: regular_subdivision(a, lam)?,
            lift: lam.clone(),
        })
    }

    /// Linear span of the cone: lifts that are affine on every facet.
    pub fn span(&self, a: &PointConfig) -> Subspace {
        secondary_span(a, &self.subdivision)
    }
}

/// Lifts that restrict to an affine function on every facet of `s`; labels
/// outside all facets are unconstrained. This is the linear span of the
/// secondary cone of `s`.
pub fn secondary_span(a: &PointConfig, s: &Subdivision) -> Subspace {
    let y = a.affine_coords();
    let hom: Vec<Vector> = y
        .iter()
        .map(|p| Vector::from_fn(p.len() + 1, |i, _| if i < p.len() { p[i] } else { 1.0 }))
        .collect();
    let eps = a.tolerance().eps_geom;
    let mut rows = Vec::new();
    for f in s.facets() {
        rows.extend(relations_of(&hom, f, hom[0].len(), eps));
    }
    null_space(&rows, a.len(), eps)
}

/// The lineality of the secondary fan: lifts of the form `a ↦ a·v + c`.
pub fn secondary_lineality(a: &PointConfig) -> Subspace {
    let y = a.affine_coords();
    let k = a.dim();
    let cols: Vec<Vector> = (0..=k)
        .map(|j| Vector::from_fn(a.len(), |i, _| if j < k { y[i][j] } else { 1.0 }))
        .collect();
    Subspace::span(&cols, a.len(), a.tolerance().eps_geom)
}

/// Affine functions `(g, c)` with `g·y_a + c = λ_a` on each facet.
pub fn facet_functions(a: &PointConfig, s: &Subdivision, lam: &Lift) -> Vec<(Vector, f64)> {
    let y = a.affine_coords();
    let k = a.dim();
    s.facets()
        .iter()
        .map(|f| {
            let m = DMatrix::from_fn(f.len(), k + 1, |r, c| if c < k { y[f[r]][c] } else { 1.0 });
            let rhs = Vector::from_fn(f.len(), |r, _| lam[f[r]]);
            let sol = m
                .svd(true, true)
                .solve(&rhs, 1e-12)
                .expect("singular vectors requested");
            (sol.rows(0, k).into_owned(), sol[k])
        })
        .collect()
}

/// Smallest height of a lifted point above the extended plane of a facet
/// that does not contain it; `None` when every point lies on every facet
/// plane (trivial subdivision with all labels participating).
pub fn lift_margin(a: &PointConfig, s: &Subdivision, lam: &Lift) -> Option<f64> {
    let y = a.affine_coords();
    let fns = facet_functions(a, s, lam);
    let mut best: Option<f64> = None;
    for (f, (g, c)) in s.facets().iter().zip(&fns) {
        for i in 0..a.len() {
            if f.contains(&i) {
                continue;
            }
            let gap = lam[i] - g.dot(&y[i]) - c;
            best = Some(best.map_or(gap, |b: f64| b.min(gap)));
        }
    }
    best
}
