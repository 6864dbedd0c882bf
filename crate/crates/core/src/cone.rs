//! Polyhedral cones given by generators, with their facet normals, duals,
//! face lattices and relative-interior tests.
//!
//! A cone keeps both descriptions: generators (lineality basis plus extreme
//! rays) and unit facet normals, which are the extreme rays of the dual cone
//! modulo its lineality. The conversion runs through [`crate::dd`].

use fixedbitset::FixedBitSet;

use crate::dd;
use crate::error::{Error, Result};
use crate::linalg::{check_dim, Subspace, Vector};

/// Hard limit on the ambient dimension accepted by the polyhedral conversion.
pub const MAX_AMBIENT_DIM: usize = 8;

#[derive(Debug, Clone)]
pub struct Cone {
    ambient: usize,
    eps: f64,
    lineality: Subspace,
    rays: Vec<Vector>,
    span: Subspace,
    facets: Vec<Vector>,
    /// `incidence[i]` holds the rays lying on facet `i`.
    incidence: Vec<FixedBitSet>,
}

/// One face of a cone, recorded by the rays it contains and the facets that
/// vanish on it.
#[derive(Debug, Clone)]
pub struct Face {
    pub rays: FixedBitSet,
    pub facets: FixedBitSet,
    pub dim: usize,
    /// A vector of the dual cone whose orthogonal slice of the cone is exactly
    /// this face.
    pub exposing: Vector,
}

/// All faces of a cone, sorted by dimension. Index 0 is the lineality space and
/// the last entry is the cone itself.
#[derive(Debug, Clone)]
pub struct FaceLattice {
    pub faces: Vec<Face>,
}

impl FaceLattice {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Whether face `i` is contained in face `j`.
    pub fn is_below(&self, i: usize, j: usize) -> bool {
        self.faces[i].rays.is_subset(&self.faces[j].rays)
    }
}

impl Cone {
    /// The cone generated by `generators` in `R^ambient`. Zero generators give
    /// the origin.
    pub fn new(ambient: usize, generators: &[Vector], eps: f64) -> Result<Self> {
        if ambient > MAX_AMBIENT_DIM {
            return Err(Error::DimensionTooLarge(ambient));
        }
        for g in generators {
            check_dim(g, ambient)?;
            if !g.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidGeometry("non-finite generator".into()));
            }
        }
        // Facet normals are the rays of {u : g·u ≥ 0}; its lineality is σ⊥.
        let dual = dd::convert(ambient, &[], generators, eps);
        let orth = dual.lineality;
        let facets = dual.rays;
        let primal = dd::convert(ambient, &orth.basis_vectors(), &facets, eps);
        Ok(Self::assemble(
            ambient,
            eps,
            primal.lineality,
            primal.rays,
            orth.complement(),
            facets,
        ))
    }

    /// The cone `{x : e·x = 0, a·x ≥ 0}`.
    pub fn from_inequalities(
        ambient: usize,
        equalities: &[Vector],
        inequalities: &[Vector],
        eps: f64,
    ) -> Result<Self> {
        if ambient > MAX_AMBIENT_DIM {
            return Err(Error::DimensionTooLarge(ambient));
        }
        for v in equalities.iter().chain(inequalities) {
            check_dim(v, ambient)?;
        }
        let g = dd::convert(ambient, equalities, inequalities, eps);
        let mut gens = g.rays;
        for b in g.lineality.basis_vectors() {
            gens.push(-&b);
            gens.push(b);
        }
        Self::new(ambient, &gens, eps)
    }

    pub fn zero(ambient: usize, eps: f64) -> Self {
        Self::assemble(
            ambient,
            eps,
            Subspace::zero(ambient),
            Vec::new(),
            Subspace::zero(ambient),
            Vec::new(),
        )
    }

    /// A linear subspace viewed as a cone.
    pub fn subspace(space: &Subspace, eps: f64) -> Self {
        Self::assemble(
            space.ambient(),
            eps,
            space.clone(),
            Vec::new(),
            space.clone(),
            Vec::new(),
        )
    }

    fn assemble(
        ambient: usize,
        eps: f64,
        lineality: Subspace,
        rays: Vec<Vector>,
        span: Subspace,
        facets: Vec<Vector>,
    ) -> Self {
        let tol = incidence_tol(eps);
        let incidence = facets
            .iter()
            .map(|f| {
                let mut s = FixedBitSet::with_capacity(rays.len());
                for (j, r) in rays.iter().enumerate() {
                    if f.dot(r).abs() <= tol {
                        s.insert(j);
                    }
                }
                s
            })
            .collect();
        Self {
            ambient,
            eps,
            lineality,
            rays,
            span,
            facets,
            incidence,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    pub fn lineality(&self) -> &Subspace {
        &self.lineality
    }

    pub fn rays(&self) -> &[Vector] {
        &self.rays
    }

    pub fn facets(&self) -> &[Vector] {
        &self.facets
    }

    /// The linear span `⟨σ⟩`.
    pub fn span(&self) -> &Subspace {
        &self.span
    }

    /// The orthogonal complement `σ⊥`, which is the lineality of the dual.
    pub fn orth(&self) -> Subspace {
        self.span.complement()
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.dim() == 0
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Canonical generators: extreme rays followed by `±` the lineality basis.
    pub fn generators(&self) -> Vec<Vector> {
        let mut g = self.rays.clone();
        for b in self.lineality.basis_vectors() {
            g.push(b.clone());
            g.push(-b);
        }
        g
    }

    /// The dual cone `σ∨ = {u : u·v ≥ 0 ∀v ∈ σ}`.
    pub fn dual(&self) -> Self {
        let mut gens = self.facets.clone();
        for b in self.orth().basis_vectors() {
            gens.push(b.clone());
            gens.push(-b);
        }
        Self::new(self.ambient, &gens, self.eps).expect("dimensions already validated")
    }

    fn scale(v: &Vector) -> f64 {
        v.norm().max(1.0)
    }

    /// Membership up to `eps` (scaled by `max(1, |v|)`).
    pub fn contains(&self, v: &Vector) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        let tol = self.eps * Self::scale(v);
        self.span.reject(v).norm() <= tol && self.facets.iter().all(|f| f.dot(v) >= -tol)
    }

    /// Largest violation of the inequality description at `v`.
    pub fn violation(&self, v: &Vector) -> f64 {
        let off = self.span.reject(v).norm();
        self.facets
            .iter()
            .map(|f| -f.dot(v))
            .fold(off, f64::max)
            .max(0.0)
    }

    /// Relative-interior test: `v` lies in `⟨σ⟩` and strictly inside every
    /// facet.
    pub fn in_relative_interior(&self, v: &Vector) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        let tol = self.eps * Self::scale(v);
        self.span.reject(v).norm() <= tol && self.facets.iter().all(|f| f.dot(v) > tol)
    }

    /// A point of the relative interior: the sum of the extreme rays.
    pub fn interior_point(&self) -> Vector {
        self.rays
            .iter()
            .fold(Vector::zeros(self.ambient), |acc, r| acc + r)
    }

    /// Geometric equality up to tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        let tol = incidence_tol(self.eps.max(other.eps));
        self.ambient == other.ambient
            && self.rays.len() == other.rays.len()
            && self.lineality.same_as(&other.lineality, self.eps)
            && self
                .rays
                .iter()
                .all(|r| other.rays.iter().any(|s| (r - s).norm() <= tol))
    }

    /// Hausdorff distance between the unit generator sets, together with the
    /// discrepancy of the lineality projectors. Zero for equal cones.
    pub fn generator_distance(&self, other: &Self) -> f64 {
        let lin = if self.lineality.dim() == other.lineality.dim() {
            (self.lineality.projector() - other.lineality.projector()).amax()
        } else {
            f64::INFINITY
        };
        let one_sided = |a: &[Vector], b: &[Vector]| {
            a.iter()
                .map(|x| {
                    b.iter()
                        .map(|y| (x - y).norm())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        let rays = match (self.rays.is_empty(), other.rays.is_empty()) {
            (true, true) => 0.0,
            (false, false) => {
                one_sided(&self.rays, &other.rays).max(one_sided(&other.rays, &self.rays))
            }
            _ => f64::INFINITY,
        };
        lin.max(rays)
    }

    /// The face lattice, with exposing vectors.
    pub fn face_lattice(&self) -> FaceLattice {
        let nr = self.rays.len();
        let mut all = FixedBitSet::with_capacity(nr);
        all.insert_range(..);
        let mut sets: Vec<FixedBitSet> = vec![all];
        let mut i = 0;
        while i < sets.len() {
            for inc in &self.incidence {
                let mut s = sets[i].clone();
                s.intersect_with(inc);
                if !sets.contains(&s) {
                    sets.push(s);
                }
            }
            i += 1;
        }
        let mut faces: Vec<Face> = sets
            .into_iter()
            .map(|rays| {
                let mut facets = FixedBitSet::with_capacity(self.facets.len());
                let mut exposing = Vector::zeros(self.ambient);
                for (k, inc) in self.incidence.iter().enumerate() {
                    if rays.is_subset(inc) {
                        facets.insert(k);
                        exposing += &self.facets[k];
                    }
                }
                let dim = self.lineality.dim() + self.ray_rank(&rays);
                Face {
                    rays,
                    facets,
                    dim,
                    exposing,
                }
            })
            .collect();
        faces.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then_with(|| b.facets.count_ones(..).cmp(&a.facets.count_ones(..)))
                .then_with(|| {
                    a.rays
                        .ones()
                        .collect::<Vec<_>>()
                        .cmp(&b.rays.ones().collect())
                })
        });
        FaceLattice { faces }
    }

    fn ray_rank(&self, rays: &FixedBitSet) -> usize {
        let v: Vec<Vector> = rays.ones().map(|j| self.rays[j].clone()).collect();
        crate::linalg::rank(&v, self.ambient, self.eps.sqrt().min(1e-6))
    }

    /// The cone of a face given by its ray set.
    pub fn face_cone(&self, face: &Face) -> Self {
        let mut gens: Vec<Vector> = face.rays.ones().map(|j| self.rays[j].clone()).collect();
        for b in self.lineality.basis_vectors() {
            gens.push(b.clone());
            gens.push(-b);
        }
        Self::new(self.ambient, &gens, self.eps).expect("dimensions already validated")
    }

    /// All faces as cones, in lattice order.
    pub fn faces(&self) -> Vec<Self> {
        self.face_lattice()
            .faces
            .iter()
            .map(|f| self.face_cone(f))
            .collect()
    }

    /// Rays of `self` that lie in `other`.
    fn rays_in(&self, other: &Self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.rays.len());
        for (j, r) in self.rays.iter().enumerate() {
            if other.contains(r) {
                s.insert(j);
            }
        }
        s
    }

    /// Locates `tau` among the faces of `self`.
    pub fn find_face(&self, tau: &Self) -> Option<Face> {
        if tau.ambient != self.ambient || !tau.lineality.same_as(&self.lineality, self.eps) {
            return None;
        }
        let rays = self.rays_in(tau);
        let lattice = self.face_lattice();
        let face = lattice.faces.into_iter().find(|f| f.rays == rays)?;
        self.face_cone(&face).approx_eq(tau).then_some(face)
    }

    pub fn is_face_of(&self, sigma: &Self) -> bool {
        sigma.find_face(self).is_some()
    }

    /// Intersection of two cones.
    pub fn intersection(&self, other: &Self) -> Result<Self> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: other.ambient,
            });
        }
        let mut eqs = self.orth().basis_vectors();
        eqs.extend(other.orth().basis_vectors());
        let mut ineqs = self.facets.clone();
        ineqs.extend(other.facets.iter().cloned());
        Self::from_inequalities(self.ambient, &eqs, &ineqs, self.eps)
    }

    /// Smallest cone containing both.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        let mut g = self.generators();
        g.extend(other.generators());
        Self::new(self.ambient, &g, self.eps)
    }

    /// Writes `w ∈ τ∨` as `u − ℓ` with `u, ℓ ∈ σ∨` and `ℓ ∈ τ⊥`, for a face
    /// `τ` of `σ = self`.
    ///
    /// Takes `ℓ = s·e` for the exposing vector `e` of `τ` and the least `s ≥ 0`
    /// making `w + s·e` nonnegative on the rays of `σ`.
    pub fn decompose_over_face(&self, tau: &Self, w: &Vector) -> Result<(Vector, Vector)> {
        check_dim(w, self.ambient)?;
        let face = self.find_face(tau).ok_or(Error::NotAFace)?;
        let tol = self.eps * Self::scale(w);
        let dual_tau = tau.dual();
        if !dual_tau.contains(w) {
            return Err(Error::NotInDual {
                violation: dual_tau.violation(w),
            });
        }
        let e = &face.exposing;
        let mut s: f64 = 0.0;
        for (j, r) in self.rays.iter().enumerate() {
            if face.rays.contains(j) {
                continue;
            }
            let wr = w.dot(r);
            if wr < 0.0 {
                let er = e.dot(r);
                debug_assert!(
                    er > tol,
                    "rays off the face pair positively with its exposing vector"
                );
                s = s.max(-wr / er);
            }
        }
        let ell = e * s;
        let u = w + &ell;
        Ok((u, ell))
    }
}

pub(crate) fn incidence_tol(eps: f64) -> f64 {
    (1e3 * eps).min(1e-6).max(eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    const EPS: f64 = 1e-9;

    fn cone(gens: &[&[f64]]) -> Cone {
        let d = gens.first().map_or(2, |g| g.len());
        let g: Vec<Vector> = gens.iter().map(|g| vector(g)).collect();
        Cone::new(d, &g, EPS).unwrap()
    }

    fn has_ray(c: &Cone, x: &[f64]) -> bool {
        let x = vector(x);
        let x = &x / x.norm();
        c.rays().iter().any(|r| (r - &x).norm() < 1e-9)
    }

    #[test]
    fn orthant_is_self_dual() {
        let c = cone(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(c.dual().approx_eq(&c));
    }

    #[test]
    fn irrational_cone_dual() {
        let s2 = 2f64.sqrt();
        let c = cone(&[&[1.0, s2], &[0.0, 1.0]]);
        let d = c.dual();
        assert_eq!(d.rays().len(), 2);
        assert!(has_ray(&d, &[-s2, 1.0]));
        assert!(has_ray(&d, &[1.0, 0.0]));
        assert!(d.dual().approx_eq(&c));
    }

    #[test]
    fn dual_of_space_is_origin() {
        let c = cone(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        assert_eq!(c.lineality().dim(), 2);
        let d = c.dual();
        assert_eq!(d.dim(), 0);
        assert!(d.dual().approx_eq(&c));
    }

    #[test]
    fn zero_generators() {
        let c = Cone::new(3, &[], EPS).unwrap();
        assert_eq!(c.dim(), 0);
        assert_eq!(c.dual().lineality().dim(), 3);
        assert_eq!(c.face_lattice().len(), 1);
    }

    #[test]
    fn rejects_large_and_mismatched() {
        assert!(matches!(
            Cone::new(9, &[], EPS),
            Err(Error::DimensionTooLarge(9))
        ));
        assert!(matches!(
            Cone::new(2, &[vector(&[1.0])], EPS),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn duplicate_generators_are_merged() {
        let c = cone(&[&[1.0, 0.0], &[2.0, 0.0], &[1.0, 1e-14], &[0.0, 1.0]]);
        assert_eq!(c.rays().len(), 2);
    }

    #[test]
    fn orthant_faces() {
        let c = cone(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let lat = c.face_lattice();
        assert_eq!(lat.len(), 4);
        let dims: Vec<usize> = lat.faces.iter().map(|f| f.dim).collect();
        assert_eq!(dims, vec![0, 1, 1, 2]);
        let d = c.dual();
        for f in &lat.faces {
            assert!(d.contains(&f.exposing));
        }
    }

    #[test]
    fn half_plane_faces() {
        let c = cone(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0]]);
        let lat = c.face_lattice();
        assert_eq!(lat.len(), 2);
        let faces = c.faces();
        assert_eq!(faces[0].dim(), 1);
        assert!(faces[0].lineality().same_as(c.lineality(), EPS));
        assert!(faces[0].contains(&vector(&[-3.0, 0.0])));
        assert!(faces[1].approx_eq(&c));
        // The exposing vector of the x-axis is the inner normal (0,1).
        let e = &lat.faces[0].exposing;
        assert!((e - vector(&[0.0, 1.0])).norm() < 1e-12);
    }

    #[test]
    fn irrational_cone_faces() {
        let s2 = 2f64.sqrt();
        let c = cone(&[&[-s2, 1.0], &[1.0, 0.0]]);
        let faces = c.faces();
        assert_eq!(faces.len(), 4);
        assert_eq!(faces[0].dim(), 0);
        assert!(has_ray(&faces[1], &[-s2, 1.0]) || has_ray(&faces[1], &[1.0, 0.0]));
        assert!(faces[3].approx_eq(&c));
    }

    #[test]
    fn relative_interior() {
        let c = cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert!(c.in_relative_interior(&vector(&[1.0, 1.0, 0.0])));
        assert!(!c.in_relative_interior(&vector(&[1.0, 0.0, 0.0])));
        assert!(!c.in_relative_interior(&vector(&[1.0, 1.0, 0.1])));
        assert!(c.contains(&vector(&[1.0, 0.0, 0.0])));
        let origin = Cone::zero(3, EPS);
        assert!(origin.in_relative_interior(&Vector::zeros(3)));
    }

    #[test]
    fn decomposition_trivial_cases() {
        let s2 = 2f64.sqrt();
        let sigma = cone(&[&[1.0, s2], &[0.0, 1.0]]);
        let w = vector(&[1.0, 0.5]);
        let (u, l) = sigma.decompose_over_face(&sigma, &w).unwrap();
        assert!((u - &w).norm() < 1e-12 && l.norm() < 1e-12);
        let zero = sigma.faces().remove(0);
        let (u, l) = sigma.decompose_over_face(&zero, &w).unwrap();
        assert!((u - &w).norm() < 1e-12 && l.norm() < 1e-12);
    }

    #[test]
    fn decomposition_over_a_ray() {
        let s2 = 2f64.sqrt();
        let sigma = cone(&[&[1.0, s2], &[0.0, 1.0]]);
        let tau = cone(&[&[0.0, 1.0]]);
        let w = vector(&[-1.0, 0.0]);
        let (u, l) = sigma.decompose_over_face(&tau, &w).unwrap();
        let dual = sigma.dual();
        assert!((&u - &l - &w).norm() < 1e-12);
        assert!(dual.contains(&u) && dual.contains(&l));
        assert!(tau.orth().contains(&l, 1e-12));
        // w pairs to −1 against (1,√2) while the exposing vector of τ pairs to
        // 1, so the least shift is by exactly one exposing vector.
        assert!((l - vector(&[1.0, 0.0])).norm() < 1e-12);
        assert!(u.norm() < 1e-12);
    }

    #[test]
    fn decomposition_rejects_outside_dual() {
        let sigma = cone(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let tau = cone(&[&[0.0, 1.0]]);
        assert!(matches!(
            sigma.decompose_over_face(&tau, &vector(&[0.0, -1.0])),
            Err(Error::NotInDual { .. })
        ));
        let not_face = cone(&[&[1.0, 1.0]]);
        assert!(matches!(
            sigma.decompose_over_face(&not_face, &vector(&[0.0, 1.0])),
            Err(Error::NotAFace)
        ));
    }

    #[test]
    fn intersection_of_quadrants() {
        let a = cone(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let b = cone(&[&[-1.0, 0.0], &[0.0, 1.0]]);
        let i = a.intersection(&b).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(has_ray(&i, &[0.0, 1.0]));
        assert!(i.is_face_of(&a) && i.is_face_of(&b));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_cone() -> impl Strategy<Value = Cone> {
            (1usize..=4).prop_flat_map(|d| {
                prop::collection::vec(prop::collection::vec(-3i32..=3, d), 0..7).prop_map(
                    move |g| {
                        let gens: Vec<Vector> = g
                            .iter()
                            .map(|c| {
                                let v: Vec<f64> = c
                                    .iter()
                                    .map(|&x| x as f64 + 0.1 * (x as f64).sin())
                                    .collect();
                                vector(&v)
                            })
                            .collect();
                        Cone::new(d, &gens, EPS).unwrap()
                    },
                )
            })
        }

        proptest! {
            #[test]
            fn dual_is_an_involution(c in arb_cone()) {
                let dd = c.dual().dual();
                prop_assert!(dd.generator_distance(&c) < 1e-9);
            }

            #[test]
            fn generators_lie_in_cone_and_facets_are_tight(c in arb_cone()) {
                for g in c.generators() {
                    prop_assert!(c.contains(&g));
                }
                for f in c.facets() {
                    let tight = c.rays().iter().filter(|r| f.dot(r).abs() < 1e-9).count();
                    prop_assert!(tight + 1 + c.lineality().dim() >= c.dim());
                }
            }

            #[test]
            fn faces_are_exposed(c in arb_cone()) {
                let lat = c.face_lattice();
                let dual = c.dual();
                prop_assert!(lat.faces[0].dim == c.lineality().dim());
                for f in &lat.faces {
                    prop_assert!(dual.contains(&f.exposing));
                    for (j, r) in c.rays().iter().enumerate() {
                        let on = f.exposing.dot(r).abs() <= 1e-9;
                        prop_assert_eq!(on, f.rays.contains(j));
                    }
                }
                let dlat = dual.face_lattice();
                prop_assert_eq!(lat.len(), dlat.len());
            }
        }
    }
}
