//! Fans: finite face-closed collections of cones meeting along common faces.

use fixedbitset::FixedBitSet;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::linalg::{check_dim, Subspace, Vector};
use crate::rng;

/// Index of a cone inside a [`Fan`].
pub type ConeId = usize;

#[derive(Debug, Clone)]
pub struct Fan {
    ambient: usize,
    eps: f64,
    /// Sorted by dimension; id 0 is the common lineality space.
    cones: Vec<Cone>,
    /// `faces_of[j]` holds the ids of the faces of cone `j` (including `j`).
    faces_of: Vec<FixedBitSet>,
}

impl Fan {
    /// Builds a fan from cones, adding all of their faces, and checks the fan
    /// axioms: common lineality and intersections along common faces.
    pub fn new(ambient: usize, cones: Vec<Cone>, eps: f64) -> Result<Self> {
        if cones.is_empty() {
            return Err(Error::Empty("fan"));
        }
        for c in &cones {
            if c.ambient() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    found: c.ambient(),
                });
            }
        }
        let lin = cones[0].lineality().clone();
        if let Some(i) = cones.iter().position(|c| !c.lineality().same_as(&lin, eps)) {
            return Err(Error::InvalidGeometry(format!(
                "cone {i} has a different lineality space"
            )));
        }
        let mut all: Vec<Cone> = Vec::new();
        for c in &cones {
            for f in c.faces() {
                if !all.iter().any(|g| g.approx_eq(&f)) {
                    all.push(f);
                }
            }
        }
        all.sort_by_key(|c| c.dim());
        let n = all.len();
        let mut faces_of = Vec::with_capacity(n);
        for c in &all {
            let mut s = FixedBitSet::with_capacity(n);
            for f in c.faces() {
                let id = all
                    .iter()
                    .position(|g| g.approx_eq(&f))
                    .ok_or_else(|| Error::InvalidGeometry("face lookup failed".into()))?;
                s.insert(id);
            }
            faces_of.push(s);
        }
        let fan = Self {
            ambient,
            eps,
            cones: all,
            faces_of,
        };
        fan.check_intersections()?;
        Ok(fan)
    }

    /// Fan generated by cones given as generator lists.
    pub fn from_generators(ambient: usize, cones: &[Vec<Vector>], eps: f64) -> Result<Self> {
        let cs = cones
            .iter()
            .map(|g| Cone::new(ambient, g, eps))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ambient, cs, eps)
    }

    fn check_intersections(&self) -> Result<()> {
        let max = self.maximal();
        for (k, &i) in max.iter().enumerate() {
            for &j in &max[k + 1..] {
                let meet = self.cones[i].intersection(&self.cones[j])?;
                let ok = self.faces_of[i]
                    .ones()
                    .filter(|f| self.faces_of[j].contains(*f))
                    .any(|f| self.cones[f].approx_eq(&meet));
                if !ok {
                    return Err(Error::InvalidGeometry(format!(
                        "cones {i} and {j} do not meet along a common face"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cone(&self, id: ConeId) -> Result<&Cone> {
        self.cones.get(id).ok_or(Error::UnknownCone(id))
    }

    /// The minimal cone (the common lineality space).
    pub fn minimal(&self) -> ConeId {
        0
    }

    pub fn lineality(&self) -> &Subspace {
        self.cones[0].lineality()
    }

    /// Whether cone `i` is a face of cone `j`.
    pub fn is_face(&self, i: ConeId, j: ConeId) -> bool {
        self.faces_of.get(j).is_some_and(|s| s.contains(i))
    }

    /// Cones that are not proper faces of other cones.
    pub fn maximal(&self) -> Vec<ConeId> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.is_face(i, j)))
            .collect()
    }

    /// Looks a cone up by geometric equality.
    pub fn find(&self, c: &Cone) -> Option<ConeId> {
        self.cones.iter().position(|g| g.approx_eq(c))
    }

    /// The cone whose relative interior contains `v`, if `v` lies in the
    /// support of the fan.
    pub fn minimal_containing_cone(&self, v: &Vector) -> Option<ConeId> {
        if v.len() != self.ambient {
            return None;
        }
        self.cones.iter().position(|c| c.in_relative_interior(v))
    }

    /// The smallest cone having both `i` and `j` as faces.
    pub fn join(&self, i: ConeId, j: ConeId) -> Option<ConeId> {
        (0..self.len()).find(|&k| self.is_face(i, k) && self.is_face(j, k))
    }

    /// `Star(σ) = {⟨σ⟩ + τ : σ a face of τ}`.
    pub fn star(&self, sigma: ConeId) -> Result<Self> {
        let s = self.cone(sigma)?;
        let span = s.span().basis_vectors();
        let mut cones = Vec::new();
        for t in 0..self.len() {
            if !self.is_face(sigma, t) {
                continue;
            }
            let mut g = self.cones[t].generators();
            for b in &span {
                g.push(b.clone());
                g.push(-b);
            }
            cones.push(Cone::new(self.ambient, &g, self.eps)?);
        }
        Self::new(self.ambient, cones, self.eps)
    }

    /// Deterministic completeness test: some cone is full-dimensional and every
    /// facet of a full-dimensional cone is shared by exactly two of them.
    pub fn facets_paired(&self) -> bool {
        let full: Vec<ConeId> = (0..self.len())
            .filter(|&i| self.cones[i].is_full_dimensional())
            .collect();
        if full.is_empty() {
            return false;
        }
        let d = self.ambient;
        for &i in &full {
            for f in self.faces_of[i].ones() {
                if self.cones[f].dim() + 1 != d {
                    continue;
                }
                let owners = full.iter().filter(|&&j| self.is_face(f, j)).count();
                if owners != 2 {
                    return false;
                }
            }
        }
        true
    }

    /// Randomized certificate: every probed direction lies in some cone.
    pub fn probe_complete(&self, directions: usize, seed: u64) -> bool {
        let mut r = rng::stream(seed, 0);
        (0..directions).all(|_| {
            let v = rng::unit_vector(&mut r, self.ambient);
            self.cones.iter().any(|c| c.contains(&v))
        })
    }

    /// Completeness: facet pairing, confirmed by direction probing.
    pub fn is_complete(&self) -> bool {
        self.facets_paired() && self.probe_complete(64, 0x5eed)
    }

    pub fn check_vector(&self, v: &Vector) -> Result<()> {
        check_dim(v, self.ambient)
    }

    /// The complete fan in `R^{n+1}` with cones `cone{e_i : i ∈ I} + R𝟙` for
    /// proper subsets `I` of `{0, …, n}`; the normal fan of the standard
    /// simplex.
    pub fn projective(n: usize, eps: f64) -> Result<Self> {
        let d = n + 1;
        let one = Vector::from_element(d, 1.0);
        let cones = (0..d)
            .map(|i| {
                let mut g: Vec<Vector> = (0..d).filter(|&j| j != i).map(|j| unit(d, j)).collect();
                g.push(one.clone());
                g.push(-&one);
                g
            })
            .collect::<Vec<_>>();
        Self::from_generators(d, &cones, eps)
    }

    /// The boundary of the nonnegative orthant of `R^{n+1}`: cones
    /// `cone{e_i : i ∈ I}` for proper subsets `I`.
    pub fn boundary_orthant(n: usize, eps: f64) -> Result<Self> {
        let d = n + 1;
        let cones = (0..d)
            .map(|i| (0..d).filter(|&j| j != i).map(|j| unit(d, j)).collect())
            .collect::<Vec<Vec<Vector>>>();
        Self::from_generators(d, &cones, eps)
    }
}

fn unit(d: usize, j: usize) -> Vector {
    let mut e = Vector::zeros(d);
    e[j] = 1.0;
    e
}
