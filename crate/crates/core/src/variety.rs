//! The irrational toric variety `Y_Σ` of a fan, through its orbit–cone
//! correspondence.
//!
//! A point is stored as a cone `σ` together with an orbit coordinate
//! `v ∈ N/⟨σ⟩`, kept as the representative orthogonal to `⟨σ⟩`; it stands for
//! `γ_v.x_σ`. As a monoid homomorphism on `σ∨` it takes the value
//! `exp(−u·v)` on `σ⊥` and `0` elsewhere.

use std::collections::BTreeMap;
use std::fmt::Debug;

use nalgebra::DMatrix;

use crate::affine::{ProjPoint, TorusElement};
use crate::config::PointConfig;
use crate::error::{Error, Result};
use crate::fan::{ConeId, Fan};
use crate::linalg::{check_dim, Subspace, Vector};
use crate::polytope::NormalFan;
use crate::rng;

/// Access to the cones of a (possibly virtual) fan through the one query
/// limits need: which cone holds a vector in its relative interior.
pub trait ConeLookup {
    type Key: Clone + PartialEq + Debug;

    fn ambient(&self) -> usize;

    /// The minimal cone, i.e. the lineality space.
    fn minimal_key(&self) -> Result<Self::Key>;

    /// The cone whose relative interior contains `v`, if any.
    fn containing(&self, v: &Vector) -> Result<Option<Self::Key>>;

    /// The linear span `⟨σ⟩` of a cone.
    fn span_of(&self, key: &Self::Key) -> Result<Subspace>;
}

impl ConeLookup for Fan {
    type Key = ConeId;

    fn ambient(&self) -> usize {
        Fan::ambient(self)
    }

    fn minimal_key(&self) -> Result<ConeId> {
        Ok(self.minimal())
    }

    fn containing(&self, v: &Vector) -> Result<Option<ConeId>> {
        self.check_vector(v)?;
        Ok(self.minimal_containing_cone(v))
    }

    fn span_of(&self, key: &ConeId) -> Result<Subspace> {
        Ok(self.cone(*key)?.span().clone())
    }
}

/// A point `γ_v.x_σ` of `Y_Σ`.
#[derive(Debug, Clone)]
pub struct FanPoint<K = ConeId> {
    cone: K,
    orbit: Vector,
    span: Subspace,
}

impl<K: Clone + PartialEq + Debug> FanPoint<K> {
    /// The point `γ_v.x_σ`, with `v` canonicalized modulo `⟨σ⟩`.
    pub fn new(cone: K, v: &Vector, span: Subspace) -> Self {
        Self {
            orbit: span.reject(v),
            cone,
            span,
        }
    }

    pub fn cone(&self) -> &K {
        &self.cone
    }

    /// The orbit coordinate, orthogonal to `⟨σ⟩`.
    pub fn orbit(&self) -> &Vector {
        &self.orbit
    }

    pub fn span(&self) -> &Subspace {
        &self.span
    }

    /// Same cone and orbit coordinates within `eps`.
    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.cone == other.cone
            && (&self.orbit - &other.orbit).norm() <= eps * self.orbit.norm().max(1.0)
    }

    /// The torus action `t.p`.
    pub fn act(&self, t: &TorusElement) -> Self {
        Self::new(self.cone.clone(), &(&self.orbit + &t.v), self.span.clone())
    }
}

/// `γ_v.x_σ` for a cone of `f`.
pub fn point_at<L: ConeLookup>(f: &L, key: L::Key, v: &Vector) -> Result<FanPoint<L::Key>> {
    check_dim(v, f.ambient())?;
    let span = f.span_of(&key)?;
    Ok(FanPoint::new(key, v, span))
}

/// The distinguished point `x_σ = ε_{σ⊥}`.
pub fn distinguished_point(f: &Fan, sigma: ConeId) -> Result<FanPoint> {
    point_at(f, sigma, &Vector::zeros(f.ambient()))
}

/// The point `γ_v.ε` of the dense orbit; `ε` itself for `v = 0`.
pub fn dense_point<L: ConeLookup>(f: &L, v: &Vector) -> Result<FanPoint<L::Key>> {
    point_at(f, f.minimal_key()?, v)
}

/// The torus action on points of `Y_Σ`.
pub fn act<K: Clone + PartialEq + Debug>(t: &TorusElement, p: &FanPoint<K>) -> FanPoint<K> {
    p.act(t)
}

/// Evaluates `p` as a homomorphism `σ∨ → R≥` at `u`.
pub fn evaluate(f: &Fan, p: &FanPoint, u: &Vector) -> Result<f64> {
    check_dim(u, f.ambient())?;
    let sigma = f.cone(p.cone)?;
    let tol = f.eps() * u.norm().max(1.0);
    let mut worst: f64 = 0.0;
    for g in sigma.generators() {
        worst = worst.max(-u.dot(&g));
    }
    if worst > tol {
        return Err(Error::NotInDual { violation: worst });
    }
    if sigma.span().coords(u).norm() <= tol {
        Ok((-u.dot(&p.orbit)).exp())
    } else {
        Ok(0.0)
    }
}

/// `lim_{s→∞} γ_{sv}.p`, or `None` when the path leaves every affine patch.
///
/// With `τ` the cone of `p`, the limit lies in the orbit of the smallest cone
/// `σ ⊇ τ` with `v` in the relative interior of `⟨τ⟩ + σ`, which is the
/// minimal containing cone of `v` in `Star(τ)`.
pub fn one_param_limit(f: &Fan, p: &FanPoint, v: &Vector) -> Result<Option<FanPoint>> {
    check_dim(v, f.ambient())?;
    let tau = p.cone;
    if tau == f.minimal() {
        return match f.minimal_containing_cone(v) {
            Some(s) => Ok(Some(point_at(f, s, &p.orbit)?)),
            None => Ok(None),
        };
    }
    let span_tau = f.cone(tau)?.span().clone();
    let lifted = crate::cone::Cone::subspace(&span_tau, f.eps());
    for s in 0..f.len() {
        if !f.is_face(tau, s) {
            continue;
        }
        let c = f.cone(s)?.sum(&lifted)?;
        if c.in_relative_interior(v) {
            return Ok(Some(point_at(f, s, &p.orbit)?));
        }
    }
    Ok(None)
}

/// Limit of `γ_{v_n}.ε` along `v_n = base + s_n·dir` with `s_n → ∞`:
/// `γ_base.x_σ` for the cone `σ` holding `dir` in its relative interior.
pub fn ray_sequence_limit<L: ConeLookup>(
    f: &L,
    base: &Vector,
    dir: &Vector,
) -> Result<Option<FanPoint<L::Key>>> {
    check_dim(base, f.ambient())?;
    match f.containing(dir)? {
        Some(k) => Ok(Some(point_at(f, k, base)?)),
        None => Ok(None),
    }
}

/// An element of `Y_Σ⁺ = Y_Σ ⊔ {0}`.
#[derive(Debug, Clone)]
pub enum MonoidElement {
    Zero,
    Point(FanPoint),
}

impl MonoidElement {
    /// The cone-level projection to `Σ⁺` (`None` stands for the absorbing
    /// element).
    pub fn cone(&self) -> Option<ConeId> {
        match self {
            Self::Zero => None,
            Self::Point(p) => Some(p.cone),
        }
    }
}

/// Pointwise product in `Y_Σ⁺`: zero unless some cone contains both orbit
/// cones, in which case the product lives on the smallest such cone.
pub fn monoid_mul(f: &Fan, x: &MonoidElement, y: &MonoidElement) -> Result<MonoidElement> {
    let (MonoidElement::Point(p), MonoidElement::Point(q)) = (x, y) else {
        return Ok(MonoidElement::Zero);
    };
    match f.join(p.cone, q.cone) {
        Some(k) => Ok(MonoidElement::Point(point_at(
            f,
            k,
            &(&p.orbit + &q.orbit),
        )?)),
        None => Ok(MonoidElement::Zero),
    }
}

/// The product on `Σ⁺`.
pub fn cone_mul(f: &Fan, x: Option<ConeId>, y: Option<ConeId>) -> Option<ConeId> {
    f.join(x?, y?)
}

/// Checks that `psi` maps every cone of `f` into some cone of `g`.
pub fn check_fan_map(psi: &DMatrix<f64>, f: &Fan, g: &Fan) -> Result<()> {
    if psi.ncols() != f.ambient() || psi.nrows() != g.ambient() {
        return Err(Error::DimensionMismatch {
            expected: f.ambient(),
            found: psi.ncols(),
        });
    }
    for (i, c) in f.cones().iter().enumerate() {
        let images: Vec<Vector> = c.generators().iter().map(|x| psi * x).collect();
        if !g
            .cones()
            .iter()
            .any(|t| images.iter().all(|x| t.contains(x)))
        {
            return Err(Error::NotAFanMap { cone: i });
        }
    }
    Ok(())
}

/// Image of a point under the map of toric varieties induced by a map of
/// fans `psi: f → g`. The image cone is the cone of `g` holding the image of
/// the interior point of the source cone in its relative interior.
pub fn fan_map_apply(psi: &DMatrix<f64>, f: &Fan, g: &Fan, p: &FanPoint) -> Result<FanPoint> {
    check_fan_map(psi, f, g)?;
    let c = f.cone(p.cone)?;
    let image = psi * c.interior_point();
    let k = g
        .minimal_containing_cone(&image)
        .ok_or(Error::NotAFanMap { cone: p.cone })?;
    point_at(g, k, &(psi * &p.orbit))
}

/// Outcome of recovering a fan from one-parameter limits of `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    /// Number of sampled directions per limit cone.
    pub groups: BTreeMap<ConeId, usize>,
    /// Directions whose limit does not exist.
    pub absent: usize,
    /// Directions whose limit disagrees with relative-interior membership.
    pub mismatches: usize,
}

/// Groups sampled directions by the limit of `γ_{sv}.ε` and checks each group
/// is exactly the set of directions in the relative interior of one cone.
/// Half of the directions are Gaussian; the other half are drawn from the
/// relative interiors of randomly chosen cones so that every dimension is
/// exercised.
pub fn recover_fan(f: &Fan, n_dirs: usize, seed: u64) -> Result<RecoveryReport> {
    let eps = dense_point(f, &Vector::zeros(f.ambient()))?;
    let mut r = rng::stream(seed, 0);
    let mut report = RecoveryReport {
        groups: BTreeMap::new(),
        absent: 0,
        mismatches: 0,
    };
    for i in 0..n_dirs {
        let v = if i % 2 == 0 {
            rng::gaussian_vector(&mut r, f.ambient())
        } else {
            use rand::Rng;
            let c = f.cone(r.random_range(0..f.len()))?;
            let mut v = Vector::zeros(f.ambient());
            for ray in c.rays() {
                v += ray * r.random_range(0.1..2.0);
            }
            for b in c.lineality().basis_vectors() {
                v += b * r.random_range(-2.0..2.0);
            }
            v
        };
        match one_param_limit(f, &eps, &v)? {
            None => {
                report.absent += 1;
                if f.cones().iter().any(|c| c.contains(&v)) {
                    report.mismatches += 1;
                }
            }
            Some(p) => {
                *report.groups.entry(p.cone).or_default() += 1;
                let holders: Vec<ConeId> = (0..f.len())
                    .filter(|&k| f.cones()[k].in_relative_interior(&v))
                    .collect();
                if holders != [p.cone] || p.orbit.norm() > 0.0 {
                    report.mismatches += 1;
                }
            }
        }
    }
    Ok(report)
}

/// The projective embedding `Y_Σ → Δ^A` for the normal fan of `conv(A)`:
/// coordinates `exp(−(a − f)·v)` on the face `F` attached to the cone of `p`
/// and zero elsewhere, normalized to the simplex. `f` is the `choice`-th label
/// of `F`; the result does not depend on it.
pub fn embed_simplex_with(
    a: &PointConfig,
    nf: &NormalFan,
    p: &FanPoint,
    choice: usize,
) -> Result<ProjPoint> {
    check_dim(&p.orbit, a.ambient())?;
    let face = nf.faces.get(p.cone).ok_or(Error::UnknownCone(p.cone))?;
    if face.iter().any(|&i| i >= a.len()) {
        return Err(Error::NotAFace);
    }
    let f = a.point(face[choice % face.len()]);
    // Shift exponents by their minimum for stable normalization.
    let ex: Vec<(usize, f64)> = face
        .iter()
        .map(|&i| (i, -(a.point(i) - f).dot(&p.orbit)))
        .collect();
    let m = ex.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let mut z = Vector::zeros(a.len());
    for (i, e) in ex {
        z[i] = (e - m).exp();
    }
    ProjPoint::from_ray(&z)
}

/// [`embed_simplex_with`] using the first label of the face.
pub fn embed_simplex(a: &PointConfig, nf: &NormalFan, p: &FanPoint) -> Result<ProjPoint> {
    embed_simplex_with(a, nf, p, 0)
}
