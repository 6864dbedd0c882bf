//! Points of the irrational affine toric variety `Y_A ⊂ R^A_≥` and of its
//! projective counterpart `Z_A ⊂ Δ^A`: the parameterization `φ_A`, binomial
//! membership, supports and the tautological (moment) map.

use crate::config::{relations_of, LabelSet, PointConfig};
use crate::error::{Error, Result};
use crate::linalg::{check_dim, Vector};
use crate::polytope::homogenize;

/// The torus element `γ_v`, acting on characters by `u ↦ exp(−u·v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusElement {
    pub v: Vector,
}

impl TorusElement {
    pub fn new(v: Vector) -> Self {
        Self { v }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            v: Vector::zeros(dim),
        }
    }

    /// Group law `γ_v · γ_w = γ_{v+w}`.
    pub fn mul(&self, other: &Self) -> Self {
        Self {
            v: &self.v + &other.v,
        }
    }

    pub fn inverse(&self) -> Self {
        Self { v: -&self.v }
    }

    /// The character value `t^u = exp(−u·v)`.
    pub fn character(&self, u: &Vector) -> f64 {
        (-u.dot(&self.v)).exp()
    }
}

/// A point `z ∈ R^A_≥`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePoint {
    pub coords: Vector,
}

/// A point of the simplex `Δ^A`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjPoint {
    pub coords: Vector,
}

impl ProjPoint {
    /// The point where the ray through a nonzero `z ∈ R^A_≥` meets `Δ^A`.
    pub fn from_ray(z: &Vector) -> Result<Self> {
        if z.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidGeometry(
                "coordinates must be finite and nonnegative".into(),
            ));
        }
        let s = z.sum();
        if s <= 0.0 {
            return Err(Error::Empty("support"));
        }
        Ok(Self { coords: z / s })
    }
}

/// `φ_A(γ_v) = (exp(−a·v))_a`.
pub fn phi(a: &PointConfig, t: &TorusElement) -> Result<AffinePoint> {
    check_dim(&t.v, a.ambient())?;
    Ok(AffinePoint {
        coords: Vector::from_fn(a.len(), |i, _| t.character(a.point(i))),
    })
}

/// Log-space residual of the binomial `z^{κ⁺} = z^{κ⁻}` relative to the size
/// of its terms. Coordinates off the support of `κ` are ignored.
pub fn binomial_residual(kappa: &Vector, z: &Vector) -> f64 {
    let mut sum = 0.0;
    let mut mag: f64 = 0.0;
    for (k, x) in kappa.iter().zip(z.iter()) {
        if *k != 0.0 {
            let t = k * x.ln();
            sum += t;
            mag += t.abs();
        }
    }
    sum.abs() / mag.max(1.0)
}

fn member_of(points: &[Vector], faces: &[LabelSet], z: &Vector, eps: f64) -> Option<LabelSet> {
    if z.iter().any(|x| !(x.is_finite() && *x >= -eps)) {
        return None;
    }
    let support: LabelSet = (0..z.len()).filter(|&i| z[i] > eps).collect();
    if support.is_empty() || !faces.contains(&support) {
        return None;
    }
    let d = points[0].len();
    let ok = relations_of(points, &support, d, eps)
        .iter()
        .all(|k| binomial_residual(k, z) <= eps);
    ok.then_some(support)
}

/// Membership in `Y_A`: the support is a face of `A` and the positive
/// coordinates satisfy the binomials of that face. The all-zero point is
/// rejected.
pub fn is_member(a: &PointConfig, z: &AffinePoint) -> bool {
    support_face(a, z).is_ok()
}

/// The face `F` with `z ∈ Y°_F`.
pub fn support_face(a: &PointConfig, z: &AffinePoint) -> Result<LabelSet> {
    check_dim(&z.coords, a.len())?;
    let faces = a.cone_faces()?;
    member_of(a.points(), faces, &z.coords, a.tolerance().eps_geom).ok_or(Error::NotAMember)
}

/// Membership in `Z_A`: the ray through `p` meets the affine toric variety of
/// the homogenized configuration `{(a, 1)}`.
pub fn is_member_projective(a: &PointConfig, p: &ProjPoint) -> bool {
    if p.coords.len() != a.len() {
        return false;
    }
    let Ok(faces) = a.config_faces() else {
        return false;
    };
    let hom: Vec<Vector> = a.points().iter().map(homogenize).collect();
    member_of(&hom, &faces, &p.coords, a.tolerance().eps_geom).is_some()
}

/// The tautological map `π_A(z) = Σ z_a a`.
pub fn moment(a: &PointConfig, z: &Vector) -> Result<Vector> {
    check_dim(z, a.len())?;
    Ok(a.points()
        .iter()
        .zip(z.iter())
        .fold(Vector::zeros(a.ambient()), |acc, (p, c)| acc + p * *c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;
    use proptest::prelude::*;

    fn line() -> PointConfig {
        PointConfig::from_points(vec![vector(&[0.0]), vector(&[1.0]), vector(&[2.0])], false)
            .unwrap()
    }

    fn cone_example() -> PointConfig {
        let s2 = 2f64.sqrt();
        PointConfig::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vector(&[-s2, 1.0]),
                vector(&[1.0, 0.0]),
                vector(&[1.0, 1.0]),
            ],
            false,
        )
        .unwrap()
    }

    #[test]
    fn phi_values() {
        let a = line();
        let one = phi(&a, &TorusElement::identity(1)).unwrap();
        assert_eq!(one.coords, vector(&[1.0, 1.0, 1.0]));
        let z = phi(&a, &TorusElement::new(vector(&[2f64.ln()]))).unwrap();
        assert!((z.coords - vector(&[1.0, 0.5, 0.25])).norm() < 1e-15);
    }

    #[test]
    fn irrational_binomial() {
        let a = cone_example();
        let zc = 2.0 * 3f64.powf(1.0 + 2f64.sqrt());
        assert!((zc - 28.37).abs() < 0.01);
        assert!(is_member(
            &a,
            &AffinePoint {
                coords: vector(&[2.0, 3.0, zc])
            }
        ));
        assert!(!is_member(
            &a,
            &AffinePoint {
                coords: vector(&[2.0, 3.0, zc * 1.001])
            }
        ));
        assert!(!is_member(
            &a,
            &AffinePoint {
                coords: vector(&[0.0, 3.0, 1.0])
            }
        ));
        let z = AffinePoint {
            coords: vector(&[0.0, 3.0, 0.0]),
        };
        assert_eq!(support_face(&a, &z).unwrap(), vec![1]);
    }

    #[test]
    fn empty_support_is_rejected() {
        let a = cone_example();
        let z = AffinePoint {
            coords: Vector::zeros(3),
        };
        assert!(matches!(support_face(&a, &z), Err(Error::NotAMember)));
    }

    #[test]
    fn moments() {
        let a = line();
        let m = moment(&a, &vector(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])).unwrap();
        assert!((m[0] - 1.0).abs() < 1e-15);
        let m = moment(&a, &vector(&[0.11620, 0.26759, 0.61620])).unwrap();
        assert!((m[0] - 1.5).abs() < 1e-4);
        let tri = PointConfig::from_points(
            vec![
                vector(&[0.0, 0.0]),
                vector(&[3.0, 0.0]),
                vector(&[0.0, 3.0]),
            ],
            false,
        )
        .unwrap();
        let m = moment(&tri, &vector(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])).unwrap();
        assert!((m - vector(&[1.0, 1.0])).norm() < 1e-15);
    }

    #[test]
    fn projective_membership() {
        let a = line();
        // z₀z₂ = z₁² after homogenization.
        let p = ProjPoint::from_ray(&vector(&[1.0, 2.0, 4.0])).unwrap();
        assert!(is_member_projective(&a, &p));
        let q = ProjPoint::from_ray(&vector(&[1.0, 3.0, 4.0])).unwrap();
        assert!(!is_member_projective(&a, &q));
        let edge = ProjPoint::from_ray(&vector(&[1.0, 0.0, 4.0])).unwrap();
        assert!(!is_member_projective(&a, &edge));
        let vertex = ProjPoint::from_ray(&vector(&[0.0, 0.0, 4.0])).unwrap();
        assert!(is_member_projective(&a, &vertex));
    }

    proptest! {
        #[test]
        fn phi_images_satisfy_binomials(
            pts in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 2), 3..7),
            v in prop::collection::vec(-1.5f64..1.5, 2),
        ) {
            let a = PointConfig::from_points(pts.iter().map(|p| vector(p)).collect(), false).unwrap();
            let z = phi(&a, &TorusElement::new(vector(&v))).unwrap();
            for k in a.relation_basis() {
                prop_assert!(binomial_residual(&k, &z.coords) <= 1e-10);
            }
            let f = support_face(&a, &z).unwrap();
            prop_assert_eq!(f.len(), a.len());
        }

        #[test]
        fn group_law(v in prop::collection::vec(-2.0f64..2.0, 3), w in prop::collection::vec(-2.0f64..2.0, 3), u in prop::collection::vec(-2.0f64..2.0, 3)) {
            let (v, w, u) = (TorusElement::new(vector(&v)), TorusElement::new(vector(&w)), vector(&u));
            let lhs = v.mul(&w).character(&u);
            let rhs = v.character(&u) * w.character(&u);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1.0));
            prop_assert!((v.mul(&v.inverse()).v.norm()) < 1e-15);
        }
    }
}
