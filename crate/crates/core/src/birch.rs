//! Inverse of the moment map on `w.Z_A`: given a target `u ∈ conv(A)`,
//! the unique point `z` of the translated projective toric variety with
//! `Σ z_a a = u`.
//!
//! The target is first located in the relative interior of a face `F` of
//! `conv(A)`. On `F` the cocharacter minimizes the strictly convex potential
//! `log Σ_{a∈F} w_a exp(−a·v) + u·v` in the affine coordinates of `F`, by
//! damped Newton steps with an Armijo line search.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::config::{LabelSet, PointConfig, Weights};
use crate::error::{Error, Result};
use crate::linalg::{check_dim, AffineFrame, Vector};

/// Iteration cap of the Newton solver.
pub const MAX_ITERATIONS: usize = 500;
/// Initial bound on the change of any log-probability ratio in one step;
/// the bound grows while full steps keep being accepted.
pub const INITIAL_LOG_STEP: f64 = 8.0;
/// Eigenvalues of the Hessian, relative to the squared diameter, are never
/// treated as smaller than this; it only matters on nearly degenerate
/// distributions far from the optimum.
pub const HESSIAN_FLOOR: f64 = 1e-12;
/// Upper limit for the step bound.
pub const MAX_LOG_STEP: f64 = 8192.0;
/// Eigenvalues of the Hessian are floored at its largest one over this.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct BirchSolution {
    /// The point of `Δ^A`, zero off the face.
    pub z: Vector,
    /// Minimal-norm cocharacter on the face: `z_a ∝ w_a exp(−a·v)` for `a ∈ F`.
    pub v: Vector,
    /// Labels of the face of `conv(A)` whose relative interior holds the target.
    pub face: LabelSet,
    /// `‖π_A(z) − u‖`.
    pub residual: f64,
    pub iterations: usize,
}

/// The face of `conv(A)` whose relative interior contains `u`.
pub fn locate_face(a: &PointConfig, u: &Vector) -> Result<LabelSet> {
    check_dim(u, a.ambient())?;
    let faces = a.hull_faces()?;
    let scale = a.diameter().max(u.norm()).max(1.0);
    let tol = a.tolerance().eps_geom * scale;
    let off = a.frame().distance(u);
    let mut worst = off;
    for f in faces {
        let val = (f.normal.dot(u) + f.offset) / f.normal.norm().max(1e-300);
        if f.normal.norm() > 0.0 {
            worst = worst.max(-val);
        }
    }
    if worst > tol {
        return Err(Error::OutsideHull { violation: worst });
    }
    faces
        .iter()
        .find(|f| {
            let n = f.normal.norm();
            n == 0.0 || ((f.normal.dot(u) + f.offset) / n).abs() <= tol
        })
        .map(|f| f.members.clone())
        .ok_or(Error::OutsideHull { violation: worst })
}

struct Potential<'a> {
    y: &'a [Vector],
    logw: &'a [f64],
    target: Vector,
}

impl Potential<'_> {
    /// Probabilities `p_a ∝ w_a exp(−y_a·s)` and the log-partition value.
    fn probs(&self, s: &Vector) -> (Vec<f64>, f64) {
        let e: Vec<f64> = self
            .y
            .iter()
            .zip(self.logw)
            .map(|(y, lw)| lw - y.dot(s))
            .collect();
        let m = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = e.iter().map(|x| (x - m).exp()).sum();
        let lse = m + sum.ln();
        (e.iter().map(|x| (x - lse).exp()).collect(), lse)
    }

    fn value(&self, s: &Vector) -> f64 {
        self.probs(s).1 + self.target.dot(s)
    }

    fn mean(&self, p: &[f64]) -> Vector {
        self.y
            .iter()
            .zip(p)
            .fold(Vector::zeros(self.target.len()), |acc, (y, w)| acc + y * *w)
    }

    /// Gradient of the potential, `ū − Σ p_a y_a`.
    fn gradient(&self, p: &[f64]) -> Vector {
        &self.target - self.mean(p)
    }

    fn hessian(&self, p: &[f64]) -> DMatrix<f64> {
        let k = self.target.len();
        let mean = self.mean(p);
        let mut h = DMatrix::zeros(k, k);
        for (y, w) in self.y.iter().zip(p) {
            let d = y - &mean;
            h += &d * d.transpose() * *w;
        }
        h
    }
}

/// Solves the moment-map equation on `w.Z_A` for the target `u`.
pub fn birch_inverse(a: &PointConfig, w: &Weights, u: &Vector) -> Result<BirchSolution> {
    a.check_weights(w)?;
    birch_inverse_log(a, &w.map(f64::ln), u)
}

/// [`birch_inverse`] with weights given by their logarithms, for weights too
/// spread out to be represented directly.
pub fn birch_inverse_log(a: &PointConfig, log_w: &Vector, u: &Vector) -> Result<BirchSolution> {
    check_dim(log_w, a.len())?;
    if let Some(i) = log_w.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonPositiveWeight {
            label: a.labels()[i].clone(),
        });
    }
    let face = locate_face(a, u)?;
    let tol = a.tolerance();
    let pts: Vec<Vector> = face.iter().map(|&i| a.point(i).clone()).collect();
    let frame = AffineFrame::of_points(&pts, a.ambient(), tol.eps_geom);
    let y: Vec<Vector> = pts.iter().map(|p| frame.coords(p)).collect();
    let logw: Vec<f64> = face.iter().map(|&i| log_w[i]).collect();
    let pot = Potential {
        y: &y,
        logw: &logw,
        target: frame.coords(u),
    };
    let diam = a.diameter();
    let stop = tol.eps_opt * if diam > 0.0 { diam } else { 1.0 };
    let k = frame.dim();
    let mut s = Vector::zeros(k);
    let mut iterations = 0;
    let ydiam = crate::linalg::diameter(&y).max(f64::MIN_POSITIVE);
    let mut radius = INITIAL_LOG_STEP;
    let (mut p, _) = pot.probs(&s);
    if k > 0 {
        loop {
            let g = pot.gradient(&p);
            if g.norm() <= 0.5 * stop {
                break;
            }
            if iterations >= MAX_ITERATIONS {
                return Err(Error::NotConverged {
                    iterations,
                    residual: g.norm(),
                });
            }
            iterations += 1;
            let h = pot.hessian(&p);
            // Newton direction with the Hessian spectrum floored, so that
            // nearly degenerate distributions still yield a usable direction.
            let eig = SymmetricEigen::new(h);
            let hi = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
            let floor = (hi / MAX_CONDITION).max(HESSIAN_FLOOR * ydiam * ydiam);
            let mut dir = Vector::zeros(k);
            for (i, &l) in eig.eigenvalues.iter().enumerate() {
                let e = eig.eigenvectors.column(i);
                dir -= e * (e.dot(&g) / l.max(floor));
            }
            // Far from the optimum the Hessian can be exponentially small;
            // capping the step keeps every log-ratio change below the radius.
            // The reach bounds |dir|·diam without overflowing.
            let reach = dir.amax() * (k as f64).sqrt() * ydiam;
            let capped = reach > radius;
            let dir = if capped { dir * (radius / reach) } else { dir };
            let f0 = pot.value(&s);
            let slope = g.dot(&dir);
            let mut t = 1.0;
            let mut moved = false;
            let gnorm = g.norm();
            // The potential is a difference of terms of size about |ū|·|s|, so its
            // rounding error scales with those rather than with its value.
            let noise = 64.0 * f64::EPSILON * (f0.abs() + pot.target.norm() * s.norm() + 1.0);
            for _ in 0..60 {
                let cand = &s + &dir * t;
                let f1 = pot.value(&cand);
                // Near the optimum the decrease of the potential drowns in
                // rounding; there a shrinking gradient decides instead.
                let accept = cand != s
                    && (f1 <= f0 + 1e-4 * t * slope
                        || (f1 <= f0 + noise && pot.gradient(&pot.probs(&cand).0).norm() < gnorm));
                if accept {
                    s = cand;
                    moved = true;
                    if capped && t == 1.0 {
                        radius = (radius * 4.0).min(MAX_LOG_STEP);
                    } else if t < 1.0 {
                        radius = (radius * t).max(INITIAL_LOG_STEP);
                    }
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                return Err(Error::NotConverged {
                    iterations,
                    residual: gnorm,
                });
            }
            p = pot.probs(&s).0;
        }
    }
    let mut z = Vector::zeros(a.len());
    for (j, &i) in face.iter().enumerate() {
        z[i] = p[j];
    }
    let m = crate::affine::moment(a, &z)?;
    let v = frame.directions.basis() * &s;
    Ok(BirchSolution {
        residual: (m - u).norm(),
        z,
        v,
        face,
        iterations,
    })
}
