//! Labeled point configurations `A ⊂ M`, their faces and relations.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{self, null_space, AffineFrame, Vector};
use crate::polytope::{hull_faces, HullFace};
use crate::tolerance::Tolerance;

/// A lift `λ ∈ R^A`, indexed like the configuration's labels.
pub type Lift = Vector;
/// Positive weights `w ∈ R^A_>`, indexed like the configuration's labels.
pub type Weights = Vector;

/// A face of a configuration, as an ascending list of label indices.
pub type LabelSet = Vec<usize>;

#[derive(Debug)]
pub struct PointConfig {
    labels: Vec<String>,
    points: Vec<Vector>,
    affine: bool,
    ambient: usize,
    tol: Tolerance,
    hull: OnceLock<Result<Vec<HullFace>>>,
    cone_faces: OnceLock<Result<Vec<LabelSet>>>,
    frame: OnceLock<AffineFrame>,
}

impl Clone for PointConfig {
    fn clone(&self) -> Self {
        Self::build(
            self.labels.clone(),
            self.points.clone(),
            self.affine,
            self.ambient,
            self.tol,
        )
    }
}

impl PointConfig {
    /// Builds a configuration. Labels must be unique; points may coincide.
    ///
    /// With `affine = true` the points must lie on a hyperplane `a·v = r`
    /// with `r ≠ 0`. With `affine = false` projective constructions use the
    /// homogenized points `(a, 1)`, which only changes coordinates of
    /// cocharacters, not the geometry of `conv(A)`.
    pub fn new(labels: Vec<String>, points: Vec<Vector>, affine: bool) -> Result<Self> {
        Self::with_tolerance(labels, points, affine, Tolerance::default())
    }

    pub fn with_tolerance(
        labels: Vec<String>,
        points: Vec<Vector>,
        affine: bool,
        tol: Tolerance,
    ) -> Result<Self> {
        tol.validate()?;
        if points.is_empty() {
            return Err(Error::Empty("point configuration"));
        }
        if labels.len() != points.len() {
            return Err(Error::LabelMismatch(labels.len(), points.len()));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::BadLabel(l.clone()));
            }
        }
        let ambient = points[0].len();
        for p in &points {
            linalg::check_dim(p, ambient)?;
            if !p.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidGeometry("non-finite coordinate".into()));
            }
        }
        if affine && !lies_on_affine_hyperplane(&points, ambient, tol.eps_geom) {
            return Err(Error::InvalidGeometry(
                "points do not lie on an affine hyperplane missing the origin".into(),
            ));
        }
        Ok(Self::build(labels, points, affine, ambient, tol))
    }

    /// Unlabeled convenience constructor; labels are `0, 1, …`.
    pub fn from_points(points: Vec<Vector>, affine: bool) -> Result<Self> {
        let labels = (0..points.len()).map(|i| i.to_string()).collect();
        Self::new(labels, points, affine)
    }

    fn build(
        labels: Vec<String>,
        points: Vec<Vector>,
        affine: bool,
        ambient: usize,
        tol: Tolerance,
    ) -> Self {
        Self {
            labels,
            points,
            affine,
            ambient,
            tol,
            hull: OnceLock::new(),
            cone_faces: OnceLock::new(),
            frame: OnceLock::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Vector {
        &self.points[i]
    }

    pub fn is_affine(&self) -> bool {
        self.affine
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Coordinates of the points inside the affine span of `conv(A)`.
    pub fn frame(&self) -> &AffineFrame {
        self.frame
            .get_or_init(|| AffineFrame::of_points(&self.points, self.ambient, self.tol.eps_geom))
    }

    /// Affine coordinates `y_a` of every point.
    pub fn affine_coords(&self) -> Vec<Vector> {
        let f = self.frame();
        self.points.iter().map(|p| f.coords(p)).collect()
    }

    /// Dimension of `conv(A)`.
    pub fn dim(&self) -> usize {
        self.frame().dim()
    }

    pub fn diameter(&self) -> f64 {
        linalg::diameter(&self.points)
    }

    /// Nonempty faces of `conv(A)` with their exposing functionals.
    pub fn hull_faces(&self) -> Result<&[HullFace]> {
        self.hull
            .get_or_init(|| hull_faces(&self.points, self.ambient, self.tol.eps_geom))
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(Clone::clone)
    }

    /// Faces of `A`: its intersections with the nonempty faces of `conv(A)`,
    /// including `A` itself, sorted by dimension.
    pub fn config_faces(&self) -> Result<Vec<LabelSet>> {
        Ok(self
            .hull_faces()?
            .iter()
            .map(|f| f.members.clone())
            .collect())
    }

    /// The inner normal fan of `conv(A)`; the face attached to each cone is
    /// the set of labels on it.
    pub fn normal_fan(&self) -> Result<crate::polytope::NormalFan> {
        crate::polytope::normal_fan_of(
            &self.points,
            self.hull_faces()?,
            self.ambient,
            self.tol.eps_geom,
        )
    }

    /// Faces of `A` as a cone configuration: intersections with faces of
    /// `cone(A)`. These govern the support of points of `Y_A`. The apex face
    /// (no labels) is omitted.
    pub fn cone_faces(&self) -> Result<&[LabelSet]> {
        self.cone_faces
            .get_or_init(|| {
                let c = crate::cone::Cone::new(self.ambient, &self.points, self.tol.eps_geom)?;
                let tol = crate::cone::incidence_tol(self.tol.eps_geom);
                let mut out = Vec::new();
                for f in c.face_lattice().faces {
                    let members: LabelSet = (0..self.len())
                        .filter(|&i| {
                            let p = &self.points[i];
                            f.exposing.dot(p).abs() <= tol * p.norm().max(1.0)
                        })
                        .collect();
                    if !members.is_empty() && !out.contains(&members) {
                        out.push(members);
                    }
                }
                Ok(out)
            })
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(Clone::clone)
    }

    /// Orthonormal basis of the linear relations `Σ κ_a a = 0` among the
    /// points; each `κ = κ⁺ − κ⁻` gives the binomial `z^{κ⁺} = z^{κ⁻}`.
    pub fn relation_basis(&self) -> Vec<Vector> {
        relations_of(
            &self.points,
            &(0..self.len()).collect::<Vec<_>>(),
            self.ambient,
            self.tol.eps_geom,
        )
    }

    /// Checks that a lift has one finite value per label.
    pub fn check_lift(&self, lam: &Lift) -> Result<()> {
        linalg::check_dim(lam, self.len())?;
        if let Some(i) = lam.iter().position(|x| !x.is_finite()) {
            return Err(Error::BadLabel(self.labels[i].clone()));
        }
        Ok(())
    }

    /// Checks that weights are finite and strictly positive.
    pub fn check_weights(&self, w: &Weights) -> Result<()> {
        linalg::check_dim(w, self.len())?;
        if let Some(i) = w.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::NonPositiveWeight {
                label: self.labels[i].clone(),
            });
        }
        Ok(())
    }

    /// The sub-configuration on the given labels (labels keep their names).
    pub fn restrict(&self, labels: &[usize]) -> Result<Self> {
        Self::with_tolerance(
            labels.iter().map(|&i| self.labels[i].clone()).collect(),
            labels.iter().map(|&i| self.points[i].clone()).collect(),
            false,
            self.tol,
        )
    }
}

/// Relations among the points with the given indices, as vectors in `R^A`
/// supported on those indices.
pub(crate) fn relations_of(
    points: &[Vector],
    idx: &[usize],
    ambient: usize,
    eps: f64,
) -> Vec<Vector> {
    let n = points.len();
    let rows: Vec<Vector> = (0..ambient)
        .map(|j| Vector::from_fn(idx.len(), |i, _| points[idx[i]][j]))
        .collect();
    let scale = rows
        .iter()
        .map(|r| r.amax())
        .fold(0.0, f64::max)
        .max(1e-300);
    let rows: Vec<Vector> = rows.into_iter().map(|r| r / scale).collect();
    null_space(&rows, idx.len(), eps)
        .basis_vectors()
        .into_iter()
        .map(|k| {
            let mut full = Vector::zeros(n);
            for (i, &j) in idx.iter().enumerate() {
                full[j] = k[i];
            }
            full
        })
        .collect()
}

fn lies_on_affine_hyperplane(points: &[Vector], ambient: usize, eps: f64) -> bool {
    let m = nalgebra::DMatrix::from_fn(points.len(), ambient, |i, j| points[i][j]);
    let ones = Vector::from_element(points.len(), 1.0);
    let svd = m.clone().svd(true, true);
    let Ok(v) = svd.solve(&ones, eps) else {
        return false;
    };
    let scale = points.iter().map(|p| p.norm()).fold(1.0, f64::max);
    (m * v - ones).amax() <= eps.sqrt().min(1e-6) * scale
}
