//! Regular triangulations and vertices of the secondary polytope.
//!
//! Triangulations are found by sampling random lifts and by walking across
//! the walls of cones already found. For tiny planar configurations an
//! exhaustive enumerator (all combinatorial triangulations, each tested for
//! regularity by a linear program) serves as a completeness oracle.

use std::collections::{BTreeMap, BTreeSet};

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{LabelSet, Lift, PointConfig};
use crate::error::{Error, Result};
use crate::linalg::{simplex_volume, AffineFrame, Vector};
use crate::rng;
use crate::subdivision::{gkz_vertex, hull_volume, regular_subdivision, Subdivision};

/// Largest configuration accepted by the sampling enumerator.
pub const MAX_ENUMERATION_SIZE: usize = 12;
/// Largest configuration handled by the exhaustive oracle.
pub const MAX_EXHAUSTIVE_SIZE: usize = 6;

/// A regular triangulation with its GKZ vector and a lift inducing it.
#[derive(Debug, Clone, Serialize)]
pub struct RegularTriangulation {
    pub subdivision: Subdivision,
    pub gkz: Vec<f64>,
    pub lift: Vec<f64>,
}

/// Result of the sampling enumeration.
#[derive(Debug, Clone, Serialize)]
pub struct Enumeration {
    pub triangulations: Vec<RegularTriangulation>,
    /// Number of random lifts drawn.
    pub budget: usize,
    /// Number of wall-crossing probes performed after sampling.
    pub wall_probes: usize,
    /// `Some(true)` when the exhaustive oracle applies and finds exactly the
    /// same triangulations, `Some(false)` when it finds more, `None` when the
    /// configuration is too large for it. Sampling alone never certifies
    /// completeness.
    pub oracle_agrees: Option<bool>,
    /// Wall crossing stopped at its cap (four times the budget) with cones
    /// still unexplored.
    pub exhausted: bool,
}

/// A triangulation from a deterministic sequence of random lifts.
pub fn generic_triangulation(a: &PointConfig) -> Result<Subdivision> {
    let mut r = rng::stream(0x7a11, 0);
    for _ in 0..64 {
        let lam = rng::gaussian_vector(&mut r, a.len());
        let s = regular_subdivision(a, &lam)?;
        if s.is_triangulation(a) {
            return Ok(s);
        }
    }
    Err(Error::InvalidGeometry(
        "no triangulation found from random lifts".into(),
    ))
}

fn record(
    found: &mut BTreeMap<Subdivision, Lift>,
    a: &PointConfig,
    s: Subdivision,
    lam: &Lift,
) -> bool {
    if !s.is_triangulation(a) || found.contains_key(&s) {
        return false;
    }
    found.insert(s, lam.clone());
    true
}

/// Crosses the wall of the cone of `lam` in direction `dir`: bisects for the
/// first change of subdivision along `lam + t·dir` and steps slightly past it.
fn cross_wall(a: &PointConfig, lam: &Lift, dir: &Vector) -> Result<Option<(Subdivision, Lift)>> {
    let s0 = regular_subdivision(a, lam)?;
    let scale = lam.norm().max(1.0);
    let mut hi = scale;
    let mut far = None;
    for _ in 0..8 {
        let cand = lam + dir * hi;
        if regular_subdivision(a, &cand)? != s0 {
            far = Some(hi);
            break;
        }
        hi *= 4.0;
    }
    let Some(mut hi) = far else {
        return Ok(None);
    };
    let mut lo = 0.0;
    for _ in 0..24 {
        let mid = 0.5 * (lo + hi);
        if regular_subdivision(a, &(lam + dir * mid))? == s0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let step = hi + 1e-3 * hi.max(1e-3) + 1e-4 * scale;
    let past = lam + dir * step;
    Ok(Some((regular_subdivision(a, &past)?, past)))
}

/// Samples `budget` random lifts, then probes walls of every cone found, and
/// returns the distinct regular triangulations with their GKZ vectors.
pub fn enumerate_regular_triangulations(
    a: &PointConfig,
    budget: usize,
    seed: u64,
) -> Result<Enumeration> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if a.len() > MAX_ENUMERATION_SIZE {
        return Err(Error::InvalidGeometry(format!(
            "configuration has {} points; enumeration supports at most {MAX_ENUMERATION_SIZE}",
            a.len()
        )));
    }
    let n = a.len();
    let sampled: Vec<(Subdivision, Lift)> = (0..budget)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let lam = rng::gaussian_vector(&mut r, n);
            regular_subdivision(a, &lam).map(|s| (s, lam))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut found: BTreeMap<Subdivision, Lift> = BTreeMap::new();
    for (s, lam) in sampled {
        record(&mut found, a, s, &lam);
    }
    // Wall crossing from every cone found, until nothing new appears.
    let mut probes = 0usize;
    let mut frontier: Vec<(Subdivision, Lift)> =
        found.iter().map(|(s, l)| (s.clone(), l.clone())).collect();
    let mut round = 0u64;
    while !frontier.is_empty() && found.len() < 4 * budget {
        let per_cone = 2 * n;
        let results: Vec<Vec<(Subdivision, Lift)>> = frontier
            .par_iter()
            .enumerate()
            .map(|(j, (_, lam))| {
                let mut r = rng::stream(seed ^ 0x9e37_79b9_7f4a_7c15, (round << 32) + j as u64);
                let mut out = Vec::new();
                for _ in 0..per_cone {
                    let dir = rng::unit_vector(&mut r, n);
                    if let Some(hit) = cross_wall(a, lam, &dir)? {
                        out.push(hit);
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        probes += frontier.len() * per_cone;
        let mut next = Vec::new();
        for (s, lam) in results.into_iter().flatten() {
            if record(&mut found, a, s.clone(), &lam) {
                next.push((s, lam));
            }
        }
        frontier = next;
        round += 1;
    }
    let exhausted = !frontier.is_empty();
    let mut triangulations = Vec::with_capacity(found.len());
    for (s, lam) in found {
        let gkz = gkz_vertex(a, &s)?;
        triangulations.push(RegularTriangulation {
            subdivision: s,
            gkz: gkz.iter().copied().collect(),
            lift: lam.iter().copied().collect(),
        });
    }
    let oracle_agrees = if exhaustive_applies(a) {
        let exact = exhaustive_regular_triangulations(a)?;
        let mine: BTreeSet<&Subdivision> = triangulations.iter().map(|t| &t.subdivision).collect();
        let theirs: BTreeSet<&Subdivision> = exact.iter().map(|t| &t.subdivision).collect();
        Some(mine == theirs)
    } else {
        None
    };
    Ok(Enumeration {
        triangulations,
        budget,
        wall_probes: probes,
        oracle_agrees,
        exhausted,
    })
}

/// Whether the exhaustive oracle handles this configuration.
pub fn exhaustive_applies(a: &PointConfig) -> bool {
    a.len() <= MAX_EXHAUSTIVE_SIZE && a.dim() <= 2
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Barycentric coordinates of `p` with respect to a full-dimensional simplex.
fn barycentric(simplex: &[Vector], p: &Vector) -> Vector {
    let k = simplex.len() - 1;
    if k == 0 {
        return Vector::from_element(1, 1.0);
    }
    let m = nalgebra::DMatrix::from_fn(k, k, |r, c| simplex[c + 1][r] - simplex[0][r]);
    let rhs = p - &simplex[0];
    let x = m.lu().solve(&rhs).unwrap_or_else(|| Vector::zeros(k));
    let mut b = Vector::zeros(k + 1);
    b[0] = 1.0 - x.sum();
    for i in 0..k {
        b[i + 1] = x[i];
    }
    b
}

/// Whether the interiors of two full-dimensional simplices (dimension ≤ 2)
/// are disjoint, by the separating axis test.
fn interiors_disjoint(s: &[Vector], t: &[Vector], tol: f64) -> bool {
    let k = s.len() - 1;
    match k {
        0 => false,
        1 => {
            let (a0, a1) = (s[0][0].min(s[1][0]), s[0][0].max(s[1][0]));
            let (b0, b1) = (t[0][0].min(t[1][0]), t[0][0].max(t[1][0]));
            a1.min(b1) - a0.max(b0) <= tol
        }
        _ => {
            let axes: Vec<Vector> = [s, t]
                .iter()
                .flat_map(|tri| {
                    (0..3).map(move |i| {
                        let e = &tri[(i + 1) % 3] - &tri[i];
                        Vector::from_vec(vec![-e[1], e[0]])
                    })
                })
                .collect();
            axes.iter().any(|ax| {
                let ps = s.iter().map(|p| ax.dot(p));
                let pt = t.iter().map(|p| ax.dot(p));
                let (smin, smax) = ps.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                    (a.min(x), b.max(x))
                });
                let (tmin, tmax) = pt.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                    (a.min(x), b.max(x))
                });
                let t = tol * ax.norm();
                smax <= tmin + t || tmax <= smin + t
            })
        }
    }
}

struct Search<'a> {
    y: &'a [Vector],
    simplices: Vec<Vec<usize>>,
    volumes: Vec<f64>,
    total: f64,
    tol: f64,
    out: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn pts(&self, s: usize) -> Vec<Vector> {
        self.simplices[s]
            .iter()
            .map(|&i| self.y[i].clone())
            .collect()
    }

    fn compatible(&self, s: usize, chosen: &[usize]) -> bool {
        let ps = self.pts(s);
        chosen.iter().all(|&c| {
            let pc = self.pts(c);
            interiors_disjoint(&ps, &pc, self.tol)
                && self.face_to_face(s, c)
                && self.face_to_face(c, s)
        })
    }

    /// No vertex of simplex `t` lies in the closed simplex `s` unless it is a
    /// vertex of `s`.
    fn face_to_face(&self, s: usize, t: usize) -> bool {
        let ps = self.pts(s);
        self.simplices[t].iter().all(|v| {
            self.simplices[s].contains(v)
                || barycentric(&ps, &self.y[*v]).iter().any(|&b| b < -self.tol)
        })
    }

    fn run(&mut self, start: usize, chosen: &mut Vec<usize>, vol: f64) {
        if (vol - self.total).abs() <= self.tol * self.total.max(1.0) {
            self.out.push(chosen.clone());
            return;
        }
        if vol > self.total {
            return;
        }
        // The simplex covering the first uncovered region must come next; to
        // keep the search exact yet simple, branch over all later simplices.
        for s in start..self.simplices.len() {
            if self.compatible(s, chosen) {
                chosen.push(s);
                let v = vol + self.volumes[s];
                self.run(s + 1, chosen, v);
                chosen.pop();
            }
        }
    }
}

/// All triangulations of `A` as facet lists (regular or not), for
/// configurations of dimension at most 2.
pub fn all_triangulations(a: &PointConfig) -> Result<Vec<Vec<LabelSet>>> {
    if a.dim() > 2 {
        return Err(Error::InvalidGeometry(
            "combinatorial search needs dimension ≤ 2".into(),
        ));
    }
    let y = a.affine_coords();
    let k = a.dim();
    let eps = a.tolerance().eps_geom;
    let tol = 1e-9_f64.max(eps) * a.diameter().max(1.0);
    let mut simplices = Vec::new();
    let mut volumes = Vec::new();
    for s in subsets(a.len(), k + 1) {
        let pts: Vec<Vector> = s.iter().map(|&i| y[i].clone()).collect();
        let frame = AffineFrame::of_points(&pts, k, eps);
        if frame.dim() == k {
            volumes.push(simplex_volume(&pts));
            simplices.push(s);
        }
    }
    let total = hull_volume(a)?;
    let mut search = Search {
        y: &y,
        simplices,
        volumes,
        total,
        tol,
        out: Vec::new(),
    };
    search.run(0, &mut Vec::new(), 0.0);
    let simplices = search.simplices.clone();
    Ok(search
        .out
        .into_iter()
        .map(|ids| ids.into_iter().map(|i| simplices[i].clone()).collect())
        .collect())
}

/// Decides regularity of a triangulation by a linear program: maximize the
/// least height `t` of a point above the affine extension of the lift on a
/// simplex not containing it, with `|λ_a| ≤ 1`. Returns a certifying lift when
/// the optimum is positive.
pub fn regularity_certificate(a: &PointConfig, facets: &[LabelSet]) -> Result<Option<Lift>> {
    let y = a.affine_coords();
    let n = a.len();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let lam: Vec<_> = (0..n).map(|_| lp.add_var(0.0, (-1.0, 1.0))).collect();
    let t = lp.add_var(1.0, (f64::NEG_INFINITY, 1.0));
    for f in facets {
        let pts: Vec<Vector> = f.iter().map(|&i| y[i].clone()).collect();
        for i in 0..n {
            if f.contains(&i) {
                continue;
            }
            // λ_i − Σ β_j λ_{f_j} − t ≥ 0
            let beta = barycentric(&pts, &y[i]);
            let mut coef = vec![0.0; n];
            coef[i] += 1.0;
            for (j, &fj) in f.iter().enumerate() {
                coef[fj] -= beta[j];
            }
            let mut expr: Vec<(microlp::Variable, f64)> = coef
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(j, c)| (lam[j], *c))
                .collect();
            expr.push((t, -1.0));
            lp.add_constraint(expr, ComparisonOp::Ge, 0.0);
        }
    }
    let sol = lp
        .solve()
        .map_err(|e| Error::InvalidGeometry(format!("regularity program failed: {e}")))?;
    if *sol.var_value(t) <= 1e-7 {
        return Ok(None);
    }
    Ok(Some(Vector::from_fn(n, |i, _| *sol.var_value(lam[i]))))
}

/// Every regular triangulation of a configuration with at most
/// [`MAX_EXHAUSTIVE_SIZE`] points in dimension at most 2, each certified by
/// recomputing the subdivision of its lift.
pub fn exhaustive_regular_triangulations(a: &PointConfig) -> Result<Vec<RegularTriangulation>> {
    if !exhaustive_applies(a) {
        return Err(Error::InvalidGeometry(format!(
            "exhaustive enumeration needs at most {MAX_EXHAUSTIVE_SIZE} points in dimension ≤ 2"
        )));
    }
    let mut out = Vec::new();
    for facets in all_triangulations(a)? {
        let Some(lam) = regularity_certificate(a, &facets)? else {
            continue;
        };
        let s = regular_subdivision(a, &lam)?;
        let expected: BTreeSet<LabelSet> = facets.iter().cloned().collect();
        let got: BTreeSet<LabelSet> = s.facets().iter().cloned().collect();
        if got != expected {
            return Err(Error::InvalidGeometry(format!(
                "regularity certificate for {facets:?} induces {:?}",
                s.facets()
            )));
        }
        let gkz = gkz_vertex(a, &s)?;
        out.push(RegularTriangulation {
            subdivision: s,
            gkz: gkz.iter().copied().collect(),
            lift: lam.iter().copied().collect(),
        });
    }
    out.sort_by(|x, y| x.subdivision.cmp(&y.subdivision));
    Ok(out)
}

/// The vertex of a list of GKZ vectors minimizing `⟨λ, ·⟩`, with the margin
/// to the runner-up.
pub fn minimizing_vertex(
    triangulations: &[RegularTriangulation],
    lam: &Lift,
) -> Option<(usize, f64)> {
    let mut vals: Vec<(usize, f64)> = triangulations
        .iter()
        .enumerate()
        .map(|(i, t)| (i, t.gkz.iter().zip(lam.iter()).map(|(g, l)| g * l).sum()))
        .collect();
    vals.sort_by(|x, y| x.1.total_cmp(&y.1));
    let (best, v) = *vals.first()?;
    let gap = vals.get(1).map_or(f64::INFINITY, |w| w.1 - v);
    Some((best, gap))
}

/// A random lift drawn from the standard normal distribution.
pub fn random_lift<R: Rng>(r: &mut R, a: &PointConfig) -> Lift {
    rng::gaussian_vector(r, a.len())
}
