//! Randomized property suites with machine-readable reports.
//!
//! Every suite draws its cases from `(seed, case index)` streams and reduces
//! results in case order, so reports are identical for any thread count.

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::affine::{binomial_residual, is_member, moment, phi, AffinePoint, TorusElement};
use crate::birch::{birch_inverse, locate_face};
use crate::cone::{incidence_tol, Cone};
use crate::config::{PointConfig, Weights};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::fixtures;
use crate::linalg::{vector, Vector};
use crate::moduli::{degenerate, orbit_match, SecondaryFan};
use crate::polytope::Polytope;
use crate::rng::{self, gaussian_vector, simplex_weights, StreamRng};
use crate::secondary::{
    enumerate_regular_triangulations, exhaustive_regular_triangulations, minimizing_vertex,
    random_lift,
};
use crate::subdivision::{lift_margin, regular_subdivision};
use crate::variety::{
    act, cone_mul, dense_point, embed_simplex, embed_simplex_with, monoid_mul, one_param_limit,
    point_at, ray_sequence_limit, recover_fan, ConeLookup, FanPoint, MonoidElement,
};

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 7] = [
    "cones",
    "birch",
    "secondary",
    "limits",
    "monoid",
    "embedding",
    "moduli",
];

const EPS: f64 = 1e-9;

/// Outcome of one property over all its cases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// The extreme value of the checked quantity (largest error, or smallest
    /// margin for lower bounds); zero for purely combinatorial checks.
    pub worst: f64,
    pub passed: bool,
}

/// Outcome of a suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Accumulates case results for one check.
#[derive(Debug, Clone)]
struct Tally {
    name: &'static str,
    cases: usize,
    failures: usize,
    worst: f64,
    lower: bool,
}

impl Tally {
    /// A check whose metric is an error to be kept small.
    fn upper(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            failures: 0,
            worst: 0.0,
            lower: false,
        }
    }

    /// A check whose metric is a margin to be kept large.
    fn lower(name: &'static str) -> Self {
        Self {
            worst: f64::INFINITY,
            lower: true,
            ..Self::upper(name)
        }
    }

    fn record(&mut self, ok: bool, metric: f64) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
        }
        self.worst = if self.lower {
            self.worst.min(metric)
        } else {
            self.worst.max(metric)
        };
    }

    fn flag(&mut self, ok: bool) {
        self.record(ok, 0.0);
    }

    fn merge(&mut self, other: &Tally) {
        self.cases += other.cases;
        self.failures += other.failures;
        self.worst = if self.lower {
            self.worst.min(other.worst)
        } else {
            self.worst.max(other.worst)
        };
    }

    fn finish(&self) -> Check {
        Check {
            name: self.name.to_string(),
            cases: self.cases,
            failures: self.failures,
            worst: if self.worst.is_finite() {
                self.worst
            } else {
                0.0
            },
            passed: self.failures == 0 && self.cases > 0,
        }
    }
}

/// Runs `case` for every index in parallel and merges the tallies in index
/// order.
fn run_cases<F>(seed: u64, n: usize, template: &[Tally], case: F) -> Result<Vec<Tally>>
where
    F: Fn(usize, &mut StreamRng, &mut [Tally]) -> Result<()> + Sync,
{
    let parts: Vec<Vec<Tally>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut t: Vec<Tally> = template
                .iter()
                .map(|x| {
                    if x.lower {
                        Tally::lower(x.name)
                    } else {
                        Tally::upper(x.name)
                    }
                })
                .collect();
            let mut r = rng::stream(seed, i as u64);
            case(i, &mut r, &mut t)?;
            Ok(t)
        })
        .collect::<Result<_>>()?;
    let mut out = template.to_vec();
    for p in &parts {
        for (o, x) in out.iter_mut().zip(p) {
            o.merge(x);
        }
    }
    Ok(out)
}

fn report(suite: &str, seed: u64, tallies: &[Tally]) -> SuiteReport {
    let checks: Vec<Check> = tallies.iter().map(Tally::finish).collect();
    SuiteReport {
        suite: suite.to_string(),
        seed,
        pass: checks.iter().all(|c| c.passed),
        checks,
    }
}

/// Runs a suite by name.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    match name {
        "cones" => cones_suite(seed),
        "birch" => birch_suite(seed),
        "secondary" => secondary_suite(seed),
        "limits" => limits_suite(seed),
        "monoid" => monoid_suite(seed),
        "embedding" => embedding_suite(seed),
        "moduli" => moduli_suite(seed),
        _ => Err(Error::UnknownSuite(name.to_string())),
    }
}

/// A random cone in `R^d`, `1 ≤ d ≤ 4`: generators on a small integer grid
/// (which produces degenerate and non-pointed cones) or Gaussian.
pub fn random_cone<R: Rng>(r: &mut R) -> Result<Cone> {
    let d = r.random_range(1..=4);
    let k = r.random_range(0..=d + 3);
    let grid = r.random_bool(0.5);
    let gens: Vec<Vector> = (0..k)
        .map(|_| {
            if grid {
                Vector::from_fn(d, |_, _| r.random_range(-3..=3) as f64)
            } else {
                gaussian_vector(r, d)
            }
        })
        .collect();
    Cone::new(d, &gens, EPS)
}

/// `n` Gaussian points in `R^d` spanning it affinely, pairwise at least
/// `0.2` apart.
pub fn random_config<R: Rng>(r: &mut R, d: usize, n: usize) -> Result<PointConfig> {
    loop {
        let pts: Vec<Vector> = (0..n).map(|_| gaussian_vector(r, d)).collect();
        let spread = pts
            .iter()
            .enumerate()
            .all(|(i, p)| pts[..i].iter().all(|q| (p - q).norm() >= 0.2));
        if !spread {
            continue;
        }
        let a = PointConfig::from_points(pts, false)?;
        if a.dim() == d {
            return Ok(a);
        }
    }
}

/// Positive weights `exp(N(0, σ²))`.
pub fn random_weights<R: Rng>(r: &mut R, n: usize, sigma: f64) -> Weights {
    (gaussian_vector(r, n) * sigma).map(f64::exp)
}

/// The normal fan of a random polytope in `R^d`, which is complete.
pub fn random_complete_fan<R: Rng>(r: &mut R, d: usize) -> Result<Fan> {
    let n = r.random_range(d + 1..=d + 5);
    let a = random_config(r, d, n)?;
    Ok(Polytope::new(a.points(), EPS)?.normal_fan()?.fan)
}

/// A random complete fan with some maximal cones removed.
pub fn random_incomplete_fan<R: Rng>(r: &mut R, d: usize) -> Result<Fan> {
    let f = random_complete_fan(r, d)?;
    let maximal = f.maximal();
    let drop = r.random_range(0..maximal.len());
    let kept: Vec<Cone> = maximal
        .iter()
        .enumerate()
        .filter(|&(i, _)| i == (drop + 1) % maximal.len() || (i != drop && r.random_bool(0.5)))
        .map(|(_, &c)| f.cones()[c].clone())
        .collect();
    Fan::new(d, kept, EPS)
}

/// Whether the face lattices of `c` and its dual are anti-isomorphic via
/// `F ↦ σ∨ ∩ F⊥`.
pub fn lattices_anti_isomorphic(c: &Cone) -> bool {
    let lat = c.face_lattice();
    let dual = c.dual();
    let dlat = dual.face_lattice();
    if lat.len() != dlat.len() {
        return false;
    }
    let tol = incidence_tol(EPS);
    let mut image = Vec::with_capacity(lat.len());
    for f in &lat.faces {
        let perp: BTreeSet<usize> = (0..dual.rays().len())
            .filter(|&j| {
                f.rays
                    .ones()
                    .all(|i| dual.rays()[j].dot(&c.rays()[i]).abs() <= tol)
            })
            .collect();
        match dlat
            .faces
            .iter()
            .position(|g| g.rays.ones().collect::<BTreeSet<_>>() == perp)
        {
            Some(k) => image.push(k),
            None => return false,
        }
    }
    if image.iter().collect::<BTreeSet<_>>().len() != image.len() {
        return false;
    }
    (0..lat.len())
        .all(|i| (0..lat.len()).all(|j| lat.is_below(i, j) == dlat.is_below(image[j], image[i])))
}

fn cones_suite(seed: u64) -> Result<SuiteReport> {
    let template = [
        Tally::upper("dual_involution"),
        Tally::upper("face_lattice_duality"),
    ];
    let t = run_cases(seed, 200, &template, |_, r, t| {
        let c = random_cone(r)?;
        let dist = c.dual().dual().generator_distance(&c);
        t[0].record(dist <= 1e-9, dist);
        t[1].flag(lattices_anti_isomorphic(&c));
        Ok(())
    })?;
    Ok(report("cones", seed, &t))
}

/// A point of `conv(A)`: a random convex combination of all points, or of
/// the points of a random proper face.
fn random_target<R: Rng>(r: &mut R, a: &PointConfig, boundary: bool) -> Result<Vector> {
    let faces = a.hull_faces()?;
    let labels = if boundary {
        faces[r.random_range(0..faces.len() - 1)].members.clone()
    } else {
        (0..a.len()).collect()
    };
    let c = simplex_weights(r, labels.len());
    Ok(labels
        .iter()
        .zip(&c)
        .fold(Vector::zeros(a.ambient()), |acc, (&i, x)| {
            acc + a.point(i) * *x
        }))
}

fn birch_suite(seed: u64) -> Result<SuiteReport> {
    let template = [
        Tally::upper("moment_residual"),
        Tally::upper("binomial_residual"),
        Tally::upper("irrational_relation"),
    ];
    let mut t = run_cases(seed, 50, &template, |_, r, t| {
        let d = r.random_range(1..=3);
        let n = r.random_range(d + 1..=8);
        let a = random_config(r, d, n)?;
        let w = random_weights(r, n, 1.0);
        let bound = 1e-8 * a.diameter();
        for k in 0..20 {
            let u = random_target(r, &a, k % 2 == 1)?;
            let sol = birch_inverse(&a, &w, &u)?;
            let err = (moment(&a, &sol.z)? - &u).norm();
            t[0].record(err <= bound, err / a.diameter());
        }
        for _ in 0..5 {
            let z = phi(&a, &TorusElement::new(gaussian_vector(r, d)))?;
            for kappa in a.relation_basis() {
                let res = binomial_residual(&kappa, &z.coords);
                t[1].record(res <= 1e-10, res);
            }
        }
        Ok(())
    })?;
    // z = (2, 3, 2·3^{1+√2}) is the image of t = exp(−v) with
    // log t = (ln 3, ln 2 + √2 ln 3).
    let a = fixtures::irrational_cone();
    let (l2, l3) = (2f64.ln(), 3f64.ln());
    let z = phi(
        &a,
        &TorusElement::new(-vector(&[l3, l2 + 2f64.sqrt() * l3])),
    )?;
    let zc = 2.0 * 3f64.powf(1.0 + 2f64.sqrt());
    let err = (&z.coords - vector(&[2.0, 3.0, zc])).norm() / zc;
    let member = is_member(
        &a,
        &AffinePoint {
            coords: z.coords.clone(),
        },
    );
    t[2].record(err <= 1e-12 && member && (zc - 28.37).abs() < 0.01, err);
    Ok(report("birch", seed, &t))
}

fn secondary_suite(seed: u64) -> Result<SuiteReport> {
    let mut line_t = Tally::upper("line_gkz_vertices");
    let line = fixtures::line();
    let e = enumerate_regular_triangulations(&line, 64, seed)?;
    let mut gkz: Vec<Vec<f64>> = e.triangulations.iter().map(|t| t.gkz.clone()).collect();
    gkz.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let expected = [vec![1.0, 2.0, 1.0], vec![2.0, 0.0, 2.0]];
    let err = if gkz.len() == 2 {
        gkz.iter()
            .zip(&expected)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    line_t.record(err <= 1e-9, err);

    let mut count_t = Tally::upper("five_point_count_matches_oracle");
    let mut normal_t = Tally::upper("minimizing_vertex_refines");
    for (k, a) in [fixtures::five_points(), fixtures::nested_triangles()]
        .iter()
        .enumerate()
    {
        let e = enumerate_regular_triangulations(a, 400, seed.wrapping_add(k as u64))?;
        let exact = exhaustive_regular_triangulations(a)?;
        let found: BTreeSet<_> = e
            .triangulations
            .iter()
            .map(|t| t.subdivision.clone())
            .collect();
        let oracle: BTreeSet<_> = exact.iter().map(|t| t.subdivision.clone()).collect();
        if k == 0 {
            count_t.flag(found == oracle && e.oracle_agrees == Some(true));
        }
        let mut r = rng::stream(seed, 1000 + k as u64);
        for _ in 0..100 {
            let lam = random_lift(&mut r, a);
            let s = regular_subdivision(a, &lam)?;
            let Some((idx, _)) = minimizing_vertex(&e.triangulations, &lam) else {
                normal_t.flag(false);
                continue;
            };
            let best = &e.triangulations[idx].subdivision;
            let ok = if s.is_triangulation(a) {
                *best == s
            } else {
                best.refines(&s)
            };
            normal_t.flag(ok);
        }
    }
    Ok(report("secondary", seed, &[line_t, count_t, normal_t]))
}

fn limits_suite(seed: u64) -> Result<SuiteReport> {
    let template = [
        Tally::upper("recovery_mismatches"),
        Tally::upper("complete_limits_exist"),
        Tally::upper("ray_limit_matches_one_param"),
        Tally::upper("incomplete_absent_iff_uncovered"),
        Tally::upper("incomplete_detected"),
    ];
    // Twenty complete fans followed by ten incomplete ones.
    let t = run_cases(seed, 30, &template, |i, r, t| {
        let d = r.random_range(1..=3);
        let complete = i < 20;
        let f = if complete {
            random_complete_fan(r, d)?
        } else {
            random_incomplete_fan(r, d)?
        };
        let rep = recover_fan(&f, 500, r.random())?;
        t[0].record(rep.mismatches == 0, rep.mismatches as f64);
        let eps = dense_point(&f, &Vector::zeros(d))?;
        if complete {
            t[1].flag(f.is_complete() && rep.absent == 0);
            for _ in 0..50 {
                let (b, v) = (gaussian_vector(r, d), gaussian_vector(r, d));
                let ray = ray_sequence_limit(&f, &b, &v)?;
                let one = one_param_limit(&f, &act(&TorusElement::new(b), &eps), &v)?;
                let ok = match (ray, one) {
                    (Some(x), Some(y)) => x.approx_eq(&y, 1e-12),
                    _ => false,
                };
                t[2].flag(ok);
            }
        } else {
            let mut absent = 0;
            for _ in 0..500 {
                let v = gaussian_vector(r, d);
                let lim = one_param_limit(&f, &eps, &v)?;
                let covered = f.cones().iter().any(|c| c.contains(&v));
                absent += usize::from(lim.is_none());
                t[3].flag(lim.is_some() == covered);
                t[3].flag(ray_sequence_limit(&f, &Vector::zeros(d), &v)?.is_some() == covered);
            }
            t[4].flag(!f.is_complete() && absent > 0);
        }
        Ok(())
    })?;
    Ok(report("limits", seed, &t))
}

fn random_element<R: Rng>(r: &mut R, f: &Fan) -> Result<MonoidElement> {
    if r.random_bool(0.1) {
        return Ok(MonoidElement::Zero);
    }
    let c = r.random_range(0..f.len());
    Ok(MonoidElement::Point(point_at(
        f,
        c,
        &gaussian_vector(r, f.ambient()),
    )?))
}

/// Cone-level equality and orbit distance of two monoid elements.
fn compare(x: &MonoidElement, y: &MonoidElement) -> (bool, f64) {
    match (x, y) {
        (MonoidElement::Zero, MonoidElement::Zero) => (true, 0.0),
        (MonoidElement::Point(p), MonoidElement::Point(q)) if p.cone() == q.cone() => (
            true,
            (p.orbit() - q.orbit()).norm() / p.orbit().norm().max(1.0),
        ),
        _ => (false, f64::INFINITY),
    }
}

fn monoid_suite(seed: u64) -> Result<SuiteReport> {
    let mut fans = vec![
        Fan::projective(1, EPS)?,
        Fan::projective(2, EPS)?,
        Fan::projective(3, EPS)?,
        Fan::boundary_orthant(1, EPS)?,
        Fan::boundary_orthant(2, EPS)?,
    ];
    let mut r = rng::stream(seed, u64::MAX);
    for d in 1..=3 {
        fans.push(random_complete_fan(&mut r, d)?);
        fans.push(random_incomplete_fan(&mut r, d)?);
    }
    let template = [
        Tally::upper("associativity"),
        Tally::upper("commutativity"),
        Tally::upper("identity"),
        Tally::upper("absorption"),
        Tally::upper("cone_homomorphism"),
    ];
    let t = run_cases(seed, 1000, &template, |_, r, t| {
        let f = &fans[r.random_range(0..fans.len())];
        let (x, y, z) = (
            random_element(r, f)?,
            random_element(r, f)?,
            random_element(r, f)?,
        );
        let mul = |p: &MonoidElement, q: &MonoidElement| monoid_mul(f, p, q);
        let mut record =
            |k: usize, (same, dist): (bool, f64)| t[k].record(same && dist <= 1e-10, dist);
        record(
            0,
            compare(&mul(&mul(&x, &y)?, &z)?, &mul(&x, &mul(&y, &z)?)?),
        );
        record(1, compare(&mul(&x, &y)?, &mul(&y, &x)?));
        let e = MonoidElement::Point(dense_point(f, &Vector::zeros(f.ambient()))?);
        record(2, compare(&mul(&x, &e)?, &x));
        let zero = MonoidElement::Zero;
        let (a0, b0) = (
            compare(&mul(&x, &zero)?, &zero),
            compare(&mul(&zero, &x)?, &zero),
        );
        record(3, (a0.0 && b0.0, 0.0));
        let hom = mul(&x, &y)?.cone() == cone_mul(f, x.cone(), y.cone());
        t[4].flag(hom);
        Ok(())
    })?;
    Ok(report("monoid", seed, &t))
}

fn embedding_suite(seed: u64) -> Result<SuiteReport> {
    let template = [
        Tally::lower("injective_min_distance"),
        Tally::upper("choice_independence"),
        Tally::upper("distinguished_points_in_face_interiors"),
        Tally::upper("equivariance"),
    ];
    let t = run_cases(seed, 10, &template, |_, r, t| {
        let d = r.random_range(2..=3);
        let n = r.random_range(d + 2..=8);
        let a = random_config(r, d, n)?;
        let nf = a.normal_fan()?;
        let pts: Vec<FanPoint> = (0..500)
            .map(|_| {
                let c = r.random_range(0..nf.fan.len());
                point_at(&nf.fan, c, &(gaussian_vector(r, d) * 2.0))
            })
            .collect::<Result<_>>()?;
        let imgs: Vec<Vector> = pts
            .iter()
            .map(|p| Ok(embed_simplex(&a, &nf, p)?.coords))
            .collect::<Result<_>>()?;
        let mut min_dist = f64::INFINITY;
        for i in 0..pts.len() {
            for j in 0..i {
                if !pts[i].approx_eq(&pts[j], 1e-12) {
                    min_dist = min_dist.min((&imgs[i] - &imgs[j]).norm());
                }
            }
        }
        t[0].record(min_dist > 0.0, min_dist);
        for (p, img) in pts.iter().zip(&imgs).take(100) {
            let face = &nf.faces[*p.cone()];
            for c in 1..face.len() {
                let err = (embed_simplex_with(&a, &nf, p, c)?.coords - img).amax();
                t[1].record(err <= 1e-10, err);
            }
            let tv = gaussian_vector(r, d);
            let moved = embed_simplex(&a, &nf, &act(&TorusElement::new(tv.clone()), p))?.coords;
            let mut expect = Vector::from_fn(a.len(), |k, _| img[k] * (-a.point(k).dot(&tv)).exp());
            expect /= expect.sum();
            let err = (moved - expect).amax();
            t[3].record(err <= 1e-10, err);
        }
        for s in 0..nf.fan.len() {
            let x = point_at(&nf.fan, s, &Vector::zeros(d))?;
            let u = moment(&a, &embed_simplex(&a, &nf, &x)?.coords)?;
            t[2].flag(locate_face(&a, &u)? == nf.faces[s]);
        }
        Ok(())
    })?;
    Ok(report("embedding", seed, &t))
}

/// A random direction rescaled so that the lifted points off each facet of
/// `S(v)` sit at height at least one.
pub fn normalized_direction<R: Rng>(r: &mut R, a: &PointConfig) -> Result<Vector> {
    let v = gaussian_vector(r, a.len());
    let s = regular_subdivision(a, &v)?;
    Ok(match lift_margin(a, &s, &v) {
        Some(m) if m > 0.0 => v / m,
        _ => v,
    })
}

/// Desk-scale degeneration cases: the line `{0, 1, 2}` and ten random planar
/// configurations with at most six points.
pub fn degeneration_configs(seed: u64) -> Result<Vec<PointConfig>> {
    let mut r = rng::stream(seed, u64::MAX - 1);
    let mut out = vec![fixtures::line()];
    for _ in 0..10 {
        let n = r.random_range(3..=6);
        out.push(random_config(&mut r, 2, n)?);
    }
    Ok(out)
}

fn moduli_suite(seed: u64) -> Result<SuiteReport> {
    let configs = degeneration_configs(seed)?;
    let schedule: Vec<f64> = (1..=40).map(f64::from).collect();
    let template = [
        Tally::upper("cone_consistency"),
        Tally::upper("degeneration_verdict"),
        Tally::upper("final_distance_over_threshold"),
        Tally::upper("monotone_violations"),
    ];
    // Five directions per configuration.
    let mut t = run_cases(seed, configs.len() * 5, &template, |i, r, t| {
        let a = &configs[i / 5];
        let v = normalized_direction(r, a)?;
        let w = if a.len() == 3 && a.dim() == 1 {
            Vector::from_element(3, 1.0)
        } else {
            random_weights(r, a.len(), 0.5)
        };
        let f = SecondaryFan::new(a);
        let key = ray_sequence_limit(&f, &w.map(|x| -x.ln()), &v)?.map(|p| p.cone().clone());
        t[0].flag(key == Some(regular_subdivision(a, &v)?) && f.containing(&v)? == key);
        let rep = degenerate(a, &w, &v, &schedule, 200, r.random())?;
        t[1].flag(rep.pass);
        t[2].record(rep.below_threshold, rep.final_distance / rep.threshold);
        t[3].record(rep.monotone(), rep.monotone_from as f64);
        Ok(())
    })?;
    // Stabilizers on the line: the trivial cone, a triangulation and an edge.
    let line = fixtures::line();
    let mut stab = Tally::upper("orbit_match");
    for v in [[0.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 1.0, 0.0]] {
        stab.flag(orbit_match(
            &line,
            &vector(&v),
            &Vector::from_element(3, 1.0),
        )?);
    }
    t.push(stab);
    Ok(report("moduli", seed, &t))
}
