//! Degenerations of torus translates `w.Z_A` and their correspondence with
//! limits in the toric variety of the secondary fan.
//!
//! The secondary fan is never listed explicitly: the cone holding a lift `v`
//! in its relative interior is identified by the regular subdivision `S(v)`.
//! Degenerations `w_s = w·exp(−s·v)` are compared with the predicted complex
//! `Z(S(v), w)` by sampling both at the same moment targets, so Hausdorff
//! distances measure shape rather than parametrization.

use rayon::prelude::*;
use serde::Serialize;

use crate::birch::birch_inverse_log;
use crate::config::{LabelSet, PointConfig, Weights};
use crate::error::{Error, Result};
use crate::hausdorff::{hausdorff_distance, PointCloud, Provenance};
use crate::linalg::{check_dim, Subspace, Vector};
use crate::rng;
use crate::sampling::{sample_variety, skeleton_targets, uniform_targets};
use crate::subdivision::{regular_subdivision, secondary_lineality, secondary_span, Subdivision};
use crate::variety::{point_at, ray_sequence_limit, ConeLookup, FanPoint};

/// The secondary fan `Σ(A)`, with cones keyed by their subdivisions.
#[derive(Debug, Clone, Copy)]
pub struct SecondaryFan<'a> {
    a: &'a PointConfig,
}

impl<'a> SecondaryFan<'a> {
    pub fn new(a: &'a PointConfig) -> Self {
        Self { a }
    }

    pub fn config(&self) -> &PointConfig {
        self.a
    }
}

impl ConeLookup for SecondaryFan<'_> {
    type Key = Subdivision;

    fn ambient(&self) -> usize {
        self.a.len()
    }

    fn minimal_key(&self) -> Result<Subdivision> {
        regular_subdivision(self.a, &Vector::zeros(self.a.len()))
    }

    /// The secondary fan is complete, so every lift lies in some cone.
    fn containing(&self, v: &Vector) -> Result<Option<Subdivision>> {
        regular_subdivision(self.a, v).map(Some)
    }

    fn span_of(&self, key: &Subdivision) -> Result<Subspace> {
        Ok(secondary_span(self.a, key))
    }
}

/// The point `γ_{−log w}.ε` of the toric variety of `Σ(A)` attached to the
/// translate `w.Z_A`.
pub fn psi_point(a: &PointConfig, w: &Weights) -> Result<FanPoint<Subdivision>> {
    a.check_weights(w)?;
    let f = SecondaryFan::new(a);
    point_at(&f, f.minimal_key()?, &w.map(|x| -x.ln()))
}

/// Parses a schedule `"start:end:step"` into the increasing list
/// `start, start + step, …` up to `end` inclusive.
pub fn parse_schedule(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidSchedule(spec.to_string());
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, end, step] = parts[..] else {
        return Err(bad());
    };
    if !(start.is_finite() && end.is_finite() && step.is_finite() && step > 0.0 && end >= start) {
        return Err(bad());
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    let ok = !schedule.is_empty()
        && schedule.iter().all(|s| s.is_finite())
        && schedule.windows(2).all(|p| p[0] < p[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSchedule(format!("{schedule:?}")))
    }
}

/// The constant `c` in `θ(n) = c/√n + eps_limit`: the distance between two
/// independent samples of `w.Z_A` at densities `n` and `2n`, times `√n`.
pub fn calibrate(a: &PointConfig, w: &Weights, density: usize, seed: u64) -> Result<f64> {
    if density == 0 {
        return Err(Error::ZeroBudget);
    }
    let p = sample_variety(a, w, density, seed)?;
    let q = sample_variety(a, w, 2 * density, seed.wrapping_add(1))?;
    Ok((density as f64).sqrt() * hausdorff_distance(&p, &q)?)
}

/// The sampling-aware threshold `θ(n) = c/√n + eps_limit`.
pub fn threshold(a: &PointConfig, c: f64, density: usize) -> f64 {
    c / (density as f64).sqrt() + a.tolerance().eps_limit
}

/// Moment targets: `n` uniform points of `conv(A)` plus the skeletons of
/// `conv(A)` and of every facet of `s`.
fn moment_grid(a: &PointConfig, s: &Subdivision, n: usize, seed: u64) -> Result<Vec<Vector>> {
    let all: LabelSet = (0..a.len()).collect();
    let mut r = rng::stream(seed, 0);
    let mut out = uniform_targets(a, &all, n, &mut r)?;
    out.extend(skeleton_targets(a, &all)?);
    for f in s.facets() {
        out.extend(skeleton_targets(a, f)?);
    }
    Ok(out)
}

/// How far inside `conv(F)` the target lies (negative outside).
fn slack(sub: &PointConfig, u: &Vector) -> Result<f64> {
    let mut worst = -sub.frame().distance(u);
    for f in sub.hull_faces()? {
        let n = f.normal.norm();
        if n > 0.0 {
            worst = worst.min((f.normal.dot(u) + f.offset) / n);
        }
    }
    Ok(worst)
}

fn embed(a: &PointConfig, labels: &[usize], z: &Vector) -> Vector {
    let mut out = Vector::zeros(a.len());
    for (j, &i) in labels.iter().enumerate() {
        out[i] = z[j];
    }
    out
}

/// Samples `Z(S, w)` at the given moment targets: each target is lifted on
/// the facet of `S` containing it most deeply.
fn sample_complex_at(
    a: &PointConfig,
    s: &Subdivision,
    log_w: &Vector,
    targets: &[Vector],
) -> Result<Vec<Vector>> {
    let subs: Vec<(PointConfig, Vector)> = s
        .facets()
        .iter()
        .map(|f| Ok((a.restrict(f)?, Vector::from_fn(f.len(), |j, _| log_w[f[j]]))))
        .collect::<Result<_>>()?;
    targets
        .iter()
        .map(|u| {
            let mut best = (f64::NEG_INFINITY, 0);
            for (k, (sub, _)) in subs.iter().enumerate() {
                let sl = slack(sub, u)?;
                if sl > best.0 {
                    best = (sl, k);
                }
            }
            let (sub, lw) = &subs[best.1];
            let sol = birch_inverse_log(sub, lw, u)?;
            Ok(embed(a, &s.facets()[best.1], &sol.z))
        })
        .collect()
}

fn sample_translate_at(a: &PointConfig, log_w: &Vector, targets: &[Vector]) -> Result<Vec<Vector>> {
    targets
        .iter()
        .map(|u| Ok(birch_inverse_log(a, log_w, u)?.z))
        .collect()
}

/// Result of a degeneration experiment.
#[derive(Debug, Clone, Serialize)]
pub struct DegenerationReport {
    pub schedule: Vec<f64>,
    /// `d_H(w_s.Z_A, Z(S_σ, w))` on matched samples, one per schedule entry.
    pub distances: Vec<f64>,
    pub predicted_subdivision: Subdivision,
    pub density: usize,
    pub seed: u64,
    /// Calibrated constant `c` of the threshold.
    pub calibration: f64,
    /// `θ(density)`.
    pub threshold: f64,
    pub final_distance: f64,
    /// First index from which distances never increase by more than
    /// `eps_limit`.
    pub monotone_from: usize,
    pub eventually_monotone: bool,
    pub below_threshold: bool,
    /// The limit of `γ_{−log w + s·v}.ε` in the toric variety of `Σ(A)` lies
    /// over the cone of `S(v)`.
    pub cone_consistent: bool,
    pub pass: bool,
}

impl DegenerationReport {
    /// Whether the whole distance curve is nonincreasing up to `eps_limit`.
    pub fn monotone(&self) -> bool {
        self.monotone_from == 0
    }
}

/// First index `k` such that `d[i+1] ≤ d[i] + jitter` for all `i ≥ k`.
pub fn monotone_from(d: &[f64], jitter: f64) -> usize {
    let mut k = d.len().saturating_sub(1);
    while k > 0 && d[k] <= d[k - 1] + jitter {
        k -= 1;
    }
    if d.len() <= 1 {
        0
    } else {
        k
    }
}

/// Runs the degeneration `w_s = w·exp(−s·v)` along `schedule` and compares
/// each translate with the predicted limit complex `Z(S(v), w)`.
pub fn degenerate(
    a: &PointConfig,
    w: &Weights,
    v: &Vector,
    schedule: &[f64],
    density: usize,
    seed: u64,
) -> Result<DegenerationReport> {
    a.check_weights(w)?;
    check_dim(v, a.len())?;
    check_schedule(schedule)?;
    if density == 0 {
        return Err(Error::ZeroBudget);
    }
    let tol = a.tolerance();
    let s = regular_subdivision(a, v)?;
    let log_w = w.map(f64::ln);
    let targets = moment_grid(a, &s, density, seed)?;
    let provenance = |weights: &Vector, facets: Vec<LabelSet>| Provenance {
        weights: weights.iter().copied().collect(),
        facets,
        seed,
        density,
    };
    let target = PointCloud::new(
        sample_complex_at(a, &s, &log_w, &targets)?,
        provenance(w, s.facets().to_vec()),
    )?;
    let all: LabelSet = (0..a.len()).collect();
    let distances: Vec<f64> = schedule
        .par_iter()
        .map(|&t| {
            let lw = &log_w - v * t;
            let src = PointCloud::new(
                sample_translate_at(a, &lw, &targets)?,
                provenance(&lw.map(f64::exp), vec![all.clone()]),
            )?;
            hausdorff_distance(&src, &target)
        })
        .collect::<Result<_>>()?;
    let calibration = calibrate(a, w, density, seed)?;
    let theta = threshold(a, calibration, density);
    let final_distance = *distances.last().expect("schedule is nonempty");
    let monotone_from = monotone_from(&distances, tol.eps_limit);
    let eventually_monotone = monotone_from <= distances.len() / 2;
    let below_threshold = final_distance < theta;
    let limit = ray_sequence_limit(&SecondaryFan::new(a), &(-&log_w), v)?;
    let cone_consistent = limit.is_some_and(|p| *p.cone() == s);
    let pass = distances.iter().all(|d| d.is_finite())
        && eventually_monotone
        && below_threshold
        && cone_consistent;
    Ok(DegenerationReport {
        schedule: schedule.to_vec(),
        distances,
        predicted_subdivision: s,
        density,
        seed,
        calibration,
        threshold: theta,
        final_distance,
        monotone_from,
        eventually_monotone,
        below_threshold,
        cone_consistent,
        pass,
    })
}

/// The matched samples behind one schedule entry: the translate
/// `w_s.Z_A` and the predicted limit `Z(S(v), w)`, both lifted from the same
/// moment targets.
pub fn matched_clouds(
    a: &PointConfig,
    w: &Weights,
    v: &Vector,
    s: f64,
    density: usize,
    seed: u64,
) -> Result<(PointCloud, PointCloud)> {
    a.check_weights(w)?;
    check_dim(v, a.len())?;
    if density == 0 {
        return Err(Error::ZeroBudget);
    }
    let sub = regular_subdivision(a, v)?;
    let log_w = w.map(f64::ln);
    let targets = moment_grid(a, &sub, density, seed)?;
    let lw = &log_w - v * s;
    let source = PointCloud::new(
        sample_translate_at(a, &lw, &targets)?,
        Provenance {
            weights: lw.iter().map(|x| x.exp()).collect(),
            facets: vec![(0..a.len()).collect()],
            seed,
            density,
        },
    )?;
    let target = PointCloud::new(
        sample_complex_at(a, &sub, &log_w, &targets)?,
        Provenance {
            weights: w.iter().copied().collect(),
            facets: sub.facets().to_vec(),
            seed,
            density,
        },
    )?;
    Ok((source, target))
}

/// Result of the stabilizer check for `Z(S_σ, w)`.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitMatch {
    pub threshold: f64,
    /// Largest movement under unit perturbations inside `⟨σ⟩`.
    pub along: f64,
    /// Smallest movement under perturbations of size `10·θ` transverse to
    /// `⟨σ⟩`; `None` when `⟨σ⟩` is everything.
    pub transverse: Option<f64>,
    pub pass: bool,
}

/// Checks that `Z(S(v), w)` is moved by `exp(δ)` exactly when `δ` leaves the
/// span of the secondary cone of `S(v)`, with `trials` random perturbations
/// of each kind.
pub fn orbit_match_report(
    a: &PointConfig,
    v: &Vector,
    w: &Weights,
    density: usize,
    trials: usize,
    seed: u64,
) -> Result<OrbitMatch> {
    a.check_weights(w)?;
    let s = regular_subdivision(a, v)?;
    let theta = threshold(a, calibrate(a, w, density, seed)?, density);
    let log_w = w.map(f64::ln);
    let targets = moment_grid(a, &s, density, seed)?;
    let base = PointCloud::from_points(sample_complex_at(a, &s, &log_w, &targets)?)?;
    let span = secondary_span(a, &s);
    let across = span.complement();
    let mut r = rng::stream(seed, 1);
    let moved = |delta: &Vector| -> Result<f64> {
        let other =
            PointCloud::from_points(sample_complex_at(a, &s, &(&log_w + delta), &targets)?)?;
        hausdorff_distance(&base, &other)
    };
    let mut along: f64 = 0.0;
    let mut transverse: Option<f64> = None;
    for _ in 0..trials {
        let g = span.project(&rng::gaussian_vector(&mut r, a.len()));
        if g.norm() > 0.0 {
            along = along.max(moved(&g.normalize())?);
        }
        if across.dim() > 0 {
            let h = across.project(&rng::gaussian_vector(&mut r, a.len()));
            if h.norm() > 0.0 {
                let d = moved(&(h.normalize() * (10.0 * theta)))?;
                transverse = Some(transverse.map_or(d, |t| t.min(d)));
            }
        }
    }
    let pass = along <= theta && transverse.is_none_or(|t| t > theta);
    Ok(OrbitMatch {
        threshold: theta,
        along,
        transverse,
        pass,
    })
}

/// [`orbit_match_report`] at density 200 with five trials per kind.
pub fn orbit_match(a: &PointConfig, v: &Vector, w: &Weights) -> Result<bool> {
    Ok(orbit_match_report(a, v, w, 200, 5, 0)?.pass)
}

/// Whether `λ` lies in the lineality space of `Σ(A)`.
pub fn in_secondary_lineality(a: &PointConfig, lam: &Vector) -> bool {
    secondary_lineality(a).contains(lam, a.tolerance().eps_geom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::TorusElement;
    use crate::linalg::vector;
    use crate::variety::act;

    fn line() -> PointConfig {
        PointConfig::from_points(vec![vector(&[0.0]), vector(&[1.0]), vector(&[2.0])], false)
            .unwrap()
    }

    fn ones(n: usize) -> Vector {
        Vector::from_element(n, 1.0)
    }

    #[test]
    fn schedules() {
        assert_eq!(parse_schedule("1:4:1").unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(parse_schedule("0:1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_schedule("2:2:1").unwrap(), vec![2.0]);
        for bad in ["1:4", "a:2:1", "4:1:1", "1:4:0", "1:4:-1"] {
            assert!(
                matches!(parse_schedule(bad), Err(Error::InvalidSchedule(_))),
                "{bad}"
            );
        }
        assert!(check_schedule(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn monotone_tail() {
        assert_eq!(monotone_from(&[3.0, 2.0, 1.0], 0.0), 0);
        assert_eq!(monotone_from(&[1.0, 2.0, 1.0, 0.5], 0.0), 1);
        assert_eq!(monotone_from(&[1.0, 1.0 + 1e-7, 0.5], 1e-6), 0);
        assert_eq!(monotone_from(&[], 0.0), 0);
    }

    #[test]
    fn psi_of_unit_weights_is_the_dense_base_point() {
        let a = line();
        let p = psi_point(&a, &ones(3)).unwrap();
        assert!(p.cone().is_trivial(3));
        assert_eq!(p.orbit().norm(), 0.0);
        assert!(matches!(
            psi_point(&a, &vector(&[1.0, 0.0, 1.0])),
            Err(Error::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn psi_is_equivariant_and_kills_the_lineality() {
        let a = line();
        let w = vector(&[0.5, 2.0, 1.5]);
        let w2 = vector(&[3.0, 0.2, 1.0]);
        let lhs = psi_point(&a, &w.component_mul(&w2)).unwrap();
        let rhs = act(
            &TorusElement::new(w.map(|x| -x.ln())),
            &psi_point(&a, &w2).unwrap(),
        );
        assert!(lhs.approx_eq(&rhs, 1e-12));
        // λ_a = 0.7·a − 0.3 is affine, so exp(λ) stabilizes the point.
        let shift = vector(&[-0.3, 0.4, 1.1]).map(f64::exp);
        assert!(in_secondary_lineality(&a, &shift.map(f64::ln)));
        let moved = psi_point(&a, &w.component_mul(&shift)).unwrap();
        assert!(moved.approx_eq(&psi_point(&a, &w).unwrap(), 1e-12));
    }

    #[test]
    fn secondary_lookup() {
        let a = line();
        let f = SecondaryFan::new(&a);
        assert!(f.minimal_key().unwrap().is_trivial(3));
        let s = f.containing(&vector(&[0.0, -1.0, 0.0])).unwrap().unwrap();
        assert_eq!(s.facets(), &[vec![0, 1], vec![1, 2]]);
        assert_eq!(f.span_of(&s).unwrap().dim(), 3);
        assert_eq!(f.span_of(&f.minimal_key().unwrap()).unwrap().dim(), 2);
    }

    #[test]
    fn two_segment_degeneration() {
        let a = line();
        let sched = parse_schedule("1:40:1").unwrap();
        let r = degenerate(&a, &ones(3), &vector(&[0.0, -1.0, 0.0]), &sched, 200, 0).unwrap();
        assert_eq!(r.predicted_subdivision.facets(), &[vec![0, 1], vec![1, 2]]);
        assert!(r.pass, "{r:?}");
        assert!(r.monotone());
        assert!(r.distances[0] > r.threshold);
    }

    #[test]
    fn edge_degeneration_kills_the_middle_coordinate() {
        let a = line();
        let sched = parse_schedule("1:40:1").unwrap();
        let r = degenerate(&a, &ones(3), &vector(&[0.0, 1.0, 0.0]), &sched, 200, 0).unwrap();
        assert_eq!(r.predicted_subdivision.facets(), &[vec![0, 2]]);
        assert!(r.pass, "{r:?}");
        let far = birch_inverse_log(&a, &vector(&[0.0, -40.0, 0.0]), &vector(&[1.0])).unwrap();
        assert!(far.z[1] < 1e-8);
    }

    #[test]
    fn lineality_directions_are_flat() {
        let a = line();
        let sched = parse_schedule("1:10:1").unwrap();
        let r = degenerate(
            &a,
            &vector(&[1.0, 2.0, 0.5]),
            &vector(&[1.0, 0.0, -1.0]),
            &sched,
            100,
            3,
        )
        .unwrap();
        assert!(r.predicted_subdivision.is_trivial(3));
        assert!(r.distances.iter().all(|d| *d < 1e-9), "{:?}", r.distances);
        assert!(r.pass);
    }

    #[test]
    fn verdict_is_stable_inside_a_cone() {
        let a = line();
        let sched = parse_schedule("2:30:2").unwrap();
        let v = vector(&[0.0, -1.0, 0.0]);
        let r1 = degenerate(&a, &ones(3), &v, &sched, 100, 1).unwrap();
        let r2 = degenerate(
            &a,
            &ones(3),
            &(&v + vector(&[0.05, -0.02, 0.01])),
            &sched,
            100,
            1,
        )
        .unwrap();
        assert_eq!(r1.predicted_subdivision, r2.predicted_subdivision);
        assert_eq!(r1.pass, r2.pass);
    }

    #[test]
    fn stabilizers() {
        let a = line();
        let w = ones(3);
        let triv = orbit_match_report(&a, &Vector::zeros(3), &w, 200, 3, 0).unwrap();
        assert!(triv.pass, "{triv:?}");
        assert!(triv.transverse.is_some());
        let tri = orbit_match_report(&a, &vector(&[0.0, -1.0, 0.0]), &w, 200, 3, 0).unwrap();
        assert!(tri.pass, "{tri:?}");
        assert!(tri.transverse.is_none());
        assert!(orbit_match(&a, &vector(&[0.0, 1.0, 0.0]), &w).unwrap());
    }

    #[test]
    fn degeneration_is_deterministic_across_thread_counts() {
        let a = line();
        let sched = parse_schedule("1:8:1").unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    degenerate(&a, &ones(3), &vector(&[0.0, -1.0, 0.0]), &sched, 50, 9).unwrap()
                })
        };
        let (x, y) = (run(1), run(4));
        assert_eq!(x.distances, y.distances);
        assert_eq!(x.calibration, y.calibration);
    }

    #[test]
    fn matched_clouds_reproduce_the_reported_distance() {
        let a = line();
        let v = vector(&[0.0, -1.0, 0.0]);
        let r = degenerate(&a, &ones(3), &v, &[3.0], 40, 2).unwrap();
        let (src, tgt) = matched_clouds(&a, &ones(3), &v, 3.0, 40, 2).unwrap();
        assert_eq!(src.len(), tgt.len());
        assert!(src.in_simplex(1e-12) && tgt.in_simplex(1e-12));
        assert_eq!(hausdorff_distance(&src, &tgt).unwrap(), r.distances[0]);
    }
}
