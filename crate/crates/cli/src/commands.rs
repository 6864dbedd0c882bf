//! One driver per subcommand.
//!
//! Each driver returns an [`Outcome`]: the JSON document printed on stdout
//! (and written to `--out`), extra artifacts, and whether the run verified.

use std::path::Path;

use anyhow::{anyhow, Result};
use irrtoric::moduli::{matched_clouds, parse_schedule};
use irrtoric::variety::{one_param_limit, point_at};
use irrtoric::verify::{run_suite, SuiteReport, SUITES};
use irrtoric::{
    birch_inverse, degenerate, enumerate_regular_triangulations, regular_subdivision, PointConfig,
    Vector, Weights,
};
use serde_json::{json, Value};

use crate::args::{Command, RunConfig};
use crate::input::{input_err, label_vector, parse_list, read_config, read_fan};
use crate::output::cloud_csv;
use crate::svg;

/// Result of a command.
pub struct Outcome {
    pub json: Value,
    /// Additional files `(name, contents)` for the output directory.
    pub artifacts: Vec<(String, Vec<u8>)>,
    /// Notes for stderr (skipped plots, non-fatal warnings).
    pub notes: Vec<String>,
    pub pass: bool,
}

impl Outcome {
    fn new(json: Value, pass: bool) -> Self {
        Self {
            json,
            artifacts: Vec::new(),
            notes: Vec::new(),
            pass,
        }
    }
}

fn vec_json(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

/// Reads inputs, attributing failures to the input (exit code 2).
fn load_config(path: &Path, cfg: &RunConfig) -> Result<PointConfig> {
    read_config(path, cfg.tolerance).map_err(input_err)
}

fn weights_or_ones(arg: Option<&str>, a: &PointConfig) -> Result<Weights> {
    match arg {
        Some(s) => label_vector(s, a, "--weights").map_err(input_err),
        None => Ok(Weights::from_element(a.len(), 1.0)),
    }
}

pub fn run(command: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match command {
        Command::Subdivide { config, lift } => subdivide(config, lift, cfg),
        Command::Secondary { config, budget } => secondary(config, *budget, cfg),
        Command::Birch {
            config,
            weights,
            target,
        } => birch(config, weights.as_deref(), target, cfg),
        Command::Limit {
            fan,
            cone,
            point,
            direction,
        } => limit(fan, *cone, point.as_deref(), direction, cfg),
        Command::Degenerate {
            config,
            weights,
            direction,
            schedule,
            density,
        } => degenerate_cmd(
            config,
            weights.as_deref(),
            direction,
            schedule,
            *density,
            cfg,
        ),
        Command::Verify { suite } => verify(suite, cfg),
    }
}

fn subdivide(config: &Path, lift: &str, cfg: &RunConfig) -> Result<Outcome> {
    let a = load_config(config, cfg)?;
    let lam = label_vector(lift, &a, "--lift").map_err(input_err)?;
    let s = regular_subdivision(&a, &lam)?;
    let triangulation = s.is_triangulation(&a);
    let mut out = Outcome::new(
        json!({
            "command": "subdivide",
            "labels": a.labels(),
            "lift": vec_json(&lam),
            "facets": s.facets(),
            "faces": s.faces(),
            "triangulation": triangulation,
        }),
        true,
    );
    if cfg.svg {
        match svg::subdivision(&a, &s) {
            Some(text) => out
                .artifacts
                .push(("subdivision.svg".into(), text.into_bytes())),
            None => out.notes.push(format!(
                "SVG skipped: configuration has dimension {}, not 2",
                a.dim()
            )),
        }
    }
    Ok(out)
}

fn secondary(config: &Path, budget: usize, cfg: &RunConfig) -> Result<Outcome> {
    let a = load_config(config, cfg)?;
    let e = enumerate_regular_triangulations(&a, budget, cfg.seed)?;
    let triangulations: Vec<Value> = e
        .triangulations
        .iter()
        .map(|t| {
            json!({
                "facets": t.subdivision.facets(),
                "gkz": t.gkz,
                "lift": t.lift,
            })
        })
        .collect();
    let mut out = Outcome::new(
        json!({
            "command": "secondary",
            "labels": a.labels(),
            "seed": cfg.seed,
            "budget": e.budget,
            "wall_probes": e.wall_probes,
            "count": e.triangulations.len(),
            "complete": e.oracle_agrees,
            "exhausted": e.exhausted,
            "triangulations": triangulations,
        }),
        true,
    );
    if e.exhausted {
        out.notes.push(format!(
            "warning: wall crossing stopped at its cap; the {} triangulations found may be incomplete",
            e.triangulations.len()
        ));
    }
    if e.oracle_agrees == Some(false) {
        out.notes.push(
            "warning: the exhaustive oracle finds regular triangulations the enumeration missed"
                .into(),
        );
    }
    if cfg.svg {
        let verts: Vec<Vector> = e
            .triangulations
            .iter()
            .map(|t| Vector::from_vec(t.gkz.clone()))
            .collect();
        if let Some(text) = svg::gkz_scatter(&verts, cfg.tolerance.eps_geom) {
            out.artifacts
                .push(("secondary.svg".into(), text.into_bytes()));
        }
    }
    Ok(out)
}

/// Acceptance bound on the moment residual of `birch`.
fn birch_bound(a: &PointConfig, cfg: &RunConfig) -> f64 {
    (1e-8f64).max(10.0 * cfg.tolerance.eps_opt) * a.diameter().max(1.0)
}

fn birch(config: &Path, weights: Option<&str>, target: &str, cfg: &RunConfig) -> Result<Outcome> {
    let a = load_config(config, cfg)?;
    let w = weights_or_ones(weights, &a)?;
    let u = parse_list(target, a.ambient(), "--target").map_err(input_err)?;
    let sol = birch_inverse(&a, &w, &u)?;
    let bound = birch_bound(&a, cfg);
    let pass = sol.residual <= bound;
    Ok(Outcome::new(
        json!({
            "command": "birch",
            "labels": a.labels(),
            "weights": vec_json(&w),
            "target": vec_json(&u),
            "z": vec_json(&sol.z),
            "v": vec_json(&sol.v),
            "face": sol.face,
            "residual": sol.residual,
            "bound": bound,
            "iterations": sol.iterations,
            "pass": pass,
        }),
        pass,
    ))
}

fn limit(
    fan: &Path,
    cone: Option<usize>,
    point: Option<&str>,
    direction: &str,
    cfg: &RunConfig,
) -> Result<Outcome> {
    let f = read_fan(fan, cfg.tolerance.eps_geom).map_err(input_err)?;
    let d = f.ambient();
    let tau = cone.unwrap_or_else(|| f.minimal());
    if tau >= f.len() {
        return Err(input_err(anyhow!(
            "--cone {tau}: the fan has {} cones",
            f.len()
        )));
    }
    let orbit = match point {
        Some(s) => parse_list(s, d, "--point").map_err(input_err)?,
        None => Vector::zeros(d),
    };
    let v = parse_list(direction, d, "--direction").map_err(input_err)?;
    let p = point_at(&f, tau, &orbit)?;
    let lim = one_param_limit(&f, &p, &v)?;
    let cone_json = |id: usize| -> Result<Value> {
        let c = f.cone(id)?;
        let rays: Vec<Vec<f64>> = c.rays().iter().map(vec_json).collect();
        let lineality: Vec<Vec<f64>> = c.lineality().basis_vectors().iter().map(vec_json).collect();
        Ok(json!({"id": id, "dim": c.dim(), "rays": rays, "lineality": lineality}))
    };
    let json = match &lim {
        Some(q) => json!({
            "command": "limit",
            "start": {"cone": cone_json(tau)?, "orbit_coord": vec_json(p.orbit())},
            "direction": vec_json(&v),
            "exists": true,
            "cone": cone_json(*q.cone())?,
            "orbit_coord": vec_json(q.orbit()),
        }),
        None => json!({
            "command": "limit",
            "start": {"cone": cone_json(tau)?, "orbit_coord": vec_json(p.orbit())},
            "direction": vec_json(&v),
            "exists": false,
            "cone": null,
            "orbit_coord": null,
        }),
    };
    Ok(Outcome::new(json, true))
}

fn degenerate_cmd(
    config: &Path,
    weights: Option<&str>,
    direction: &str,
    schedule: &str,
    density: usize,
    cfg: &RunConfig,
) -> Result<Outcome> {
    let a = load_config(config, cfg)?;
    let w = weights_or_ones(weights, &a)?;
    let v = label_vector(direction, &a, "--direction").map_err(input_err)?;
    let schedule = parse_schedule(schedule).map_err(|e| input_err(e.into()))?;
    if density == 0 {
        return Err(input_err(anyhow!("--density must be positive")));
    }
    let report = degenerate(&a, &w, &v, &schedule, density, cfg.seed)?;
    let mut json = serde_json::to_value(&report)?;
    json["command"] = json!("degenerate");
    json["labels"] = json!(a.labels());
    json["weights"] = json!(vec_json(&w));
    json["direction"] = json!(vec_json(&v));
    let mut out = Outcome::new(json, report.pass);
    if cfg.out.is_some() {
        let last = *schedule.last().expect("parsed schedules are nonempty");
        let (src, tgt) = matched_clouds(&a, &w, &v, last, density, cfg.seed)?;
        out.artifacts
            .push(("source.csv".into(), cloud_csv(a.labels(), &src)?));
        out.artifacts
            .push(("target.csv".into(), cloud_csv(a.labels(), &tgt)?));
    }
    if cfg.svg {
        let text = svg::distance_curve(&report.schedule, &report.distances, report.threshold);
        out.artifacts
            .push(("distances.svg".into(), text.into_bytes()));
    }
    Ok(out)
}

fn verify(suite: &str, cfg: &RunConfig) -> Result<Outcome> {
    if suite == "all" {
        let reports: Vec<SuiteReport> = SUITES
            .iter()
            .map(|s| run_suite(s, cfg.seed))
            .collect::<irrtoric::Result<_>>()?;
        let pass = reports.iter().all(|r| r.pass);
        let json = json!({"command": "verify", "seed": cfg.seed, "suites": reports, "pass": pass});
        return Ok(Outcome::new(json, pass));
    }
    if !SUITES.contains(&suite) {
        return Err(input_err(anyhow!(
            "unknown suite `{suite}`; expected one of {} or all",
            SUITES.join(", ")
        )));
    }
    let report = run_suite(suite, cfg.seed)?;
    let pass = report.pass;
    let mut json = serde_json::to_value(&report)?;
    json["command"] = json!("verify");
    Ok(Outcome::new(json, pass))
}
