//! JSON input files and vector arguments.
//!
//! A point configuration is `{"points": {"label": [x, …], …}, "affine": bool}`
//! with labels kept in file order; a fan is
//! `{"cones": [{"generators": [[…], …]}, …]}` (faces are added
//! automatically, `"ambient"` is needed only when no generator is given);
//! lifts and weights are `{"label": value}` objects.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use irrtoric::{Fan, PointConfig, Tolerance, Vector};
use serde::Deserialize;
use serde_json::{Map, Value};

/// Input problems, reported with exit code 2.
#[derive(Debug)]
pub struct InputError(pub anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

pub fn input_err(e: anyhow::Error) -> anyhow::Error {
    anyhow::Error::new(InputError(e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: malformed input", path.display()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    points: Map<String, Value>,
    #[serde(default)]
    affine: bool,
}

fn numbers(v: &Value, what: &str) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| anyhow!("{what}: expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_f64()
                .ok_or_else(|| anyhow!("{what}[{i}]: expected a number, found {x}"))
        })
        .collect()
}

/// Reads a point configuration.
pub fn read_config(path: &Path, tol: Tolerance) -> Result<PointConfig> {
    let file: ConfigFile = read_json(path)?;
    let mut labels = Vec::with_capacity(file.points.len());
    let mut points = Vec::with_capacity(file.points.len());
    for (label, coords) in &file.points {
        let p = numbers(coords, &format!("{}: point `{label}`", path.display()))?;
        labels.push(label.clone());
        points.push(Vector::from_vec(p));
    }
    PointConfig::with_tolerance(labels, points, file.affine, tol)
        .with_context(|| format!("{}: invalid configuration", path.display()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConeSpec {
    generators: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FanFile {
    #[serde(default)]
    ambient: Option<usize>,
    cones: Vec<ConeSpec>,
}

/// Reads a fan; generator dimensions must agree.
pub fn read_fan(path: &Path, eps: f64) -> Result<Fan> {
    let file: FanFile = read_json(path)?;
    let dims: Vec<usize> = file
        .cones
        .iter()
        .flat_map(|c| c.generators.iter().map(Vec::len))
        .collect();
    let ambient = match (file.ambient, dims.first()) {
        (Some(d), _) => d,
        (None, Some(&d)) => d,
        (None, None) => bail!("{}: no generators; give \"ambient\"", path.display()),
    };
    if let Some((k, d)) = dims.iter().enumerate().find(|(_, &d)| d != ambient) {
        bail!(
            "{}: generator {k} has dimension {d}, expected {ambient}",
            path.display()
        );
    }
    let cones: Vec<Vec<Vector>> = file
        .cones
        .iter()
        .map(|c| {
            c.generators
                .iter()
                .map(|g| Vector::from_vec(g.clone()))
                .collect()
        })
        .collect();
    Fan::from_generators(ambient, &cones, eps)
        .with_context(|| format!("{}: invalid fan", path.display()))
}

/// Parses `"x, y, …"` with exactly `dim` entries.
pub fn parse_list(arg: &str, dim: usize, what: &str) -> Result<Vector> {
    let vals: Vec<f64> = arg
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("{what}: `{}` is not a number", t.trim()))
        })
        .collect::<Result<_>>()?;
    if vals.len() != dim {
        bail!("{what}: expected {dim} values, found {}", vals.len());
    }
    Ok(Vector::from_vec(vals))
}

/// A vector indexed by the labels of `a`: a JSON file `{"label": value}`
/// naming every label exactly once, or an inline comma-separated list in
/// label order.
pub fn label_vector(arg: &str, a: &PointConfig, what: &str) -> Result<Vector> {
    let path = Path::new(arg);
    if !path.is_file() {
        return parse_list(arg, a.len(), what);
    }
    let map: Map<String, Value> = read_json(path)?;
    let mut out = vec![None; a.len()];
    for (label, v) in &map {
        let i = a
            .index_of(label)
            .ok_or_else(|| anyhow!("{}: unknown label `{label}`", path.display()))?;
        let x = v
            .as_f64()
            .ok_or_else(|| anyhow!("{}: label `{label}`: expected a number", path.display()))?;
        out[i] = Some(x);
    }
    let vals: Vec<f64> = out
        .iter()
        .enumerate()
        .map(|(i, x)| {
            x.ok_or_else(|| anyhow!("{}: missing label `{}`", path.display(), a.labels()[i]))
        })
        .collect::<Result<_>>()?;
    Ok(Vector::from_vec(vals))
}
