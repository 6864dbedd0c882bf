//! Command-line arguments and the resolved run configuration.

use std::path::PathBuf;

use anyhow::{ensure, Result};
use clap::{Parser, Subcommand};
use irrtoric::Tolerance;

#[derive(Debug, Parser)]
#[command(
    name = "irrtoric",
    version,
    about = "Irrational toric varieties, secondary fans and degenerations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Geometric tolerance (incidence, rank and membership decisions).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tol_geom: Option<f64>,

    /// Optimization tolerance of the moment-map solver.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tol_opt: Option<f64>,

    /// Directory receiving the JSON report and any plots or point clouds.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Also emit SVG plots (two-dimensional data only).
    #[arg(long, global = true)]
    pub svg: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regular subdivision induced by a lift.
    Subdivide {
        /// Point configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Lift: a JSON file `{"label": value}` or comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        lift: String,
    },
    /// Regular triangulations and vertices of the secondary polytope.
    Secondary {
        #[arg(long)]
        config: PathBuf,
        /// Number of random lifts sampled before wall crossing.
        #[arg(long, default_value_t = 200)]
        budget: usize,
    },
    /// Inverse moment map: the point of `w.Z_A` over a target.
    Birch {
        #[arg(long)]
        config: PathBuf,
        /// Weights (file or comma-separated values); all ones by default.
        #[arg(long, allow_hyphen_values = true)]
        weights: Option<String>,
        /// Target point of `conv(A)`, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
    },
    /// Limit of `γ_{sv}.p` as `s → ∞` in the toric variety of a fan.
    Limit {
        /// Fan (JSON).
        #[arg(long)]
        fan: PathBuf,
        /// Cone of the starting point; the minimal cone by default.
        #[arg(long)]
        cone: Option<usize>,
        /// Orbit coordinate of the starting point; zero by default.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Direction `v`, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
    },
    /// Degeneration of `w.Z_A` along `exp(−s·v)` against the predicted limit.
    Degenerate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        weights: Option<String>,
        /// Direction in `R^A` (file or comma-separated values).
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
        /// Schedule `start:end:step`.
        #[arg(long, default_value = "1:40:1")]
        schedule: String,
        /// Uniform moment targets per sample.
        #[arg(long, default_value_t = 200)]
        density: usize,
    },
    /// Randomized property suite.
    Verify {
        /// One of cones, birch, secondary, limits, monoid, embedding, moduli,
        /// or all.
        #[arg(long)]
        suite: String,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Subdivide { .. } => "subdivide",
            Self::Secondary { .. } => "secondary",
            Self::Birch { .. } => "birch",
            Self::Limit { .. } => "limit",
            Self::Degenerate { .. } => "degenerate",
            Self::Verify { .. } => "verify",
        }
    }

    pub fn inputs(&self) -> Vec<PathBuf> {
        match self {
            Self::Subdivide { config, .. }
            | Self::Secondary { config, .. }
            | Self::Birch { config, .. }
            | Self::Degenerate { config, .. } => vec![config.clone()],
            Self::Limit { fan, .. } => vec![fan.clone()],
            Self::Verify { .. } => Vec::new(),
        }
    }
}

/// Settings shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub inputs: Vec<PathBuf>,
    pub tolerance: Tolerance,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub svg: bool,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let mut tolerance = Tolerance::default();
        for (name, value, slot) in [
            ("--tol-geom", cli.tol_geom, &mut tolerance.eps_geom),
            ("--tol-opt", cli.tol_opt, &mut tolerance.eps_opt),
        ] {
            if let Some(v) = value {
                ensure!(v.is_finite() && v > 0.0, "{name} must be positive, got {v}");
                *slot = v;
            }
        }
        Ok(Self {
            command: cli.command.name(),
            inputs: cli.command.inputs(),
            tolerance,
            seed: cli.seed,
            out: cli.out.clone(),
            svg: cli.svg,
        })
    }
}
