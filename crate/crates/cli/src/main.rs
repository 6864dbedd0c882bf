//! `irrtoric`: command-line driver for irrational toric varieties, regular
//! subdivisions and degenerations.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

mod args;
mod commands;
mod input;
mod output;
mod svg;

use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, RunConfig};
use input::InputError;

/// Environment variable capping the number of worker threads.
const THREADS_VAR: &str = "TORIC_DEGEN_THREADS";

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got `{value}`"))
        .map_err(input::input_err)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    configure_threads()?;
    let cfg = RunConfig::from_cli(cli).map_err(input::input_err)?;
    if let Some(missing) = cfg.inputs.iter().find(|p| !p.is_file()) {
        return Err(input::input_err(anyhow::anyhow!(
            "input file {} not found",
            missing.display()
        )));
    }
    let outcome = commands::run(&cli.command, &cfg)?;
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    let text = output::to_json(&outcome.json)?;
    print!("{text}");
    let dir = cfg.out.as_deref().unwrap_or(Path::new("."));
    if cfg.out.is_some() {
        output::write_atomic(&dir.join(format!("{}.json", cfg.command)), text.as_bytes())?;
    }
    for (name, bytes) in &outcome.artifacts {
        output::write_atomic(&dir.join(name), bytes)?;
    }
    Ok(outcome.pass)
}

/// Exit code of a failed run: 1 when a computation did not converge, 2 for
/// every problem with the inputs.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.chain().any(|e| e.is::<InputError>()) {
        return 2;
    }
    match err.downcast_ref::<irrtoric::Error>() {
        Some(irrtoric::Error::NotConverged { .. }) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
