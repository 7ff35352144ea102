mod analyze;
mod band;
mod map;
mod synth;

use std::time::Instant;

use serde::Serialize;

use crate::args::{Cli, Command, Global};
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;
use crate::output::OutDir;

pub fn run(cli: &Cli) -> CliResult<()> {
    check_global(&cli.global)?;
    let started = Instant::now();
    let mut out = OutDir::create(&cli.global.out)?;
    let manifest = match &cli.command {
        Command::Analyze(a) => analyze::run(&cli.global, a, &mut out)?,
        Command::Synth(a) => synth::run(&cli.global, a, &mut out)?,
        Command::Map(a) => map::run(&cli.global, a, &mut out)?,
        Command::Band(a) => band::run(&cli.global, a, &mut out)?,
    };
    manifest.finish(&mut out, started.elapsed())
}

fn check_global(g: &Global) -> CliResult<()> {
    if !(g.temperature.is_finite() && g.temperature > 0.0) {
        return Err(usage(format!("--temperature must be finite and > 0, got {}", g.temperature)));
    }
    Ok(())
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub(crate) fn manifest_for<A: Serialize>(name: &'static str, global: &Global, args: &A) -> CliResult<Manifest> {
    let config = serde_json::json!({
        "global": serde_json::to_value(global).map_err(anyhow::Error::from)?,
        name: serde_json::to_value(args).map_err(anyhow::Error::from)?,
    });
    Ok(Manifest::new(name, config))
}

/// Shortest round-trip representation.
pub(crate) fn num(v: f64) -> String {
    format!("{v}")
}

/// Largest boundary offset a series of length `n` admits.
pub(crate) fn check_offset(global: &Global, n: usize) -> CliResult<()> {
    if global.max_offset + 1 > n {
        return Err(usage(format!(
            "--max-offset {} needs series of at least {} points, got {n}",
            global.max_offset,
            global.max_offset + 1
        )));
    }
    Ok(())
}
