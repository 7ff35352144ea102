use toplag::stats::{signal_map, temperature_profile, MapConfig, MapGrid};
use toplag::synth::RandomModelSpec;

use super::{manifest_for, num, usage};
use crate::args::{Format, Global, MapArgs};
use crate::error::CliResult;
use crate::manifest::Manifest;
use crate::output::OutDir;

fn grid(a: &MapArgs) -> CliResult<MapGrid> {
    let caption = MapGrid::caption();
    let grid = MapGrid {
        a: a.a_values.clone().unwrap_or(caption.a),
        f: a.f_values.clone().unwrap_or(caption.f),
    };
    if grid.a.is_empty() || grid.f.is_empty() {
        return Err(usage("--a-values and --f-values must be non-empty"));
    }
    if grid.f.iter().chain(&grid.a).any(|v| !v.is_finite()) || grid.f.iter().any(|&f| f < 0.0) {
        return Err(usage("grid values must be finite and noise ratios >= 0"));
    }
    Ok(grid)
}

pub fn run(g: &Global, a: &MapArgs, out: &mut OutDir) -> CliResult<Manifest> {
    let grid = grid(a)?;
    let temperatures = a.temperatures.clone().unwrap_or_else(|| vec![g.temperature]);
    if let Some(t) = temperatures.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(usage(format!("temperatures must be finite and > 0, got {t}")));
    }
    if a.ensemble < 2 {
        return Err(usage("--ensemble must be at least 2"));
    }
    if a.max_lag < 0 || !(a.b.abs() < 1.0) {
        return Err(usage("--max-lag must be >= 0 and --b must satisfy |b| < 1"));
    }
    if a.segments == 0 || a.segments * a.segment_len <= g.max_offset {
        return Err(usage("segments too short for --max-offset"));
    }

    let mut maps = Vec::with_capacity(temperatures.len());
    for &temperature in &temperatures {
        let cfg = MapConfig {
            temperature,
            ensemble: a.ensemble,
            seed: g.seed,
            boundary: g.boundary(),
            distance: g.distance,
            model: RandomModelSpec {
                n_segments: a.segments,
                segment_len: a.segment_len,
                lag_range: (-a.max_lag, a.max_lag),
                ..RandomModelSpec::default()
            },
            b: a.b,
            ..MapConfig::default()
        };
        eprintln!("toplag: map at T = {temperature} ({} cells)", grid.cells());
        let map = signal_map(&grid, &cfg)?;
        // The JSON form is what `analyze --map` reads, so it is always written.
        out.json(&format!("map-{temperature}.json"), &map)?;
        if g.format == Format::Csv {
            let rows = grid.a.iter().enumerate().flat_map(|(i, &av)| {
                let map = &map;
                grid.f
                    .iter()
                    .enumerate()
                    .map(move |(j, &fv)| vec![num(av), num(fv), num(map.get(i, j))])
            });
            out.csv(&format!("map-{temperature}.csv"), &["a", "f", "rho"], rows)?;
        }
        maps.push(map);
    }

    let profile = temperature_profile(&maps)?;
    match g.format {
        Format::Json => out.json("profile.json", &profile)?,
        Format::Csv => out.csv(
            "profile.csv",
            &["temperature", "mean", "stdev"],
            profile
                .iter()
                .map(|r| vec![num(r.temperature), num(r.mean), num(r.stdev)]),
        )?,
    }
    manifest_for("map", g, a)
}
