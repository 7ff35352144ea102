use std::path::Path;

use serde::Serialize;
use toplag::pathsel::PairEnergy;
use toplag::stats::{
    bootstrap_band, moving_window_scan_with, path_to_lags, BootstrapBand, SelfConsistencyResult, SignalMap,
    MIN_POINTS, MIN_RESHUFFLES,
};
use toplag::{DistanceKind, Method, RotatedCoord, ThermalPath};

use super::{check_offset, manifest_for, num, usage};
use crate::args::{AnalyzeArgs, Format, Global};
use crate::error::{CliError, CliResult};
use crate::inputs::{load_pair, sha256_file, InputRecord};
use crate::manifest::Manifest;
use crate::output::OutDir;

#[derive(Serialize)]
struct PathOut<'a> {
    method: Method,
    distance: Option<DistanceKind>,
    temperature: f64,
    n: usize,
    start: RotatedCoord,
    end: RotatedCoord,
    free_energy: f64,
    pairs_scanned: usize,
    /// `<x(t)>` for `t = start.t ..= end.t`.
    xs: &'a [f64],
    /// Integer lag per index of `y`.
    lags: &'a [i64],
    usable: &'a [bool],
}

#[derive(Serialize)]
struct WindowsOut {
    window_len: usize,
    step: usize,
    synchronized_significant: usize,
    plain_significant: usize,
    synchronized: Vec<SelfConsistencyResult>,
    plain: Vec<SelfConsistencyResult>,
}

#[derive(Serialize)]
struct BandOut<'a> {
    band: &'a BootstrapBand,
    profile: &'a [f64],
    outside: Vec<bool>,
}

fn check(a: &AnalyzeArgs, n: usize) -> CliResult<()> {
    if a.windows.is_empty() {
        return Err(usage("--windows needs at least one length"));
    }
    if let Some(&w) = a.windows.iter().find(|&&w| w < MIN_POINTS || w > n) {
        return Err(usage(format!("window length {w} must lie in {MIN_POINTS}..={n}")));
    }
    if a.step == 0 {
        return Err(usage("--step must be > 0"));
    }
    if a.bootstrap != 0 && a.bootstrap < MIN_RESHUFFLES {
        return Err(usage(format!("--bootstrap must be 0 or at least {MIN_RESHUFFLES}")));
    }
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(usage(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
    }
    Ok(())
}

fn read_map(path: &Path) -> CliResult<(SignalMap, InputRecord)> {
    let sha256 = sha256_file(path)?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e.into()))?;
    let map: SignalMap = serde_json::from_str(&text)
        .map_err(|e| CliError::input(path, toplag::Error::InvalidParameter(format!("not a signal map: {e}"))))?;
    let rows = map.rho.len();
    Ok((
        map,
        InputRecord {
            path: path.display().to_string(),
            sha256,
            rows,
        },
    ))
}

fn window_rows(w: &WindowsOut) -> impl Iterator<Item = Vec<String>> + '_ {
    let tag = |kind: &'static str, r: &SelfConsistencyResult| {
        vec![
            w.window_len.to_string(),
            kind.to_string(),
            r.window.0.to_string(),
            r.points.to_string(),
            num(r.a_hat),
            num(r.c_hat),
            num(r.t_stat),
            r.significant.to_string(),
            num(r.f_hat),
            r.rho_lookup.map_or_else(String::new, num),
            r.f_clamped.to_string(),
        ]
    };
    let synced = w.synchronized.iter().map(move |r| tag("synchronized", r));
    let plain = w.plain.iter().map(move |r| tag("plain", r));
    synced.chain(plain)
}

fn write_path(out: &mut OutDir, fmt: Format, p: &PathOut<'_>, energies: &[PairEnergy<f64>]) -> CliResult<()> {
    match fmt {
        Format::Json => {
            out.json("path.json", p)?;
            out.json("energies.json", energies)
        }
        Format::Csv => {
            let t0 = p.start.t;
            out.csv(
                "path.csv",
                &["t", "x"],
                p.xs.iter().enumerate().map(|(i, &x)| vec![(t0 + i).to_string(), num(x)]),
            )?;
            out.csv(
                "lags.csv",
                &["index", "lag", "usable"],
                p.lags
                    .iter()
                    .zip(p.usable)
                    .enumerate()
                    .map(|(i, (l, u))| vec![i.to_string(), l.to_string(), u.to_string()]),
            )?;
            out.csv(
                "energies.csv",
                &["start_t", "start_x", "end_t", "end_x", "free_energy"],
                energies.iter().map(|e| {
                    vec![
                        e.start.t.to_string(),
                        e.start.x.to_string(),
                        e.end.t.to_string(),
                        e.end.x.to_string(),
                        num(e.free_energy),
                    ]
                }),
            )
        }
    }
}

pub(super) fn write_band(out: &mut OutDir, fmt: Format, band: &BootstrapBand, best: &ThermalPath) -> CliResult<()> {
    let profile = best.profile();
    let outside = band.flags(&profile);
    match fmt {
        Format::Json => out.json(
            "band.json",
            &BandOut {
                band,
                profile: &profile,
                outside,
            },
        ),
        Format::Csv => out.csv(
            "band.csv",
            &["t", "q_low", "q_high", "profile", "outside"],
            (0..profile.len()).map(|t| {
                vec![
                    t.to_string(),
                    num(band.q_low[t]),
                    num(band.q_high[t]),
                    num(profile[t]),
                    outside[t].to_string(),
                ]
            }),
        ),
    }
}

pub fn run(g: &Global, a: &AnalyzeArgs, out: &mut OutDir) -> CliResult<Manifest> {
    let pair = load_pair(&a.input)?;
    let n = pair.y.len();
    check_offset(g, n)?;
    check(a, n)?;
    let mut inputs = pair.inputs.clone();
    let map = match &a.map {
        Some(path) => {
            let (map, rec) = read_map(path)?;
            inputs.push(rec);
            Some(map)
        }
        None => None,
    };

    let cfg = g.analysis();
    let sel = cfg.select(&pair.x, &pair.y)?;
    let best = &sel.best;
    let lags = path_to_lags(best, n);
    let path_out = PathOut {
        method: best.method,
        distance: best.distance_kind,
        temperature: best.temperature,
        n: best.n,
        start: best.start,
        end: best.end,
        free_energy: best.free_energy,
        pairs_scanned: sel.scanned,
        xs: &best.xs,
        lags: &lags.lags,
        usable: &lags.usable,
    };
    write_path(out, g.format, &path_out, &sel.energies)?;

    let mut scans = Vec::with_capacity(a.windows.len());
    for &w in &a.windows {
        let scan = moving_window_scan_with(&pair.x, &pair.y, best, w, a.step, map.as_ref(), a.alpha)?;
        let (s, p) = scan.significant_counts();
        scans.push(WindowsOut {
            window_len: w,
            step: a.step,
            synchronized_significant: s,
            plain_significant: p,
            synchronized: scan.synchronized,
            plain: scan.plain,
        });
    }
    match g.format {
        Format::Json => out.json("windows.json", &scans)?,
        Format::Csv => out.csv(
            "windows.csv",
            &[
                "window_len", "kind", "start", "points", "a_hat", "c_hat", "t_stat", "significant", "f_hat", "rho",
                "f_clamped",
            ],
            scans.iter().flat_map(window_rows),
        )?,
    }

    if a.bootstrap > 0 {
        let band = bootstrap_band(&pair.x, &pair.y, &cfg, a.bootstrap, g.seed, false)?;
        write_band(out, g.format, &band, best)?;
    }

    let mut m = manifest_for("analyze", g, a)?;
    m.inputs = inputs;
    m.span = Some(pair.span);
    m.transforms = pair.transforms;
    Ok(m)
}
