use toplag::stats::{bootstrap_band, MIN_RESHUFFLES};

use super::analyze::write_band;
use super::{check_offset, manifest_for, num, usage};
use crate::args::{BandArgs, Format, Global};
use crate::error::CliResult;
use crate::inputs::load_pair;
use crate::manifest::Manifest;
use crate::output::OutDir;

pub fn run(g: &Global, a: &BandArgs, out: &mut OutDir) -> CliResult<Manifest> {
    if a.n < MIN_RESHUFFLES {
        return Err(usage(format!("--n must be at least {MIN_RESHUFFLES}")));
    }
    let pair = load_pair(&a.input)?;
    check_offset(g, pair.y.len())?;
    let cfg = g.analysis();
    let sel = cfg.select(&pair.x, &pair.y)?;
    let band = bootstrap_band(&pair.x, &pair.y, &cfg, a.n, g.seed, a.keep_paths)?;
    write_band(out, g.format, &band, &sel.best)?;
    if let (Format::Csv, Some(paths)) = (g.format, &band.paths) {
        out.csv(
            "band_paths.csv",
            &["replicate", "t", "x"],
            paths.iter().enumerate().flat_map(|(i, p)| {
                p.iter()
                    .enumerate()
                    .map(move |(t, &x)| vec![i.to_string(), t.to_string(), num(x)])
            }),
        )?;
    }
    let mut m = manifest_for("band", g, a)?;
    m.inputs = pair.inputs;
    m.span = Some(pair.span);
    m.transforms = pair.transforms;
    Ok(m)
}
