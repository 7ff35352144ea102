use serde::Serialize;
use toplag::series::write_csv;
use toplag::synth::{gen_pair, gen_random_model, Ar1Params, PiecewiseLagModel, RandomModelSpec, BURN_IN};

use super::{manifest_for, usage};
use crate::args::{Global, SynthArgs};
use crate::error::CliResult;
use crate::manifest::Manifest;
use crate::output::OutDir;

/// Sidecar describing how the pair was generated.
#[derive(Serialize)]
struct ModelSidecar<'a> {
    kind: String,
    seed: u64,
    burn_in: usize,
    ar1: &'a Ar1Params,
    model: &'a PiecewiseLagModel,
    /// Lag of every index of `y`.
    lags: Vec<i64>,
}

fn build(g: &Global, a: &SynthArgs) -> CliResult<(String, Ar1Params, PiecewiseLagModel)> {
    let (kind, mut ar1, mut model) = if a.random {
        if a.max_lag < 0 {
            return Err(usage("--max-lag must be >= 0"));
        }
        let mut spec = RandomModelSpec {
            n_segments: a.segments,
            segment_len: a.segment_len,
            lag_range: (-a.max_lag, a.max_lag),
            ..RandomModelSpec::default()
        };
        if let Some(v) = a.a {
            spec.a_range = (v, v);
        }
        if let Some(v) = a.f {
            spec.f = v;
        }
        let model = gen_random_model(&spec, g.seed).map_err(|e| usage(e.to_string()))?;
        let ar1 = Ar1Params {
            b: 0.7,
            sigma_xi: 1.0,
            length: model.len(),
            seed: g.seed,
        };
        ("random".to_string(), ar1, model)
    } else {
        let (ar1, model) = a.paper_model.build(g.seed);
        (format!("{:?}", a.paper_model), ar1, model)
    };
    if let Some(v) = a.a {
        model.a = v;
    }
    if let Some(v) = a.f {
        model.f = v;
    }
    if let Some(v) = a.b {
        ar1.b = v;
    }
    if !(ar1.b.abs() < 1.0) {
        return Err(usage(format!("--b must satisfy |b| < 1, got {}", ar1.b)));
    }
    if !(model.a.is_finite() && model.f.is_finite() && model.f >= 0.0) {
        return Err(usage("--a must be finite and --f finite and >= 0"));
    }
    Ok((kind, ar1, model))
}

pub fn run(g: &Global, a: &SynthArgs, out: &mut OutDir) -> CliResult<Manifest> {
    let (kind, ar1, model) = build(g, a)?;
    let pair = gen_pair(&ar1, &model)?;

    let mut buf = Vec::new();
    write_csv(&mut buf, None, pair.x.values())?;
    out.bytes("x.csv", &buf)?;
    buf.clear();
    write_csv(&mut buf, None, pair.y.values())?;
    out.bytes("y.csv", &buf)?;

    out.json(
        "model.json",
        &ModelSidecar {
            kind,
            seed: g.seed,
            burn_in: BURN_IN,
            ar1: &pair.ar1,
            model: &pair.model,
            lags: pair.model.lags(),
        },
    )?;
    let mut m = manifest_for("synth", g, a)?;
    m.transforms = vec!["none".into()];
    Ok(m)
}
