use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::DistanceKind;
use crate::pathsel::BoundarySpec;
use crate::synth::{gen_pair, gen_random_model, reshuffle, rng, Ar1Params, PiecewiseLagModel, RandomModelSpec, Segment};
use crate::thermal::Method;

use super::regression::LeadLagSeries;
use super::rho::{rho_metric, HistogramSpec, RhoResult};
use super::AnalysisConfig;

/// Coupling and noise-ratio axes of a signal map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapGrid {
    pub a: Vec<f64>,
    pub f: Vec<f64>,
}

impl MapGrid {
    /// `0.01, 0.06, .., 0.96, 1` on both axes.
    pub fn caption() -> Self {
        let mut axis: Vec<f64> = (0..20).map(|k| 0.01 + 0.05 * k as f64).collect();
        axis.push(1.0);
        Self { a: axis.clone(), f: axis }
    }

    /// `n` evenly spaced values from `lo` to `hi` on both axes.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Self {
        let axis: Vec<f64> = match n {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
        };
        Self { a: axis.clone(), f: axis }
    }

    pub fn cells(&self) -> usize {
        self.a.len() * self.f.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapConfig {
    pub temperature: f64,
    /// Genuine pairs per cell; the random sample has the same size.
    pub ensemble: usize,
    pub seed: u64,
    pub boundary: BoundarySpec,
    pub distance: DistanceKind,
    /// Segment layout and lag range; `a_range` and `f` are set per cell.
    pub model: RandomModelSpec,
    /// AR coefficient of the driver.
    pub b: f64,
    pub histogram: HistogramSpec,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            temperature: 2.0,
            ensemble: 100,
            seed: 0,
            boundary: BoundarySpec::default(),
            distance: DistanceKind::Minus,
            model: RandomModelSpec::default(),
            b: 0.7,
            histogram: HistogramSpec::FreedmanDiaconis,
        }
    }
}

impl MapConfig {
    pub fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            temperature: self.temperature,
            method: Method::Tops,
            distance: self.distance,
            boundary: self.boundary,
        }
    }
}

/// Minimum free energies of genuine pairs and of their reshuffles, for
/// both methods, indexed by ensemble member.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSample {
    pub top_signal: Vec<f64>,
    pub tops_signal: Vec<f64>,
    pub top_random: Vec<f64>,
    pub tops_random: Vec<f64>,
}

fn member_seed(seed: u64, k: usize) -> u64 {
    rng(seed, k as u64).random()
}

/// Runs `ensemble` members: member `k` builds its model with `model(seed_k)`,
/// generates the pair, reshuffles both series, and records the free
/// energies of the pair and of the reshuffled pair.
fn run_ensemble<M>(b: f64, analysis: &AnalysisConfig, ensemble: usize, seed: u64, model: M) -> Result<EnsembleSample>
where
    M: Fn(u64) -> Result<PiecewiseLagModel> + Sync,
{
    if ensemble == 0 {
        return Err(Error::InvalidParameter("ensemble must be positive".into()));
    }
    let rows: Vec<[f64; 4]> = (0..ensemble)
        .into_par_iter()
        .map(|k| {
            let s = member_seed(seed, k);
            let m = model(s)?;
            let ar1 = Ar1Params {
                b,
                sigma_xi: 1.0,
                length: m.len(),
                seed: s,
            };
            let pair = gen_pair(&ar1, &m)?;
            let (top_s, tops_s) = analysis.free_energies(&pair.x, &pair.y)?;
            let mut r = rng(s, 3);
            let (xs, ys) = (reshuffle(&pair.x, r.random()), reshuffle(&pair.y, r.random()));
            let (top_r, tops_r) = analysis.free_energies(&xs, &ys)?;
            Ok([top_s, tops_s, top_r, tops_r])
        })
        .collect::<Result<_>>()?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect();
    Ok(EnsembleSample {
        top_signal: col(0),
        tops_signal: col(1),
        top_random: col(2),
        tops_random: col(3),
    })
}

/// Free energies of `ensemble` random piecewise-lag pairs drawn from `spec`
/// and of their reshuffles.
pub fn free_energy_ensemble(
    spec: &RandomModelSpec,
    b: f64,
    analysis: &AnalysisConfig,
    ensemble: usize,
    seed: u64,
) -> Result<EnsembleSample> {
    run_ensemble(b, analysis, ensemble, seed, |s| gen_random_model(spec, s))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalMap {
    pub grid: MapGrid,
    pub temperature: f64,
    pub ensemble: usize,
    /// `rho` per cell, `a`-major: cell `(i, j)` is at `i * grid.f.len() + j`.
    pub rho: Vec<f64>,
}

impl SignalMap {
    pub fn get(&self, ia: usize, jf: usize) -> f64 {
        self.rho[ia * self.grid.f.len() + jf]
    }

    /// `rho` of the grid cell nearest to `(a, f)`, and whether `f` lay above
    /// the grid.
    pub fn lookup(&self, a: f64, f: f64) -> (f64, bool) {
        let nearest = |axis: &[f64], v: f64| {
            axis.iter()
                .enumerate()
                .min_by(|(_, p), (_, q)| (*p - v).abs().total_cmp(&(*q - v).abs()))
                .map_or(0, |(i, _)| i)
        };
        let clamped = self.grid.f.iter().all(|&g| f > g);
        (self.get(nearest(&self.grid.a, a), nearest(&self.grid.f, f)), clamped)
    }
}

/// `rho` of TOPS free energies for every `(a, f)` cell. Members share seeds
/// across cells, so neighbouring cells see the same drivers and lags.
pub fn signal_map(grid: &MapGrid, cfg: &MapConfig) -> Result<SignalMap> {
    let analysis = cfg.analysis();
    let mut rho = Vec::with_capacity(grid.cells());
    for &a in &grid.a {
        for &f in &grid.f {
            let spec = RandomModelSpec {
                a_range: (a, a),
                f,
                ..cfg.model
            };
            let s = free_energy_ensemble(&spec, cfg.b, &analysis, cfg.ensemble, cfg.seed)?;
            rho.push(rho_metric(&s.tops_signal, &s.tops_random, cfg.histogram)?.rho);
        }
    }
    Ok(SignalMap {
        grid: grid.clone(),
        temperature: cfg.temperature,
        ensemble: cfg.ensemble,
        rho,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub temperature: f64,
    pub mean: f64,
    /// Population standard deviation over cells.
    pub stdev: f64,
}

/// Mean and spread of `rho` over the cells of each map.
pub fn temperature_profile(maps: &[SignalMap]) -> Result<Vec<ProfileRow>> {
    if let Some(first) = maps.first() {
        if maps.iter().any(|m| m.grid != first.grid) {
            return Err(Error::GridMismatch);
        }
    }
    Ok(maps
        .iter()
        .map(|m| {
            let n = m.rho.len() as f64;
            let mean = m.rho.iter().sum::<f64>() / n;
            let var = m.rho.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
            ProfileRow {
                temperature: m.temperature,
                mean,
                stdev: var.sqrt(),
            }
        })
        .collect())
}

fn segments_from_lags(lags: &[i64]) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for (i, &lag) in lags.iter().enumerate() {
        match out.last_mut() {
            Some(s) if s.lag == lag => s.end = i + 1,
            _ => out.push(Segment { end: i + 1, lag }),
        }
    }
    out
}

/// `rho` for a single pair from regenerated models: pairs follow the
/// recovered lags with coupling `a` and noise ratio `f`, and are compared
/// with their reshuffles. `cfg.model` is not used.
pub fn rho_by_regeneration(lags: &LeadLagSeries, a: f64, f: f64, cfg: &MapConfig) -> Result<RhoResult> {
    let segments = segments_from_lags(&lags.lags);
    let s = run_ensemble(cfg.b, &cfg.analysis(), cfg.ensemble, cfg.seed, |seed| {
        Ok(PiecewiseLagModel {
            segments: segments.clone(),
            a,
            f,
            seed,
        })
    })?;
    rho_metric(&s.tops_signal, &s.tops_random, cfg.histogram)
}
