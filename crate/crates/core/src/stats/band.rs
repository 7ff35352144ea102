use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::synth::{reshuffle, rng};

use super::{quantile, AnalysisConfig};

/// Smallest replicate count accepted.
pub const MIN_RESHUFFLES: usize = 20;

/// Per-level quantile curves of selected paths over reshuffled pairs, on
/// the full lattice `t = 0 ..= 2N-2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapBand {
    pub n_reshuffles: usize,
    pub levels: (f64, f64),
    pub q_low: Vec<f64>,
    pub q_high: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths: Option<Vec<Vec<f64>>>,
}

impl BootstrapBand {
    /// Levels where `profile` leaves the band.
    pub fn flags(&self, profile: &[f64]) -> Vec<bool> {
        profile
            .iter()
            .zip(self.q_low.iter().zip(&self.q_high))
            .map(|(&x, (&lo, &hi))| x < lo || x > hi)
            .collect()
    }

    pub fn width(&self, t: usize) -> f64 {
        self.q_high[t] - self.q_low[t]
    }
}

/// Reshuffles both series independently `n` times, selects the best path
/// of each replicate, and returns the 5% and 95% quantiles per level.
pub fn bootstrap_band(
    x: &TimeSeries<f64>,
    y: &TimeSeries<f64>,
    cfg: &AnalysisConfig,
    n: usize,
    seed: u64,
    keep_paths: bool,
) -> Result<BootstrapBand> {
    if n < MIN_RESHUFFLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_RESHUFFLES} reshuffles, got {n}"
        )));
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let paths: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(seed, i as u64);
            let (sx, sy) = (r.random(), r.random());
            let sel = cfg.select(&reshuffle(x, sx), &reshuffle(y, sy))?;
            Ok(sel.best.profile())
        })
        .collect::<Result<_>>()?;
    let levels = (0.05, 0.95);
    let len = paths[0].len();
    let mut q_low = Vec::with_capacity(len);
    let mut q_high = Vec::with_capacity(len);
    let mut column = vec![0.0; n];
    for t in 0..len {
        for (c, p) in column.iter_mut().zip(&paths) {
            *c = p[t];
        }
        q_low.push(quantile(&column, levels.0));
        q_high.push(quantile(&column, levels.1));
    }
    Ok(BootstrapBand {
        n_reshuffles: n,
        levels,
        q_low,
        q_high,
        paths: keep_paths.then_some(paths),
    })
}
