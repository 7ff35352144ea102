use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Upper bound on the number of histogram bins.
const MAX_BINS: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HistogramSpec {
    /// Bin width `2 IQR n^(-1/3)` of the pooled sample.
    FreedmanDiaconis,
    Width(f64),
    Count(usize),
}

/// Resolved bin grid: bin `k` is `[lo + k width, lo + (k+1) width)`, the
/// last bin closed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bins {
    pub lo: f64,
    pub width: f64,
    pub count: usize,
}

impl Bins {
    fn index(&self, v: f64) -> usize {
        let k = ((v - self.lo) / self.width).floor();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.count - 1)
        }
    }

    fn counts(&self, sample: &[f64]) -> Vec<u64> {
        let mut c = vec![0u64; self.count];
        for &v in sample {
            c[self.index(v)] += 1;
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoResult {
    pub rho: f64,
    pub fe_signal: Vec<f64>,
    pub fe_random: Vec<f64>,
    pub bins: Bins,
}

/// Overlapping coefficient of the two samples' histograms on a shared grid
/// spanning the pooled range.
pub fn rho_metric<F: Scalar>(fe_signal: &[F], fe_random: &[F], spec: HistogramSpec) -> Result<RhoResult> {
    if fe_signal.is_empty() {
        return Err(Error::EmptySample("fe_signal"));
    }
    if fe_random.is_empty() {
        return Err(Error::EmptySample("fe_random"));
    }
    let sig: Vec<f64> = fe_signal.iter().map(|v| v.f64()).collect();
    let rnd: Vec<f64> = fe_random.iter().map(|v| v.f64()).collect();
    for (i, v) in sig.iter().chain(&rnd).enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
    }
    let mut pooled: Vec<f64> = sig.iter().chain(&rnd).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let bins = resolve(&pooled, spec)?;

    // Exact in integers: sum_k min(c_k / n_c, r_k / n_r).
    let (nc, nr) = (sig.len() as u128, rnd.len() as u128);
    let overlap: u128 = bins
        .counts(&sig)
        .into_iter()
        .zip(bins.counts(&rnd))
        .map(|(c, r)| (c as u128 * nr).min(r as u128 * nc))
        .sum();
    let rho = if overlap == nc * nr {
        1.0
    } else {
        overlap as f64 / (nc * nr) as f64
    };
    Ok(RhoResult {
        rho,
        fe_signal: sig,
        fe_random: rnd,
        bins,
    })
}

fn resolve(sorted: &[f64], spec: HistogramSpec) -> Result<Bins> {
    let lo = sorted[0];
    let range = sorted[sorted.len() - 1] - lo;
    let n = sorted.len() as f64;
    let width = match spec {
        HistogramSpec::Width(w) if w > 0.0 && w.is_finite() => w,
        HistogramSpec::Count(c) if c > 0 => range / c as f64,
        HistogramSpec::FreedmanDiaconis => {
            let iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
            if iqr > 0.0 {
                2.0 * iqr / n.cbrt()
            } else {
                // Heavy ties: fall back to sqrt(n) bins over the range.
                range / n.sqrt().ceil()
            }
        }
        other => return Err(Error::InvalidParameter(format!("invalid histogram spec {other:?}"))),
    };
    if !(width > 0.0) || range == 0.0 {
        return Ok(Bins { lo, width: 1.0, count: 1 });
    }
    let count = ((range / width).ceil() as usize).clamp(1, MAX_BINS);
    let width = if count == MAX_BINS { range / MAX_BINS as f64 } else { width };
    Ok(Bins { lo, width, count })
}

/// Linear-interpolation quantile of a sorted sample.
fn sorted_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let i = h.floor() as usize;
    let frac = h - i as f64;
    match sorted.get(i + 1) {
        Some(&next) => sorted[i] + frac * (next - sorted[i]),
        None => sorted[i],
    }
}
