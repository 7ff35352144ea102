//! Synthetic lead-lag benchmarks: AR(1) drivers and piecewise-lag responses.
//!
//! All randomness comes from ChaCha20 ([`rng`]); normal variates use the
//! ziggurat sampler of `rand_distr`. Generators are pure functions of their
//! parameters and seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::TimeSeries;

/// Burn-in samples added before the deepest look-back.
pub const BURN_IN: usize = 100;

/// Seeded generator on a numbered stream. Distinct streams of one seed are
/// independent sequences.
pub fn rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

const STREAM_DRIVER: u64 = 0;
const STREAM_NOISE: u64 = 1;
const STREAM_MODEL: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ar1Params {
    pub b: f64,
    pub sigma_xi: f64,
    pub length: usize,
    pub seed: u64,
}

impl Ar1Params {
    fn check(&self) -> Result<()> {
        if !(self.b.abs() < 1.0) {
            return Err(Error::InvalidCoefficient(self.b));
        }
        if !(self.sigma_xi > 0.0) || !self.sigma_xi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "innovation stdev must be finite and > 0, got {}",
                self.sigma_xi
            )));
        }
        Ok(())
    }
}

/// `X(t) = b X(t-1) + xi`, with `X(0)` drawn from the stationary law.
pub fn gen_ar1(p: &Ar1Params) -> Result<TimeSeries<f64>> {
    p.check()?;
    TimeSeries::new(ar1_values(p, p.length, STREAM_DRIVER))
}

fn ar1_values(p: &Ar1Params, len: usize, stream: u64) -> Vec<f64> {
    let mut r = rng(p.seed, stream);
    let mut draw = || r.sample::<f64, _>(StandardNormal);
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let mut x = draw() * p.sigma_xi / (1.0 - p.b * p.b).sqrt();
    out.push(x);
    for _ in 1..len {
        x = p.b * x + p.sigma_xi * draw();
        out.push(x);
    }
    out
}

/// Lag `lag` applies to response indices below `end` (and at or above the
/// previous segment's end).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub end: usize,
    pub lag: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLagModel {
    pub segments: Vec<Segment>,
    /// Coupling coefficient.
    pub a: f64,
    /// Noise ratio `sigma_eta / sigma_xi`.
    pub f: f64,
    pub seed: u64,
}

impl PiecewiseLagModel {
    pub fn len(&self) -> usize {
        self.segments.last().map_or(0, |s| s.end)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_abs_lag(&self) -> usize {
        self.segments.iter().map(|s| s.lag.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// True lag of each response index.
    pub fn lags(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.len());
        for s in &self.segments {
            out.resize(s.end, s.lag);
        }
        out
    }

    fn check(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidParameter("model has no segments".into()));
        }
        let mut prev = 0;
        for s in &self.segments {
            if s.end <= prev {
                return Err(Error::InvalidParameter(format!(
                    "segment ends must be strictly increasing, got {} after {prev}",
                    s.end
                )));
            }
            prev = s.end;
        }
        if !self.a.is_finite() || !(self.f >= 0.0) || !self.f.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need finite a and f >= 0, got a={}, f={}",
                self.a, self.f
            )));
        }
        Ok(())
    }
}

/// An AR(1) path with margins on both sides of the analysed span, so that
/// lagged look-ups stay inside the generated history.
#[derive(Clone, Debug, PartialEq)]
pub struct Driver {
    pub values: Vec<f64>,
    /// Index in `values` of the analysed span's first sample.
    pub offset: usize,
    pub length: usize,
    pub sigma_xi: f64,
}

impl Driver {
    /// Driver for responses with lags up to `max_lag` in magnitude.
    pub fn generate(p: &Ar1Params, max_lag: usize) -> Result<Self> {
        p.check()?;
        let offset = max_lag + BURN_IN;
        let values = ar1_values(p, offset + p.length + max_lag, STREAM_DRIVER);
        Ok(Self {
            values,
            offset,
            length: p.length,
            sigma_xi: p.sigma_xi,
        })
    }

    /// Driver without margins: lagged look-ups must stay inside `x`.
    pub fn from_series(x: &TimeSeries<f64>, sigma_xi: f64) -> Self {
        Self {
            values: x.values().to_vec(),
            offset: 0,
            length: x.len(),
            sigma_xi,
        }
    }

    pub fn span(&self) -> Result<TimeSeries<f64>> {
        TimeSeries::new(self.values[self.offset..self.offset + self.length].to_vec())
    }
}

/// `Y(i) = a X(i - tau(i)) + eta`, `eta ~ N(0, f sigma_xi)`.
pub fn gen_piecewise(x: &Driver, m: &PiecewiseLagModel) -> Result<TimeSeries<f64>> {
    m.check()?;
    let mut r = rng(m.seed, STREAM_NOISE);
    let sd = m.f * x.sigma_xi;
    let mut y = Vec::with_capacity(m.len());
    for (i, lag) in m.lags().into_iter().enumerate() {
        let j = (x.offset + i) as i64 - lag;
        if j < 0 || j as usize >= x.values.len() {
            return Err(Error::LagOutOfRange { index: i, lag });
        }
        let eta: f64 = r.sample(StandardNormal);
        y.push(m.a * x.values[j as usize] + sd * eta);
    }
    TimeSeries::new(y)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticPair {
    pub x: TimeSeries<f64>,
    pub y: TimeSeries<f64>,
    pub ar1: Ar1Params,
    pub model: PiecewiseLagModel,
}

/// Driver and response over the same span. The driver's length is taken
/// from the model.
pub fn gen_pair(ar1: &Ar1Params, model: &PiecewiseLagModel) -> Result<SyntheticPair> {
    let ar1 = Ar1Params {
        length: model.len(),
        ..*ar1
    };
    let driver = Driver::generate(&ar1, model.max_abs_lag())?;
    Ok(SyntheticPair {
        y: gen_piecewise(&driver, model)?,
        x: driver.span()?,
        ar1,
        model: model.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PaperModel {
    /// Lags 30, 15, 0, -15, -30 over 100-step segments.
    A,
    /// Same lags over 200-step segments.
    B,
    /// Lags 60, 30, 0, -30, -60 over 200-step segments.
    C,
}

impl std::str::FromStr for PaperModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Self::A),
            "B" => Ok(Self::B),
            "C" => Ok(Self::C),
            other => Err(Error::InvalidParameter(format!("unknown model `{other}`"))),
        }
    }
}

impl PaperModel {
    /// AR(1) parameters (`b = 0.7`, unit innovations) and the response model
    /// (`a = 0.8`, `f = 0.2`).
    pub fn build(self, seed: u64) -> (Ar1Params, PiecewiseLagModel) {
        let (len, scale) = match self {
            Self::A => (100, 1),
            Self::B => (200, 1),
            Self::C => (200, 2),
        };
        let segments = [30, 15, 0, -15, -30]
            .iter()
            .enumerate()
            .map(|(k, &lag)| Segment {
                end: (k + 1) * len,
                lag: lag * scale,
            })
            .collect::<Vec<_>>();
        let ar1 = Ar1Params {
            b: 0.7,
            sigma_xi: 1.0,
            length: 5 * len,
            seed,
        };
        let model = PiecewiseLagModel {
            segments,
            a: 0.8,
            f: 0.2,
            seed,
        };
        (ar1, model)
    }
}

/// Ranges for [`gen_random_model`]. Defaults give five 100-step segments,
/// integer lags in `[-30, 30]`, `a` in `[0.7, 1]` and `f = 0.2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomModelSpec {
    pub n_segments: usize,
    pub segment_len: usize,
    pub lag_range: (i64, i64),
    pub a_range: (f64, f64),
    pub f: f64,
}

impl Default for RandomModelSpec {
    fn default() -> Self {
        Self {
            n_segments: 5,
            segment_len: 100,
            lag_range: (-30, 30),
            a_range: (0.7, 1.0),
            f: 0.2,
        }
    }
}

pub fn gen_random_model(spec: &RandomModelSpec, seed: u64) -> Result<PiecewiseLagModel> {
    let (lo, hi) = spec.lag_range;
    let (a_lo, a_hi) = spec.a_range;
    if spec.n_segments == 0 || spec.segment_len == 0 || lo > hi || !(a_lo <= a_hi) {
        return Err(Error::InvalidParameter(format!("empty range in {spec:?}")));
    }
    let mut r = rng(seed, STREAM_MODEL);
    let segments = (0..spec.n_segments)
        .map(|k| Segment {
            end: (k + 1) * spec.segment_len,
            lag: r.random_range(lo..=hi),
        })
        .collect();
    let a = if a_lo == a_hi { a_lo } else { r.random_range(a_lo..=a_hi) };
    Ok(PiecewiseLagModel {
        segments,
        a,
        f: spec.f,
        seed,
    })
}

/// Uniform random permutation of `values` in place.
pub fn shuffle_in_place<T>(values: &mut [T], seed: u64) {
    values.shuffle(&mut rng(seed, 0));
}

/// Uniformly permuted copy of `series`.
pub fn reshuffle<F: Scalar>(series: &TimeSeries<F>, seed: u64) -> TimeSeries<F> {
    let mut v = series.values().to_vec();
    shuffle_in_place(&mut v, seed);
    TimeSeries::new(v).expect("permutation keeps length and finiteness")
}
