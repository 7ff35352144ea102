use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::TimeSeries;
use crate::thermal::ThermalPath;

use super::map::SignalMap;

/// Fewest usable points a regression accepts.
pub const MIN_POINTS: usize = 10;

/// Reported `|t|` when the residuals vanish.
pub const T_STAT_CAP: f64 = 1e12;

/// Integer lag per index of the second series: `Y(t2)` pairs with
/// `X(t2 - lag)`. Indices whose partner falls outside `X` are unusable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeadLagSeries {
    pub lags: Vec<i64>,
    pub usable: Vec<bool>,
}

impl LeadLagSeries {
    pub fn new(lags: Vec<i64>) -> Self {
        let n = lags.len() as i64;
        let usable = lags
            .iter()
            .enumerate()
            .map(|(t2, &l)| (0..n).contains(&(t2 as i64 - l)))
            .collect();
        Self { lags, usable }
    }

    pub fn constant(n: usize, lag: i64) -> Self {
        Self::new(vec![lag; n])
    }

    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lags.is_empty()
    }

    pub fn get(&self, t2: usize) -> Option<i64> {
        self.usable.get(t2).copied().filter(|&u| u).map(|_| self.lags[t2])
    }
}

fn round_half_away(v: f64) -> i64 {
    // f64::round rounds half away from zero.
    v.round() as i64
}

/// Lag per index of the second series read off a path over the full
/// lattice.
///
/// Level `t` with `<x(t)>` sits at `t2 = (t + <x>) / 2`; levels landing on
/// the same `t2` are averaged and the mean is rounded half away from zero.
pub fn path_to_lags<F: Scalar>(path: &ThermalPath<F>, n: usize) -> LeadLagSeries {
    let mut sum = vec![0.0; n];
    let mut count = vec![0u32; n];
    for (t, x) in path.profile().into_iter().enumerate() {
        let x = x.f64();
        let t2 = round_half_away((t as f64 + x) / 2.0);
        if (0..n as i64).contains(&t2) {
            sum[t2 as usize] += x;
            count[t2 as usize] += 1;
        }
    }
    // The path moves by at most one lattice step per level, so every index
    // is hit; fill defensively from the left neighbour anyway.
    let mut lags = Vec::with_capacity(n);
    let mut last = 0;
    for (s, c) in sum.into_iter().zip(count) {
        if c > 0 {
            last = round_half_away(s / c as f64);
        }
        lags.push(last);
    }
    LeadLagSeries::new(lags)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfConsistencyResult {
    pub a_hat: f64,
    pub c_hat: f64,
    pub t_stat: f64,
    pub significant: bool,
    /// Residual amplitude relative to the spread of `X` in the window.
    pub f_hat: f64,
    /// `(start, length)` over indices of the second series.
    pub window: (usize, usize),
    pub points: usize,
    pub rho_lookup: Option<f64>,
    /// Set when `f_hat` lies above the map's largest `f`.
    pub f_clamped: bool,
}

/// [`regression_ttest_with`] at the two-sided 5% level.
pub fn regression_ttest<F: Scalar>(
    x: &TimeSeries<F>,
    y: &TimeSeries<F>,
    lags: &LeadLagSeries,
    window: (usize, usize),
) -> Result<SelfConsistencyResult> {
    regression_ttest_with(x, y, lags, window, 0.05)
}

/// OLS of `Y(t)` on `X(t - lag(t))` for the usable `t` in the window, with a
/// two-sided t-test on the slope at level `alpha`.
pub fn regression_ttest_with<F: Scalar>(
    x: &TimeSeries<F>,
    y: &TimeSeries<F>,
    lags: &LeadLagSeries,
    window: (usize, usize),
    alpha: f64,
) -> Result<SelfConsistencyResult> {
    if x.len() != y.len() || lags.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len().max(lags.len()),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let (start, len) = window;
    if start + len > y.len() {
        return Err(Error::InvalidParameter(format!(
            "window [{start}, {}) exceeds series length {}",
            start + len,
            y.len()
        )));
    }
    let (xv, yv) = (x.values(), y.values());
    let mut reg = Vec::with_capacity(len);
    let mut own = Vec::with_capacity(len);
    for t2 in start..start + len {
        if let Some(lag) = lags.get(t2) {
            reg.push((xv[(t2 as i64 - lag) as usize].f64(), yv[t2].f64()));
            own.push(xv[t2].f64());
        }
    }
    let m = reg.len();
    if m < MIN_POINTS {
        return Err(Error::InsufficientOverlap {
            usable: m,
            required: MIN_POINTS,
        });
    }
    let mf = m as f64;
    let mx = reg.iter().map(|p| p.0).sum::<f64>() / mf;
    let my = reg.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = reg.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = reg.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateSeries("shifted regressor variance"));
    }
    let a_hat = sxy / sxx;
    let c_hat = my - a_hat * mx;
    let ssr: f64 = reg.iter().map(|p| (p.1 - c_hat - a_hat * p.0).powi(2)).sum();
    let df = mf - 2.0;
    let se = (ssr / df / sxx).sqrt();
    let t_stat = if se > 0.0 {
        (a_hat / se).clamp(-T_STAT_CAP, T_STAT_CAP)
    } else if a_hat == 0.0 {
        0.0
    } else {
        T_STAT_CAP.copysign(a_hat)
    };
    let crit = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?
        .inverse_cdf(1.0 - alpha / 2.0);

    let own_mean = own.iter().sum::<f64>() / mf;
    let sd_x = (own.iter().map(|v| (v - own_mean).powi(2)).sum::<f64>() / (mf - 1.0)).sqrt();
    let resid = (reg.iter().map(|p| (p.1 - a_hat * p.0).powi(2)).sum::<f64>() / (mf - 1.0)).sqrt();
    let f_hat = if sd_x > 0.0 { resid / sd_x } else { f64::INFINITY };
    Ok(SelfConsistencyResult {
        a_hat,
        c_hat,
        t_stat,
        significant: t_stat.abs() > crit,
        f_hat,
        window,
        points: m,
        rho_lookup: None,
        f_clamped: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowScan {
    /// Lags from the path.
    pub synchronized: Vec<SelfConsistencyResult>,
    /// Lags fixed at zero.
    pub plain: Vec<SelfConsistencyResult>,
}

impl WindowScan {
    pub fn significant_counts(&self) -> (usize, usize) {
        let count = |v: &[SelfConsistencyResult]| v.iter().filter(|r| r.significant).count();
        (count(&self.synchronized), count(&self.plain))
    }
}

/// Regression test in every window `[s, s + window_len)`, `s = 0, step, ..`,
/// once synchronized by the path's lags and once unshifted, each annotated
/// with `rho` from `map` when given. Windows with fewer than [`MIN_POINTS`]
/// usable points are left out.
pub fn moving_window_scan<F: Scalar>(
    x: &TimeSeries<F>,
    y: &TimeSeries<F>,
    path: &ThermalPath<F>,
    window_len: usize,
    step: usize,
    map: Option<&SignalMap>,
) -> Result<WindowScan> {
    moving_window_scan_with(x, y, path, window_len, step, map, 0.05)
}

/// [`moving_window_scan`] with the test level `alpha`.
pub fn moving_window_scan_with<F: Scalar>(
    x: &TimeSeries<F>,
    y: &TimeSeries<F>,
    path: &ThermalPath<F>,
    window_len: usize,
    step: usize,
    map: Option<&SignalMap>,
    alpha: f64,
) -> Result<WindowScan> {
    let n = y.len();
    if window_len == 0 || window_len > n || step == 0 {
        return Err(Error::InvalidParameter(format!(
            "need 0 < window_len <= {n} and step > 0, got window_len={window_len}, step={step}"
        )));
    }
    let synced = path_to_lags(path, n);
    let zero = LeadLagSeries::constant(n, 0);
    let run = |lags: &LeadLagSeries| -> Result<Vec<SelfConsistencyResult>> {
        (0..=n - window_len)
            .step_by(step)
            .filter_map(|s| {
                let mut r = match regression_ttest_with(x, y, lags, (s, window_len), alpha) {
                    Err(Error::InsufficientOverlap { .. }) => return None,
                    other => other,
                };
                if let (Ok(r), Some(map)) = (&mut r, map) {
                    let (rho, clamped) = map.lookup(r.a_hat, r.f_hat);
                    r.rho_lookup = Some(rho);
                    r.f_clamped = clamped;
                }
                Some(r)
            })
            .collect()
    };
    Ok(WindowScan {
        synchronized: run(&synced)?,
        plain: run(&zero)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::RotatedCoord;
    use crate::thermal::Method;

    fn path(n: usize, start: RotatedCoord, end: RotatedCoord, xs: Vec<f64>) -> ThermalPath<f64> {
        ThermalPath {
            temperature: 1.0,
            start,
            end,
            xs,
            free_energy: 0.0,
            method: Method::Tops,
            distance_kind: None,
            n,
            levels: end.t - start.t + 1,
        }
    }

    #[test]
    fn zero_path_gives_zero_lags() {
        let n = 20;
        let p = path(n, RotatedCoord::new(0, 0), RotatedCoord::new(2 * n - 2, 0), vec![0.0; 2 * n - 1]);
        let lags = path_to_lags(&p, n);
        assert_eq!(lags, LeadLagSeries::constant(n, 0));
    }

    #[test]
    fn constant_path_gives_constant_lags() {
        let (n, k) = (30, 4);
        let start = RotatedCoord::new(k as usize, k);
        let end = RotatedCoord::new(2 * n - 2 - k as usize, k);
        let p = path(n, start, end, vec![k as f64; end.t - start.t + 1]);
        let lags = path_to_lags(&p, n);
        for t2 in k as usize..n - 1 {
            assert_eq!(lags.lags[t2], k as i64, "t2 = {t2}");
        }
        // Before the start the path runs along the axis into the corner.
        assert_eq!(lags.lags[k as usize - 1], k as i64 - 1);
    }

    #[test]
    fn negative_half_lags_round_away_from_zero() {
        assert_eq!(round_half_away(-2.5), -3);
        assert_eq!(round_half_away(2.5), 3);
        assert_eq!(round_half_away(-0.4), 0);
    }

    #[test]
    fn unusable_indices_follow_the_shift() {
        let l = LeadLagSeries::new(vec![2, 2, 2, -1, -1]);
        assert_eq!(l.usable, [false, false, true, true, false]);
        assert_eq!(l.get(0), None);
        assert_eq!(l.get(3), Some(-1));
    }

    fn ar(n: usize, seed: u64) -> TimeSeries<f64> {
        crate::synth::gen_ar1(&crate::synth::Ar1Params {
            b: 0.7,
            sigma_xi: 1.0,
            length: n,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn perfect_fit_caps_the_t_statistic() {
        let x = ar(100, 1);
        let r = regression_ttest(&x, &x, &LeadLagSeries::constant(100, 0), (0, 100)).unwrap();
        assert!((r.a_hat - 1.0).abs() < 1e-12);
        assert!(r.f_hat.abs() < 1e-12);
        assert!(r.t_stat >= 1e6 && r.t_stat <= T_STAT_CAP);
        assert!(r.significant);
    }

    #[test]
    fn noiseless_synchronized_slope_is_exact() {
        let x = ar(200, 2);
        let lag = 5;
        let y: Vec<f64> = (0..200)
            .map(|t| if t >= lag { 0.35 * x.values()[t - lag] } else { 0.0 })
            .collect();
        let y = TimeSeries::new(y).unwrap();
        let r = regression_ttest(&x, &y, &LeadLagSeries::constant(200, lag as i64), (0, 200)).unwrap();
        assert!((r.a_hat - 0.35).abs() < 1e-9);
        assert_eq!(r.points, 195);
    }

    #[test]
    fn too_few_points_is_an_error() {
        let x = ar(30, 3);
        let err = regression_ttest(&x, &x, &LeadLagSeries::constant(30, 25), (0, 30)).unwrap_err();
        assert!(matches!(err, Error::InsufficientOverlap { usable: 5, required: 10 }));
    }

    #[test]
    fn window_counts() {
        let x = ar(120, 4);
        let p = path(120, RotatedCoord::new(0, 0), RotatedCoord::new(238, 0), vec![0.0; 239]);
        let scan = moving_window_scan(&x, &x, &p, 100, 1, None).unwrap();
        assert_eq!((scan.synchronized.len(), scan.plain.len()), (21, 21));
        let one = moving_window_scan(&x, &x, &p, 120, 1, None).unwrap();
        assert_eq!(one.synchronized.len(), 1);
        assert_eq!(one.significant_counts(), (1, 1));
    }
}
