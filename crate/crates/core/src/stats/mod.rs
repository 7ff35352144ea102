//! Significance procedures for thermal optimal paths.
//!
//! - [`bootstrap_band`]: per-level quantile bands of paths over reshuffled
//!   pairs.
//! - [`rho_metric`]: overlap of the free-energy distribution of genuine
//!   lead-lag pairs with that of their reshuffles.
//! - [`regression_ttest`] and [`moving_window_scan`]: regression of one
//!   series on the other synchronized by the recovered lag.
//!
//! [`signal_map`] tabulates `rho` over the coupling/noise plane, and
//! [`temperature_profile`] summarizes a set of maps per temperature.

mod band;
mod map;
mod regression;
mod rho;

pub use band::{bootstrap_band, BootstrapBand, MIN_RESHUFFLES};
pub use map::{
    free_energy_ensemble, rho_by_regeneration, signal_map, temperature_profile, EnsembleSample, MapConfig,
    MapGrid, ProfileRow, SignalMap,
};
pub use regression::{
    moving_window_scan, moving_window_scan_with, path_to_lags, regression_ttest, regression_ttest_with, LeadLagSeries,
    SelfConsistencyResult, WindowScan, MIN_POINTS, T_STAT_CAP,
};
pub use rho::{rho_metric, Bins, HistogramSpec, RhoResult};

use serde::{Deserialize, Serialize};
use statrs::statistics::{Data, OrderStatistics};

use crate::error::Result;
use crate::lattice::{DistanceKind, DistanceMatrix};
use crate::pathsel::{min_free_energies, select_best_in, BoundarySpec, PathSelection};
use crate::series::TimeSeries;
use crate::thermal::{Landscape, Method};

/// How a pair of series is turned into a selected thermal path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub temperature: f64,
    pub method: Method,
    pub distance: DistanceKind,
    pub boundary: BoundarySpec,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            temperature: 2.0,
            method: Method::Tops,
            distance: DistanceKind::Minus,
            boundary: BoundarySpec::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn landscape(&self, x: &TimeSeries<f64>, y: &TimeSeries<f64>) -> Result<Landscape<f64>> {
        let m = DistanceMatrix::build(x, y, self.distance)?;
        Landscape::new(&m, self.temperature)
    }

    pub fn select(&self, x: &TimeSeries<f64>, y: &TimeSeries<f64>) -> Result<PathSelection<f64>> {
        select_best_in(&self.landscape(x, y)?, self.boundary, self.method)
    }

    /// Minimum free energies `(top, tops)`; `method` is ignored.
    pub fn free_energies(&self, x: &TimeSeries<f64>, y: &TimeSeries<f64>) -> Result<(f64, f64)> {
        min_free_energies(&self.landscape(x, y)?, self.boundary)
    }
}

/// Empirical quantile (statrs' default estimator).
pub fn quantile(sample: &[f64], tau: f64) -> f64 {
    Data::new(sample.to_vec()).quantile(tau)
}

pub fn median(sample: &[f64]) -> f64 {
    quantile(sample, 0.5)
}
