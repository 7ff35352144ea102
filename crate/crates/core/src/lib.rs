//! Lead-lag inference between two time series with the thermal optimal path
//! (TOP) and its time-reversal symmetric variant (TOPS).
//!
//! The pipeline: [`series`] prepares the inputs, [`lattice`] builds the
//! distance landscape, [`thermal`] computes partition fields and thermal
//! paths, [`pathsel`] scans pinned boundary nodes for the minimum free
//! energy path, and [`stats`] holds the significance procedures. [`synth`]
//! generates the piecewise-lag benchmark series.
//!
//! The numeric core is generic over [`Scalar`] (`f32` / `f64`); the aliases
//! below fix it to `f64`, which is what the statistics and the CLI use.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(a < b)` also rejects NaN.

pub mod error;
pub mod lattice;
pub mod pathsel;
pub mod scalar;
pub mod series;
pub mod stats;
pub mod synth;
pub mod thermal;

pub use error::{Error, Result};
pub use lattice::{DistanceKind, RotatedCoord};
pub use scalar::Scalar;
pub use thermal::{Direction, Method};

pub type RawSeries = series::RawSeries<f64>;
pub type TimeSeries = series::TimeSeries<f64>;
pub type DistanceMatrix = lattice::DistanceMatrix<f64>;
pub type Landscape = thermal::Landscape<f64>;
pub type PartitionField<'a> = thermal::PartitionField<'a, f64>;
pub type ThermalPath = thermal::ThermalPath<f64>;
pub type PathSelection = pathsel::PathSelection<f64>;

pub type TimeSeries32 = series::TimeSeries<f32>;
pub type DistanceMatrix32 = lattice::DistanceMatrix<f32>;
pub type Landscape32 = thermal::Landscape<f32>;
pub type ThermalPath32 = thermal::ThermalPath<f32>;
pub type PathSelection32 = pathsel::PathSelection<f32>;
