use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use toplag::pathsel::{BoundaryScheme, BoundarySpec};
use toplag::stats::AnalysisConfig;
use toplag::synth::PaperModel;
use toplag::{DistanceKind, Method};

#[derive(Debug, Parser)]
#[command(name = "toplag", version, about = "Lead-lag analysis of two time series with thermal optimal paths")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 2.0)]
    pub temperature: f64,

    /// `top` (forward weights) or `tops` (time-reversal symmetric weights).
    #[arg(long, global = true, default_value = "tops")]
    pub method: Method,

    /// Local distance: `minus`, `plus` or `min`.
    #[arg(long, global = true, default_value = "minus")]
    pub distance: DistanceKind,

    /// Largest offset of the pinned start and end nodes.
    #[arg(long, global = true, default_value_t = 30)]
    pub max_offset: usize,

    /// Pin starts and ends on the full corner grid instead of the two axes.
    #[arg(long, global = true)]
    pub boundary_grid: bool,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Format of tabular outputs. Manifests and sidecars are always JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl Global {
    pub fn boundary(&self) -> BoundarySpec {
        BoundarySpec {
            max_offset: self.max_offset,
            scheme: if self.boundary_grid {
                BoundaryScheme::CornerGrid
            } else {
                BoundaryScheme::Axes
            },
        }
    }

    pub fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            temperature: self.temperature,
            method: self.method,
            distance: self.distance,
            boundary: self.boundary(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select the best path between two series and run the self-consistency scan.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic piecewise-lag pair.
    Synth(SynthArgs),
    /// Tabulate the free-energy p-value over a grid of couplings and noise ratios.
    Map(MapArgs),
    /// Quantile band of best paths over reshuffled copies of a pair.
    Band(BandArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    /// Log returns scaled to unit root mean square.
    Returns,
    /// Zero mean and unit sample standard deviation.
    Standardize,
    /// Values as read.
    None,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// CSV with a header and `label,value` rows.
    pub x: PathBuf,
    /// Second series, same layout.
    pub y: PathBuf,

    /// Value column to read when the files have more than two.
    #[arg(long)]
    pub column: Option<String>,

    /// Applied to each series after aligning the two on shared labels.
    #[arg(long, value_enum, default_value_t = Transform::Returns)]
    pub transform: Transform,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Moving-window lengths of the self-consistency scan.
    #[arg(long, value_delimiter = ',', default_values_t = [12, 24, 36, 48])]
    pub windows: Vec<usize>,

    /// Step between successive windows.
    #[arg(long, default_value_t = 1)]
    pub step: usize,

    /// Reshuffled replicates for a quantile band; 0 skips the band.
    #[arg(long, default_value_t = 0)]
    pub bootstrap: usize,

    /// Signal map (from `toplag map`) used to annotate windows with rho.
    #[arg(long)]
    pub map: Option<PathBuf>,

    /// Two-sided level of the slope t-test.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    /// Five-segment benchmark model: A, B or C.
    #[arg(long, default_value = "A")]
    pub paper_model: PaperModel,

    /// Draw lags and coupling at random instead of using a benchmark model.
    #[arg(long)]
    pub random: bool,

    /// Number of segments of a random model.
    #[arg(long, default_value_t = 5)]
    pub segments: usize,

    /// Segment length of a random model.
    #[arg(long, default_value_t = 100)]
    pub segment_len: usize,

    /// Largest lag magnitude of a random model.
    #[arg(long, default_value_t = 30)]
    pub max_lag: i64,

    /// Coupling override.
    #[arg(long)]
    pub a: Option<f64>,

    /// Noise ratio override.
    #[arg(long)]
    pub f: Option<f64>,

    /// AR coefficient override.
    #[arg(long)]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MapArgs {
    /// Coupling values; defaults to 0.01, 0.06, .., 0.96, 1.
    #[arg(long, value_delimiter = ',')]
    pub a_values: Option<Vec<f64>>,

    /// Noise ratios; same default as the couplings.
    #[arg(long, value_delimiter = ',')]
    pub f_values: Option<Vec<f64>>,

    /// Generated pairs per cell.
    #[arg(long, default_value_t = 100)]
    pub ensemble: usize,

    /// One map per temperature; defaults to `--temperature`.
    #[arg(long, value_delimiter = ',')]
    pub temperatures: Option<Vec<f64>>,

    #[arg(long, default_value_t = 5)]
    pub segments: usize,

    #[arg(long, default_value_t = 100)]
    pub segment_len: usize,

    #[arg(long, default_value_t = 30)]
    pub max_lag: i64,

    /// AR coefficient of the driver.
    #[arg(long, default_value_t = 0.7)]
    pub b: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BandArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Reshuffled replicates.
    #[arg(long, default_value_t = 100)]
    pub n: usize,

    /// Keep every replicate path in the output.
    #[arg(long)]
    pub keep_paths: bool,
}
