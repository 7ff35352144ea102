use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series too short: need at least {required} values, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("non-positive value {value} at index {index}; log returns need S(t) > 0")]
    NonPositiveValue { index: usize, value: f64 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("degenerate series: {0} is zero")]
    DegenerateSeries(&'static str),

    #[error("labels must be strictly ordered; label {label:?} at index {index} breaks the order")]
    UnorderedLabels { index: usize, label: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("coordinate ({a}, {b}) out of range for lattice side {n}")]
    OutOfRange { a: i64, b: i64, n: usize },

    #[error("rotated coordinate (t={t}, x={x}) violates parity: t + x must be even")]
    ParityViolation { t: i64, x: i64 },

    #[error("temperature must be finite and > 0, got {0}")]
    InvalidTemperature(f64),

    #[error("end node (t={end_t}, x={end_x}) is not reachable from origin (t={start_t}, x={start_x})")]
    UnreachableEnd {
        start_t: usize,
        start_x: isize,
        end_t: usize,
        end_x: isize,
    },

    #[error("field origin does not match the requested boundary node")]
    OriginMismatch,

    #[error("boundary offset {offset} exceeds lattice limit {limit}")]
    OffsetTooLarge { offset: usize, limit: usize },

    #[error("AR coefficient must satisfy |b| < 1, got {0}")]
    InvalidCoefficient(f64),

    #[error("lag {lag} at index {index} reaches outside the generated driver")]
    LagOutOfRange { index: usize, lag: i64 },

    #[error("sample `{0}` is empty")]
    EmptySample(&'static str),

    #[error("only {usable} usable points after lag shifting; need at least {required}")]
    InsufficientOverlap { usable: usize, required: usize },

    #[error("signal maps do not share the same (a, f) grid")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing value at record {record}")]
    MissingValue { record: usize },

    #[error("column `{0}` not found in CSV header")]
    MissingColumn(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
