use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use toplag::series::{align, log_returns, read_csv_path};
use toplag::{RawSeries, TimeSeries};

use crate::args::{InputArgs, Transform};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
    pub rows: usize,
}

/// Aligned, transformed pair plus what the manifest needs to reproduce it.
pub struct LoadedPair {
    pub x: TimeSeries,
    pub y: TimeSeries,
    pub inputs: Vec<InputRecord>,
    pub span: Span,
    pub transforms: Vec<String>,
}

/// First and last shared label and the number of aligned rows.
#[derive(Debug, Clone, Serialize)]
pub struct Span {
    pub first: Option<String>,
    pub last: Option<String>,
    pub rows: usize,
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::input(path, e.into()))?;
    Ok(hex(&Sha256::digest(&bytes)))
}

fn read(path: &Path, column: Option<&str>) -> CliResult<(RawSeries, InputRecord)> {
    let sha256 = sha256_file(path)?;
    let raw = read_csv_path(path, column).map_err(|e| CliError::input(path, e))?;
    let record = InputRecord {
        path: path.display().to_string(),
        sha256,
        rows: raw.len(),
    };
    Ok((raw, record))
}

fn transform(raw: RawSeries, how: Transform, path: &Path) -> CliResult<TimeSeries> {
    let out = match how {
        Transform::Returns => log_returns(&raw).and_then(|r| r.normalize_rms()),
        Transform::Standardize => raw.into_series().standardize(),
        Transform::None => Ok(raw.into_series()),
    };
    out.map_err(|e| CliError::input(path, e))
}

pub fn load_pair(args: &InputArgs) -> CliResult<LoadedPair> {
    let column = args.column.as_deref();
    let (rx, ix) = read(&args.x, column)?;
    let (ry, iy) = read(&args.y, column)?;
    let (rx, ry) = align(&rx, &ry).map_err(|e| CliError::input(&args.y, e))?;
    let span = Span {
        first: rx.labels().and_then(|l| l.first().cloned()),
        last: rx.labels().and_then(|l| l.last().cloned()),
        rows: rx.len(),
    };
    let x = transform(rx, args.transform, &args.x)?;
    let y = transform(ry, args.transform, &args.y)?;
    let mut transforms = vec!["align".to_string()];
    transforms.extend(x.meta().transforms.iter().cloned());
    Ok(LoadedPair {
        x,
        y,
        inputs: vec![ix, iy],
        span,
        transforms,
    })
}
