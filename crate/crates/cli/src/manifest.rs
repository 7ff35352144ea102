use serde::Serialize;

use crate::error::CliResult;
use crate::inputs::{InputRecord, Span};
use crate::output::{OutDir, OutputRecord};

pub const MANIFEST: &str = "manifest.json";

/// Everything needed to rerun a command and check its outputs.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub argv: Vec<String>,
    /// Resolved options, defaults included.
    pub config: serde_json::Value,
    pub inputs: Vec<InputRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<Span>,
    pub transforms: Vec<String>,
    pub outputs: Vec<OutputRecord>,
    pub elapsed_seconds: f64,
}

impl Manifest {
    pub fn new(command: &'static str, config: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            argv: std::env::args().collect(),
            config,
            inputs: Vec::new(),
            span: None,
            transforms: Vec::new(),
            outputs: Vec::new(),
            elapsed_seconds: 0.0,
        }
    }

    /// Records the outputs written so far and writes the manifest last.
    pub fn finish(mut self, out: &mut OutDir, elapsed: std::time::Duration) -> CliResult<()> {
        self.outputs = out.records().to_vec();
        self.elapsed_seconds = elapsed.as_secs_f64();
        out.json(MANIFEST, &self)
    }
}
