use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliResult;
use crate::inputs::hex;

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Writes files into one directory and records a digest of each.
pub struct OutDir {
    root: PathBuf,
    written: Vec<OutputRecord>,
}

impl OutDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn bytes(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.path(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(OutputRecord {
            file: name.to_string(),
            sha256: hex(&Sha256::digest(bytes)),
            bytes: bytes.len(),
        });
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut buf = serde_json::to_vec_pretty(value).context("serializing json")?;
        buf.push(b'\n');
        self.bytes(name, &buf)
    }

    /// `rows` are already formatted fields, one record per row.
    pub fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> CliResult<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).context("writing csv")?;
        for row in rows {
            w.write_record(row).context("writing csv")?;
        }
        let buf = w.into_inner().context("flushing csv")?;
        self.bytes(name, &buf)
    }

    pub fn records(&self) -> &[OutputRecord] {
        &self.written
    }
}
