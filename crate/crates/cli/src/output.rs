//! Output files and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub library_version: &'static str,
    pub command: String,
    pub config: RunConfig,
    /// The model after defaults and validation, when the command has one.
    pub model: Value,
    pub workers: usize,
    pub derived_constants: Value,
    pub certificates: Value,
    pub solve_counts: Value,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputRecord>,
}

/// Files produced by one command, held in memory until the command has
/// succeeded.
#[derive(Debug, Default)]
pub struct Outputs {
    pub(crate) files: Vec<(String, Vec<u8>)>,
    pub derived_constants: Value,
    pub certificates: Value,
    pub solve_counts: Value,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn add_json<T: Serialize>(&mut self, name: impl Into<String>, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        self.add(name, bytes);
        Ok(())
    }

    /// Without an output directory the files go to stdout in order.
    pub fn print(&self) -> Result<(), CliError> {
        let mut out = std::io::stdout().lock();
        for (_, bytes) in &self.files {
            out.write_all(bytes).map_err(|e| CliError::Io(e.to_string()))?;
        }
        Ok(())
    }

    /// Writes every file and then the manifest; on any failure the files
    /// written so far are removed again.
    pub fn write(self, dir: &Path, manifest: impl FnOnce(Vec<OutputRecord>) -> RunManifest) -> Result<(), CliError> {
        let created = !dir.exists();
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let mut written: Vec<PathBuf> = Vec::new();
        let result = (|| {
            let mut records = Vec::new();
            for (name, bytes) in &self.files {
                let path = dir.join(name);
                written.push(path.clone());
                fs::write(&path, bytes).map_err(|e| io(&path, e))?;
                records.push(OutputRecord { file: name.clone(), sha256: hex::encode(Sha256::digest(bytes)), bytes: bytes.len() });
            }
            let mut m = serde_json::to_vec_pretty(&manifest(records)).map_err(|e| CliError::Io(e.to_string()))?;
            m.push(b'\n');
            let path = dir.join(MANIFEST);
            written.push(path.clone());
            fs::write(&path, m).map_err(|e| io(&path, e))
        })();
        if result.is_err() {
            remove_partial(dir, &written, created);
        }
        result
    }
}

fn io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn remove_partial(dir: &Path, written: &[PathBuf], created: bool) {
    for p in written {
        let _ = fs::remove_file(p);
    }
    if created {
        let _ = fs::remove_dir(dir);
    }
}
