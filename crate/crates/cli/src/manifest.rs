use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::failure::{CliResult, Failure};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub started_unix_s: f64,
    pub duration_s: f64,
}

/// Collects what a run read and wrote; written once the command finishes.
pub struct Recorder {
    command: String,
    started: Instant,
    started_unix_s: f64,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

impl Recorder {
    pub fn start(command: &str) -> Self {
        Self {
            command: command.to_string(),
            started: Instant::now(),
            started_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Writes the manifest to `path` and returns it.
    pub fn finish(self, config: &impl Serialize, seeds: Vec<u64>, path: &Path) -> CliResult<PathBuf> {
        let manifest = RunManifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            config: serde_json::to_value(config).map_err(Failure::runtime)?,
            seeds,
            inputs: self.inputs,
            outputs: self.outputs,
            started_unix_s: self.started_unix_s,
            duration_s: self.started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(Failure::runtime)?;
        std::fs::write(path, text + "\n")
            .map_err(|e| Failure::runtime(anyhow::anyhow!("cannot write manifest {}: {e}", path.display())))?;
        Ok(path.to_path_buf())
    }
}

/// `<output>.manifest.json`, next to the primary output.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}
