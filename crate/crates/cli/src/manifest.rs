use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// Written as `manifest.json` next to the outputs of every run.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// SHA-256 of the resolved configuration; `null` for runs without one.
    pub config_digest: Option<String>,
    pub config: Option<&'a RunConfig>,
    pub outputs: Vec<String>,
    /// Largest error estimate per quantity.
    pub error_summary: BTreeMap<String, f64>,
    pub wall_clock_seconds: f64,
}

/// Collects output files for one run and writes them with a manifest.
pub struct Run<'a> {
    dir: PathBuf,
    command: &'static str,
    config: Option<&'a RunConfig>,
    outputs: Vec<String>,
    errors: BTreeMap<String, f64>,
    started: Instant,
}

impl<'a> Run<'a> {
    pub fn start(dir: &Path, command: &'static str, config: Option<&'a RunConfig>) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Run {
            dir: dir.to_path_buf(),
            command,
            config,
            outputs: Vec::new(),
            errors: BTreeMap::new(),
            started: Instant::now(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.outputs.push(name.to_owned());
        Ok(())
    }

    pub fn record_error(&mut self, quantity: &str, err: f64) {
        let e = self.errors.entry(quantity.to_owned()).or_insert(0.0);
        *e = e.max(err);
    }

    pub fn finish(self) -> Result<PathBuf, CliError> {
        let manifest = RunManifest {
            tool: "gapdeph",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            config_digest: self.config.map(RunConfig::digest),
            config: self.config,
            outputs: self.outputs,
            error_summary: self.errors,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        let text = gapdeph::export::to_json(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}
