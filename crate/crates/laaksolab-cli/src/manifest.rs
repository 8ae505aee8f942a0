//! Run manifests: every command records its parameters, input digests,
//! output files and wall-clock duration next to its outputs.
//!
//! Outputs themselves are deterministic; timestamps live only here.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Result;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub struct Manifest {
    command: String,
    parameters: Value,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    started: Instant,
}

impl Manifest {
    pub fn new(command: &str, parameters: Value) -> Manifest {
        Manifest {
            command: command.to_string(),
            parameters,
            inputs: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn record_input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Writes the manifest at `path`; the manifest lists itself among the
    /// outputs so the file set is closed.
    pub fn write(mut self, path: &Path) -> Result<()> {
        self.outputs.push(path.to_path_buf());
        let mut digests = Map::new();
        for input in &self.inputs {
            let bytes = std::fs::read(input)?;
            let digest = Sha256::digest(&bytes);
            digests.insert(input.display().to_string(), json!(hex::encode(digest)));
        }
        let outputs: Vec<String> = self
            .outputs
            .iter()
            .map(|p| p.display().to_string())
            .collect();
        let value = json!({
            "command": self.command,
            "parameters": self.parameters,
            "input_digests": digests,
            "outputs": outputs,
            "duration_ms": self.started.elapsed().as_millis() as u64,
            "version": env!("CARGO_PKG_VERSION"),
        });
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}
