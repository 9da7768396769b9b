//! Run manifests: every command writes one next to its outputs so a run can be
//! reproduced exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

/// Full record of one CLI invocation. `argv` holds the resolved argument list
/// (every default materialized), so re-running the tool with exactly these
/// arguments reproduces the data files byte for byte. The wall-clock duration
/// is informational and not part of the reproducibility contract.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub argv: Vec<String>,
    pub schedule: String,
    pub master_seed: u64,
    pub parameters: serde_json::Value,
    pub duration_seconds: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, argv: Vec<String>, schedule: String, master_seed: u64) -> Self {
        Self {
            tool: "kramers-reset".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            argv,
            schedule,
            master_seed,
            parameters: serde_json::Value::Null,
            duration_seconds: 0.0,
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, json + "\n")
    }
}
