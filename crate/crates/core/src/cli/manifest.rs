//! Run provenance written next to every result file.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub config: Value,
    /// Input path -> hex SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    pub tool_version: &'static str,
    pub started_unix_ms: u128,
    pub elapsed_ms: u128,
    /// Result files written by the run, relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: Vec<String>, seed: u64) -> Self {
        RunManifest {
            command,
            config: Value::Null,
            inputs: BTreeMap::new(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            started_unix_ms: SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or(Duration::ZERO).as_millis(),
            elapsed_ms: 0,
            outputs: Vec::new(),
        }
    }

    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.insert(path.display().to_string(), sha256_hex(bytes));
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
