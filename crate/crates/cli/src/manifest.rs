//! Run manifests: what was run, with which inputs, and what came out.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::output::{sha256_hex, FileRecord};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// The fully defaulted config that was run.
    pub config: ExperimentConfig,
    /// SHA-256 over `blob <len>\0<canonical config JSON>`.
    pub input_hash: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub files: Vec<FileRecord>,
}

/// Canonical JSON for a config; key order follows the struct definitions.
pub fn canonical_config(cfg: &ExperimentConfig) -> String {
    serde_json::to_string(cfg).expect("configs serialize")
}

pub fn input_hash(cfg: &ExperimentConfig) -> String {
    let body = canonical_config(cfg);
    let mut blob = format!("blob {}\0", body.len()).into_bytes();
    blob.extend_from_slice(body.as_bytes());
    sha256_hex(&blob)
}

impl RunManifest {
    pub fn new(cfg: &ExperimentConfig, threads: usize, wall_time_seconds: f64, files: Vec<FileRecord>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: cfg.clone(),
            input_hash: input_hash(cfg),
            seed: cfg.noise.as_ref().map_or(0, |n| n.seed),
            threads,
            wall_time_seconds,
            files,
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Files under `dir` whose size or checksum differs from the record.
    pub fn mismatches(&self, dir: &Path) -> Vec<String> {
        self.files
            .iter()
            .filter_map(|f| match std::fs::read(dir.join(&f.path)) {
                Ok(bytes) if bytes.len() as u64 == f.bytes && sha256_hex(&bytes) == f.sha256 => None,
                Ok(_) => Some(format!("{}: checksum differs", f.path)),
                Err(e) => Some(format!("{}: {e}", f.path)),
            })
            .collect()
    }
}
