//! Experiment driver for the `coinwalk` command: JSON configs in, CSV, JSON
//! summaries, SVG charts and a checksummed manifest out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod figures;
pub mod manifest;
pub mod output;
pub mod svg;
pub mod verify;
pub mod walk;

use std::path::Path;
use std::time::Instant;

use crate::config::ExperimentConfig;
use crate::experiments::{run, RunOutput};
use crate::manifest::{RunManifest, MANIFEST_FILE};

/// Runs `cfg` and writes its files plus `manifest.json` into `dir`.
pub fn run_to_dir(cfg: &ExperimentConfig, dir: &Path) -> anyhow::Result<(RunOutput, RunManifest)> {
    let start = Instant::now();
    let output = run(cfg)?;
    std::fs::create_dir_all(dir)?;
    let files = output.artifacts.write_to(dir)?;
    let manifest = RunManifest::new(cfg, rayon::current_num_threads(), start.elapsed().as_secs_f64(), files);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok((output, manifest))
}
