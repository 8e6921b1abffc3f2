//! Report envelopes and output files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{HypothesisCheck, LoadedConfig};
use crate::error::Result;

/// Fields every report starts with.
#[derive(Clone, Debug, Serialize)]
pub struct ReportHeader {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub hypotheses: Vec<HypothesisCheck>,
}

impl ReportHeader {
    pub fn new(command: &'static str, loaded: &LoadedConfig) -> Self {
        Self {
            tool: "einlab",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config_hash: loaded.hash.clone(),
            seed: loaded.config.seed,
            hypotheses: loaded.hypotheses.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report<T: Serialize> {
    #[serde(flatten)]
    pub header: ReportHeader,
    #[serde(flatten)]
    pub body: T,
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
