//! Library side of the `gabor-spectra` command-line tool: configuration,
//! command execution, manifests, atomic output directories and SVG plots.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod output;
pub mod plot;
pub mod verify;

use std::path::Path;
use std::time::Instant;

use anyhow::Result;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// Verdict of a run. Commands without a pass/fail check report `Success`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Success,
    Pass,
    Fail,
}

impl Status {
    pub fn from_check(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success | Status::Pass => 0,
            Status::Fail => 2,
        }
    }
}

/// One output file, held in memory until the whole run has succeeded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: &str, bytes: impl Into<Vec<u8>>) -> Self {
        Self { name: name.to_owned(), bytes: bytes.into() }
    }

    pub fn json(name: &str, value: &impl Serialize) -> Result<Self> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        Ok(Self::new(name, text))
    }
}

/// Everything a command produces: its verdict, its artifacts, and the
/// parameter block after defaults were filled in.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    pub artifacts: Vec<Artifact>,
    pub effective_params: serde_json::Value,
}

/// Runs the configured command and writes its artifacts plus `manifest.json`
/// into `out_dir`. Nothing is written unless the command succeeds.
pub fn execute(cfg: &RunConfig, out_dir: &Path, threads: usize) -> Result<Status> {
    let start = Instant::now();
    let outcome = commands::run(cfg)?;
    let manifest = manifest::Manifest::build(cfg, &outcome, threads, start.elapsed().as_secs_f64())?;
    let mut artifacts = outcome.artifacts;
    artifacts.push(Artifact::json(manifest::MANIFEST_NAME, &manifest)?);
    output::write_atomically(out_dir, &artifacts)?;
    Ok(outcome.status)
}
