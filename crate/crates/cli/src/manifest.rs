//! `manifest.json`: what was run, with which configuration, and what it
//! produced. Everything except the `runtime` block is a function of the
//! effective configuration.

use anyhow::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Command, RunConfig};
use crate::{Outcome, Status};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub gabor_spectra: String,
    pub gabor_core: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArtifactEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub threads: usize,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: Command,
    pub seed: u64,
    /// SHA-256 of the canonical effective configuration (defaults filled in,
    /// keys sorted, output directory omitted).
    pub config_sha256: String,
    pub effective_config: serde_json::Value,
    pub versions: Versions,
    pub status: Status,
    pub artifacts: Vec<ArtifactEntry>,
    pub runtime: Runtime,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// The configuration as actually executed, in canonical form.
pub fn effective_config(cfg: &RunConfig, params: &serde_json::Value) -> Result<serde_json::Value> {
    let mut effective = cfg.clone();
    effective.params = params.clone();
    effective.out_dir = None;
    // serde_json's default map type keeps keys sorted, which makes this canonical
    Ok(serde_json::to_value(&effective)?)
}

impl Manifest {
    pub fn build(cfg: &RunConfig, outcome: &Outcome, threads: usize, wall_seconds: f64) -> Result<Self> {
        let effective = effective_config(cfg, &outcome.effective_params)?;
        let canonical = serde_json::to_string(&effective)?;
        Ok(Self {
            command: cfg.command,
            seed: cfg.seed,
            config_sha256: sha256_hex(canonical.as_bytes()),
            effective_config: effective,
            versions: Versions {
                gabor_spectra: env!("CARGO_PKG_VERSION").to_owned(),
                gabor_core: gabor_core::VERSION.to_owned(),
            },
            status: outcome.status,
            artifacts: outcome
                .artifacts
                .iter()
                .map(|a| ArtifactEntry { name: a.name.clone(), bytes: a.bytes.len(), sha256: sha256_hex(&a.bytes) })
                .collect(),
            runtime: Runtime { threads, wall_seconds },
        })
    }
}
