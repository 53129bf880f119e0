//! Atomic output directories: artifacts are written into a temporary
//! directory next to the target and moved into place only when complete.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::manifest::MANIFEST_NAME;
use crate::Artifact;

/// An existing directory may be replaced only if it is empty or holds a
/// previous run (has a manifest); anything else is left alone.
fn check_replaceable(out_dir: &Path) -> Result<bool> {
    if !out_dir.exists() {
        return Ok(false);
    }
    if !out_dir.is_dir() {
        bail!("output path {} exists and is not a directory", out_dir.display());
    }
    let empty = fs::read_dir(out_dir)?.next().is_none();
    if !empty && !out_dir.join(MANIFEST_NAME).is_file() {
        bail!("output directory {} is not empty and holds no {MANIFEST_NAME}; refusing to overwrite", out_dir.display());
    }
    Ok(true)
}

pub fn write_atomically(out_dir: &Path, artifacts: &[Artifact]) -> Result<()> {
    let replace = check_replaceable(out_dir)?;
    let parent = match out_dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => Path::new(".").to_path_buf(),
    };
    fs::create_dir_all(&parent).with_context(|| format!("creating {}", parent.display()))?;
    let staging = tempfile::Builder::new()
        .prefix(".gabor-spectra-")
        .tempdir_in(&parent)
        .with_context(|| format!("creating a staging directory in {}", parent.display()))?;
    for a in artifacts {
        if a.name.contains(['/', '\\']) {
            bail!("artifact name {:?} must be a plain file name", a.name);
        }
        fs::write(staging.path().join(&a.name), &a.bytes).with_context(|| format!("writing {}", a.name))?;
    }
    if replace {
        fs::remove_dir_all(out_dir).with_context(|| format!("removing previous run in {}", out_dir.display()))?;
    }
    let staged = staging.keep();
    if let Err(e) = fs::rename(&staged, out_dir) {
        let _ = fs::remove_dir_all(&staged);
        return Err(e).with_context(|| format!("moving outputs into {}", out_dir.display()));
    }
    Ok(())
}
