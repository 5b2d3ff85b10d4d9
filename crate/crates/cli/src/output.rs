//! Atomic file output and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().with_context(|| format!("{} is not a file path", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

/// What was run and what it produced. Contains no timestamps, so identical
/// inputs give an identical manifest.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub outputs: Vec<OutputFile>,
}

/// Collects outputs, writing each atomically and recording its digest.
pub struct Outputs {
    manifest: RunManifest,
}

impl Outputs {
    pub fn new(command: &[String], config: &[u8], seed: Option<u64>) -> Self {
        Outputs {
            manifest: RunManifest {
                command: command.join(" "),
                version: env!("CARGO_PKG_VERSION").to_string(),
                config_sha256: sha256_hex(config),
                seed,
                outputs: Vec::new(),
            },
        }
    }

    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        write_atomic(path, bytes)?;
        self.manifest.outputs.push(OutputFile { path: path.display().to_string(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    pub fn finish(self, path: &Path) -> Result<PathBuf> {
        let text = toml::to_string(&self.manifest).context("serializing manifest")?;
        write_atomic(path, text.as_bytes())?;
        Ok(path.to_path_buf())
    }
}
