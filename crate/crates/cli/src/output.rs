use std::collections::BTreeMap;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

/// Writes through a temporary file in the target directory, then renames it
/// over `path`.
pub fn write_atomic<F>(path: &Path, fill: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let err = |e| CliError::io(path, e);
    let tmp = NamedTempFile::new_in(dir).map_err(err)?;
    let mut w = BufWriter::new(tmp);
    fill(&mut w).map_err(err)?;
    let tmp = w.into_inner().map_err(|e| err(e.into_error()))?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

pub fn write_string(path: &Path, text: &str) -> CliResult<()> {
    write_atomic(path, |w| w.write_all(text.as_bytes()))
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Provenance record written next to the primary output of each run.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub palette_version: Option<String>,
    pub subcommand: &'static str,
    pub flags: serde_json::Value,
    /// SHA-256 of each input file.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new<F: Serialize>(subcommand: &'static str, flags: &F, palette_version: Option<String>) -> Self {
        RunManifest {
            tool: "chromaword",
            version: env!("CARGO_PKG_VERSION"),
            palette_version,
            subcommand,
            flags: serde_json::to_value(flags).expect("flags serialize"),
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn input(&mut self, path: &Path) -> CliResult<()> {
        let digest = sha256_file(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// `<primary>.manifest.json`.
    pub fn path_for(primary: &Path) -> PathBuf {
        let mut name = primary.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        primary.with_file_name(name)
    }

    pub fn write(&self, primary: &Path) -> CliResult<PathBuf> {
        let path = Self::path_for(primary);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        write_string(&path, &text)?;
        Ok(path)
    }
}
