use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use fracboussinesq::output::write_json;

use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct Versions {
    pub fracboussinesq: &'static str,
    pub snapshot_format: u32,
}

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

/// Everything needed to repeat a run: with `--threads 1` and the same
/// configuration bytes, every output reproduces byte for byte.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: &'static str,
    pub config_sha256: String,
    /// The effective seed list, after any `--seeds` override.
    pub seeds: Vec<u64>,
    pub threads: usize,
    pub versions: Versions,
    pub exit_code: i32,
    pub outputs: Vec<OutputFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    /// Hashes the listed files in `dir` and writes `manifest.json` there.
    pub fn write(mut self, dir: &Path, files: &[String]) -> Result<(), CliError> {
        for f in files {
            let path = dir.join(f);
            let bytes = std::fs::read(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            self.outputs.push(OutputFile {
                file: f.clone(),
                sha256: sha256_hex(&bytes),
            });
        }
        write_json(&dir.join("manifest.json"), &self)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
