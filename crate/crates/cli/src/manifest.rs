use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::output::{file_sha256, sha256_hex, OutputDir};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_ECHO_FILE: &str = "config.toml";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Provenance of one run: enough to repeat it from the listed inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub arguments: Vec<String>,
    /// SHA-256 of the config echo written next to the manifest.
    pub config_sha256: Option<String>,
    pub inputs: Vec<FileDigest>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub started_at: String,
    pub finished_at: String,
    /// Paths relative to the output directory.
    pub outputs: Vec<FileDigest>,
}

pub struct ManifestBuilder {
    subcommand: String,
    arguments: Vec<String>,
    config_sha256: Option<String>,
    inputs: Vec<FileDigest>,
    seed: Option<u64>,
    started_at: String,
}

impl ManifestBuilder {
    pub fn new(subcommand: &str) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            arguments: std::env::args().skip(1).collect(),
            config_sha256: None,
            inputs: Vec::new(),
            seed: None,
            started_at: now(),
        }
    }

    /// Writes the resolved config echo and records its digest.
    pub fn config_echo(&mut self, out: &mut OutputDir, echo: &str) -> std::io::Result<()> {
        out.write(CONFIG_ECHO_FILE, echo.as_bytes())?;
        self.config_sha256 = Some(sha256_hex(echo.as_bytes()));
        Ok(())
    }

    pub fn input(&mut self, path: &Path) -> std::io::Result<()> {
        self.inputs.push(FileDigest { path: path.to_path_buf(), sha256: file_sha256(path)? });
        Ok(())
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    /// Hashes every written output and writes `manifest.json` last.
    pub fn finish(self, out: &mut OutputDir) -> std::io::Result<RunManifest> {
        let outputs = out
            .written()
            .iter()
            .map(|p| Ok(FileDigest { path: p.clone(), sha256: file_sha256(&out.root().join(p))? }))
            .collect::<std::io::Result<Vec<_>>>()?;
        let manifest = RunManifest {
            subcommand: self.subcommand,
            arguments: self.arguments,
            config_sha256: self.config_sha256,
            inputs: self.inputs,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_at: self.started_at,
            finished_at: now(),
            outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
        text.push('\n');
        out.write(MANIFEST_FILE, text.as_bytes())?;
        Ok(manifest)
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
