use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    RmtVerify,
    Train,
    Analyze,
    Predict,
    Report,
}

/// Everything that determines a run's outputs, plus where they went.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: CommandKind,
    pub seeds: Vec<u64>,
    pub dataset: Option<String>,
    pub latent_dims: Vec<usize>,
    pub epochs: Vec<usize>,
    pub settings: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl RunManifest {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            seeds: Vec::new(),
            dataset: None,
            latent_dims: Vec::new(),
            epochs: Vec::new(),
            settings: BTreeMap::new(),
            output: None,
            workers: None,
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.settings.insert(key.to_string(), value.to_string());
        self
    }

    /// Hash of the result-determining fields. Output location and worker
    /// count are excluded: they do not change what gets written.
    pub fn run_id(&self) -> String {
        let mut core = self.clone();
        core.output = None;
        core.workers = None;
        let bytes = serde_json::to_vec(&core).expect("manifest serialises");
        let digest = Sha256::digest(&bytes);
        digest[..6].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Writes `manifest_<run_id>.json` into `dir`.
    pub fn write(&self, dir: &Path) -> anyhow::Result<PathBuf> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("manifest_{}.json", self.run_id()));
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Fails if `path` exists and `force` is off.
pub fn ensure_writable(path: &Path, force: bool) -> Result<(), CliError> {
    if path.exists() && !force {
        return Err(CliError::Exists(path.to_path_buf()));
    }
    Ok(())
}
