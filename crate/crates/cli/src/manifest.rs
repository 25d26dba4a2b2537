use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qpl_core::counting::Checkpoint;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
    /// Where each configurable setting came from: flag, env or default.
    pub config_sources: BTreeMap<String, String>,
    pub started_at: String,
    pub finished_at: String,
    pub elapsed_ms: u128,
    pub checkpoints: Vec<Checkpoint>,
    pub totals: BTreeMap<String, String>,
    pub output_file: String,
    pub result_digest: String,
}

impl RunManifest {
    pub fn load(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
