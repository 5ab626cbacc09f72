//! Per-stage manifests: content hashes of inputs and outputs, the settings
//! that shaped the stage, the seed and the wall time.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub stage: String,
    pub tool_version: String,
    pub seed: u64,
    pub settings_sha256: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub elapsed_ms: u128,
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

impl Manifest {
    pub fn read(path: &Path) -> Option<Manifest> {
        let file = File::open(path).ok()?;
        serde_json::from_reader(BufReader::new(file)).ok()
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, serde_json::to_vec_pretty(self)?)?;
        Ok(())
    }

    /// Same inputs and settings, and every recorded output is still on disk
    /// with the recorded content.
    pub fn is_current(&self, inputs: &BTreeMap<String, String>, settings_sha256: &str, seed: u64, root: &Path) -> bool {
        self.version == MANIFEST_VERSION
            && self.tool_version == env!("CARGO_PKG_VERSION")
            && &self.inputs == inputs
            && self.settings_sha256 == settings_sha256
            && self.seed == seed
            && self.outputs.iter().all(|(p, h)| sha256_file(&root.join(p)).is_ok_and(|x| &x == h))
    }
}
