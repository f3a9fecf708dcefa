use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use strikebench::Result;

/// Reproducibility record written next to every command's primary
/// output: the resolved configuration, digests of all inputs, the tool
/// version, and the wall-clock duration.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: BTreeMap<String, serde_json::Value>,
    pub inputs: BTreeMap<String, String>,
    pub tool_version: String,
    pub duration_secs: f64,
    #[serde(skip)]
    started: Instant,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_owned(),
            args: BTreeMap::new(),
            inputs: BTreeMap::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            duration_secs: 0.0,
            started: Instant::now(),
        }
    }

    /// Record one resolved argument value.
    pub fn arg(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.args.insert(
            key.to_owned(),
            serde_json::to_value(value).expect("serializable argument"),
        );
        self
    }

    /// Record the SHA-256 digest of one input file.
    pub fn input(&mut self, path: &Path) -> Result<&mut Self> {
        let bytes = std::fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        self.inputs.insert(
            path.display().to_string(),
            format!("sha256:{}", hex_string(&digest)),
        );
        Ok(self)
    }

    /// Record digests of the split files of a dataset directory.
    pub fn dataset_inputs(&mut self, dir: &Path) -> Result<&mut Self> {
        for name in [
            "train.txt",
            "valid.txt",
            "test.txt",
            "entity2id.txt",
            "relation2id.txt",
        ] {
            let path = dir.join(name);
            if path.exists() {
                self.input(&path)?;
            }
        }
        Ok(self)
    }

    /// Finalize and write the manifest next to the primary output
    /// (`<output>.manifest.json`).
    pub fn write_for(mut self, primary_output: &Path) -> Result<()> {
        self.duration_secs = self.started.elapsed().as_secs_f64();
        let path = manifest_path(primary_output);
        std::fs::write(path, serde_json::to_string_pretty(&self)?)?;
        Ok(())
    }
}

pub fn manifest_path(primary_output: &Path) -> PathBuf {
    if primary_output.is_dir() {
        primary_output.join("manifest.json")
    } else {
        let mut os = primary_output.as_os_str().to_owned();
        os.push(".manifest.json");
        PathBuf::from(os)
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
