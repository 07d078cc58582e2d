//! Write-once run directory. Artifacts are held in memory and written, with
//! a manifest of their SHA-256 digests, only when the command succeeds.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Artifact {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Everything needed to reproduce a run except the output location.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub schema_version: u32,
    pub command: &'a str,
    pub seed: u64,
    pub settings: &'a BTreeMap<String, String>,
    pub options: &'a BTreeMap<String, String>,
    /// Digests of input files, keyed by role.
    pub inputs: &'a BTreeMap<String, String>,
    pub artifacts: &'a [Artifact],
}

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Output {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Output {
    /// Claims `dir` for a new run. It must be absent or empty unless `force`.
    pub fn new(dir: &Path, force: bool) -> Result<Output> {
        if dir.exists() {
            let mut entries = std::fs::read_dir(dir)
                .map_err(|e| Error::Config(format!("cannot use {} as output: {e}", dir.display())))?;
            if entries.next().is_some() && !force {
                return Err(Error::Config(format!(
                    "output directory {} is not empty; choose another --out or pass --force",
                    dir.display()
                )));
            }
        }
        Ok(Output {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn add(&mut self, name: &str, data: Vec<u8>) -> Result<()> {
        if name == MANIFEST_FILE || self.files.iter().any(|(n, _)| n == name) {
            return Err(Error::Config(format!("artifact {name} would be written twice")));
        }
        self.files.push((name.to_string(), data));
        Ok(())
    }

    pub fn add_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_vec_pretty(value)?;
        text.push(b'\n');
        self.add(name, text)
    }

    /// Stores whatever `fill` writes into a fresh buffer.
    pub fn add_with(&mut self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        self.add(name, buf)
    }

    /// Writes every artifact and the manifest. Returns the artifact list.
    pub fn finish(
        self,
        command: &str,
        seed: u64,
        settings: &BTreeMap<String, String>,
        options: &BTreeMap<String, String>,
        inputs: &BTreeMap<String, String>,
    ) -> Result<Vec<Artifact>> {
        std::fs::create_dir_all(&self.dir)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", self.dir.display())))?;
        let mut artifacts = Vec::with_capacity(self.files.len());
        for (name, data) in &self.files {
            std::fs::write(self.dir.join(name), data)?;
            artifacts.push(Artifact {
                path: name.clone(),
                bytes: data.len(),
                sha256: sha256_hex(data),
            });
        }
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            command,
            seed,
            settings,
            options,
            inputs,
            artifacts: &artifacts,
        };
        let mut text = serde_json::to_vec_pretty(&manifest)?;
        text.push(b'\n');
        std::fs::write(self.dir.join(MANIFEST_FILE), text)?;
        Ok(artifacts)
    }
}

/// A report body tagged with the schema version every JSON output carries.
#[derive(Debug, Serialize)]
pub struct Versioned<T: Serialize> {
    pub schema_version: u32,
    #[serde(flatten)]
    pub body: T,
}

pub fn versioned<T: Serialize>(body: T) -> Versioned<T> {
    Versioned {
        schema_version: SCHEMA_VERSION,
        body,
    }
}
