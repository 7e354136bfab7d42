use crate::CliError;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const MANIFEST_SCHEMA: &str = "fbplab.manifest.v1";
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema: &'static str,
    pub subcommand: String,
    pub tool_version: &'static str,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub jobs: usize,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    pub wall_time_s: f64,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

/// Output directory with the list of files a run is about to write.
pub struct OutDir {
    pub dir: PathBuf,
    names: Vec<String>,
}

impl OutDir {
    /// Creates the directory and refuses to proceed if any of the files
    /// (or the manifest) exists, unless `force`.
    pub fn prepare(dir: &Path, names: Vec<String>, force: bool) -> Result<OutDir, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
        if !force {
            for n in names.iter().map(String::as_str).chain([MANIFEST_NAME]) {
                if dir.join(n).exists() {
                    return Err(CliError::Usage(format!(
                        "{} exists; pass --force to overwrite",
                        dir.join(n).display()
                    )));
                }
            }
        }
        Ok(OutDir {
            dir: dir.to_path_buf(),
            names,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        debug_assert!(self.names.iter().any(|n| n == name), "{name} was not declared");
        self.dir.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let p = self.path(name);
        std::fs::write(&p, contents).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display())))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let s = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
        self.write(name, &(s + "\n"))
    }

    pub fn hashes(&self) -> Result<Vec<FileHash>, CliError> {
        self.names
            .iter()
            .map(|n| {
                Ok(FileHash {
                    path: n.clone(),
                    sha256: sha256_file(&self.dir.join(n))?,
                })
            })
            .collect()
    }
}
