//! Output directory handling: atomic writes, CSV and JSON helpers, input
//! digests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(OutDir { root: root.to_owned() })
    }

    /// Writes `bytes` to a temporary file in the output directory and renames
    /// it into place, so readers never see a partial file.
    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<()> {
        let target = self.root.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root)
            .with_context(|| format!("creating temporary file in {}", self.root.display()))?;
        tmp.write_all(bytes)
            .and_then(|_| tmp.as_file().sync_all())
            .with_context(|| format!("writing {}", target.display()))?;
        tmp.persist(&target)
            .map_err(|e| e.error)
            .with_context(|| format!("renaming into {}", target.display()))?;
        log::info!("wrote {}", target.display());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    pub fn write_csv<R, I>(&self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator,
        R::Item: AsRef<[u8]>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        self.write(name, &bytes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

impl InputDigest {
    pub fn of(path: &Path, contents: &[u8]) -> Self {
        let hash = Sha256::digest(contents);
        InputDigest {
            path: path.to_owned(),
            sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
            bytes: contents.len() as u64,
        }
    }
}

pub fn read_input(path: &Path) -> Result<(Vec<u8>, InputDigest)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = InputDigest::of(path, &bytes);
    Ok((bytes, digest))
}
