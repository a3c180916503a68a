//! Output directories and their run manifests.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to re-run a command: the argument list, every
/// resolved setting, input digests and the base seed.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config: BTreeMap<String, String>,
    pub inputs: Vec<InputHash>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<String>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn hash_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| CliError::read(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| CliError::read(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex(&hasher.finalize()))
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(|e| CliError::read(dir, e))? {
        let path = entry.map_err(|e| CliError::read(dir, e))?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else if path.file_name().is_some_and(|n| n != MANIFEST_FILE) {
            out.push(path.strip_prefix(root).expect("under root").to_path_buf());
        }
    }
    Ok(())
}

/// SHA-256 of a file, or of a directory's sorted `relative path, file
/// digest` lines. Manifests inside the directory are ignored.
pub fn hash_path(path: &Path) -> Result<String> {
    if !path.is_dir() {
        return hash_file(path);
    }
    let mut files = Vec::new();
    collect_files(path, path, &mut files)?;
    files.sort();
    let mut hasher = Sha256::new();
    for rel in files {
        let digest = hash_file(&path.join(&rel))?;
        hasher.update(rel.to_string_lossy().replace('\\', "/").as_bytes());
        hasher.update(b"\t");
        hasher.update(digest.as_bytes());
        hasher.update(b"\n");
    }
    Ok(hex(&hasher.finalize()))
}

pub fn timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// A command's output directory. Refuses to overwrite any registered input.
pub struct OutputDir {
    root: PathBuf,
    protected: Vec<PathBuf>,
    written: RefCell<Vec<String>>,
}

impl OutputDir {
    pub fn create(root: &Path, inputs: &[PathBuf]) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::write(root, e))?;
        let protected = inputs.iter().filter_map(|p| fs::canonicalize(p).ok()).collect();
        Ok(Self {
            root: root.to_path_buf(),
            protected,
            written: RefCell::new(Vec::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Reserves `name` (slash-separated relative path) and returns its path.
    pub fn path(&self, name: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        let parent = path.parent().unwrap_or(&self.root);
        fs::create_dir_all(parent).map_err(|e| CliError::write(parent, e))?;
        let canonical = fs::canonicalize(parent)
            .map_err(|e| CliError::write(parent, e))?
            .join(path.file_name().unwrap_or_default());
        if self.protected.iter().any(|p| canonical.starts_with(p)) {
            return Err(CliError::usage(format!(
                "output {} would modify an input; choose another --output",
                path.display()
            )));
        }
        let mut written = self.written.borrow_mut();
        if !written.iter().any(|w| w == name) {
            written.push(name.to_string());
        }
        Ok(path)
    }

    pub fn writer(&self, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
        let path = self.path(name)?;
        let file = File::create(&path).map_err(|e| CliError::write(&path, e))?;
        Ok((path, BufWriter::new(file)))
    }

    /// Writes through `f`, mapping any I/O failure to an internal error.
    pub fn write_with<F>(&self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let (path, mut w) = self.writer(name)?;
        f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::write(&path, e))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n")
        })
    }

    pub fn outputs(&self) -> Vec<String> {
        self.written.borrow().clone()
    }

    pub fn write_manifest(&self, manifest: &RunManifest) -> Result<()> {
        let path = self.root.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::write(&path, e))?;
        fs::write(&path, text + "\n").map_err(|e| CliError::write(&path, e))
    }
}
