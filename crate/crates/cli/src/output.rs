use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Default root for run directories when neither `--output-dir` nor the
/// environment variable is set.
pub const DEFAULT_OUTPUT_ROOT: &str = "runs";
pub const OUTPUT_DIR_ENV: &str = "GNNE_OUTPUT_DIR";

/// Writes `bytes` to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", parent.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(parent)
        .map_err(|e| CliError::data(format!("cannot create a temporary file in {}: {e}", parent.display())))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::data(format!("cannot move output into {}: {e}", path.display())))?;
    Ok(())
}

/// Renders into memory with `render`, then writes atomically.
pub fn write_with<F>(path: &Path, render: F) -> CliResult<()>
where
    F: FnOnce(&mut Vec<u8>) -> gnne_core::Result<()>,
{
    let mut buf = Vec::new();
    render(&mut buf)?;
    write_atomic(path, &buf)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Directory receiving every artifact of one command invocation.
#[derive(Debug, Clone)]
pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    /// Uses `exact` when given; otherwise creates `<root>/<command>-<UTC time>`,
    /// adding a numeric suffix if that name is taken.
    pub fn create(exact: Option<&Path>, root: Option<&Path>, command: &str) -> CliResult<Self> {
        let dir = match exact {
            Some(p) => p.to_path_buf(),
            None => {
                let root = root.map_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT), Path::to_path_buf);
                let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
                let base = root.join(format!("{command}-{stamp}"));
                let mut candidate = base.clone();
                let mut k = 2;
                while candidate.exists() {
                    candidate = PathBuf::from(format!("{}-{k}", base.display()));
                    k += 1;
                }
                candidate
            }
        };
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::data(format!("cannot create run directory {}: {e}", dir.display())))?;
        Ok(Self { root: dir })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn join(&self, rel: impl AsRef<Path>) -> PathBuf {
        self.root.join(rel)
    }

    pub fn write(&self, rel: impl AsRef<Path>, bytes: &[u8]) -> CliResult<PathBuf> {
        let path = self.join(rel);
        write_atomic(&path, bytes)?;
        Ok(path)
    }

    pub fn write_with<F>(&self, rel: impl AsRef<Path>, render: F) -> CliResult<PathBuf>
    where
        F: FnOnce(&mut Vec<u8>) -> gnne_core::Result<()>,
    {
        let path = self.join(rel);
        write_with(&path, render)?;
        Ok(path)
    }

    pub fn write_json<T: serde::Serialize>(&self, rel: impl AsRef<Path>, value: &T) -> CliResult<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::data(format!("cannot serialize {}: {e}", rel.as_ref().display())))?;
        text.push('\n');
        self.write(rel, text.as_bytes())
    }
}
