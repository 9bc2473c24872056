//! File access shared by the commands.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use sha2::{Digest as _, Sha256};
use tempfile::NamedTempFile;

/// Which notation a path holds, decided by extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Notation {
    Text,
    Xml,
}

impl Notation {
    pub fn of(path: &Path) -> Option<Notation> {
        match path.extension()?.to_str()? {
            "eatxt" => Some(Notation::Text),
            "eaxml" | "xml" | "arxml" => Some(Notation::Xml),
            _ => None,
        }
    }
}

/// Writes `contents` next to `path` and renames it into place, so readers
/// never see a half-written file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Hex SHA-256 of `bytes`.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest of a file's contents, or `None` when it cannot be read.
pub fn file_digest(path: &Path) -> Option<String> {
    fs::read(path).ok().map(|b| digest(&b))
}
