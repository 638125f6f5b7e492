use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use sympconn::format::Document;

use crate::Failure;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_text(path: &Path) -> Result<(String, InputDigest), Failure> {
    let bytes = std::fs::read(path).map_err(|source| Failure::Io { path: path.to_path_buf(), source })?;
    let digest = InputDigest { path: path.display().to_string(), sha256: sha256_hex(&bytes) };
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::Core(sympconn::Error::parse(format!("{}: not valid UTF-8", path.display()))))?;
    Ok((text, digest))
}

/// Reads and parses one document; parse errors are prefixed with the path.
pub fn read_document(path: &Path) -> Result<(Document, InputDigest), Failure> {
    let (text, digest) = read_text(path)?;
    let doc = Document::parse(&text).map_err(|e| Failure::in_file(path, e))?;
    Ok((doc, digest))
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let io = |source| Failure::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Failure::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}
