//! On-disk graph lists with JSON sidecar manifests.
//!
//! Every persisted list is a graph6 file plus a manifest recording what was
//! written and a SHA-256 of the file, so an interrupted run can tell a
//! complete file from a torn one.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{graph6, BitGraph};

/// Hex SHA-256 of a file's contents.
pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Hex SHA-256 of the graph6 lines of `graphs`, as they would be written.
pub fn graphs_digest<'a>(graphs: impl IntoIterator<Item = &'a BitGraph>) -> String {
    let mut h = Sha256::new();
    for g in graphs {
        h.update(graph6::encode(g).as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("manifest types serialize");
    // Write to a sibling and rename so a crash never leaves half a manifest.
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, text + "\n").map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Manifest { path: path.to_path_buf(), msg: e.to_string() })
}

/// Writes `graphs` to `path` and returns the file digest.
pub fn write_graphs(path: &Path, graphs: &[BitGraph]) -> Result<String> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    let tmp = path.with_extension("g6.tmp");
    graph6::write_file(&tmp, graphs)?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))?;
    file_digest(path)
}

/// Reads a graph6 file and checks it against an expected digest.
pub fn read_graphs_checked(path: &Path, digest: &str) -> Result<Vec<BitGraph>> {
    let actual = file_digest(path)?;
    if actual != digest {
        return Err(Error::Manifest {
            path: path.to_path_buf(),
            msg: format!("digest mismatch: manifest says {digest}, file hashes to {actual}"),
        });
    }
    graph6::read_file(path)
}
