//! Deterministic file output: sorted-key pretty JSON, content hashes and
//! reproducible file names.

use crate::error::{io_err, CliResult};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Pretty JSON with object keys sorted, newline terminated.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    // `Value` maps are ordered by key, so a round trip through it sorts every object.
    let v: Value = serde_json::to_value(value).expect("value serializes");
    let mut s = serde_json::to_string_pretty(&v).expect("value prints");
    s.push('\n');
    s
}

/// Hex SHA-256 of the compact canonical JSON of `value`.
pub fn hash_json<T: Serialize>(value: &T) -> String {
    let v: Value = serde_json::to_value(value).expect("value serializes");
    let digest = Sha256::digest(serde_json::to_string(&v).expect("value prints").as_bytes());
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(io_err(path))
}

/// `{command}-{stem}-seed{seed}-{hash12}`.
pub fn run_name(command: &str, stem: &str, seed: u64, config_hash: &str) -> String {
    format!("{command}-{stem}-seed{seed}-{}", &config_hash[..12])
}

pub fn ensure_dir(dir: &Path) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    Ok(dir.to_path_buf())
}
