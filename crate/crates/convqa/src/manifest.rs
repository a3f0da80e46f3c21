//! Run manifests written beside each output.
//!
//! A manifest is two JSON lines: a header holding only the wall-clock
//! timestamp, then the run description (subcommand, seed, configuration and
//! SHA-256 digests of the inputs). Everything after the header is a pure
//! function of the invocation.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunDescription {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub seed: u64,
    pub config: Value,
    pub inputs: Vec<InputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_input(path: &Path, bytes: &[u8]) -> InputDigest {
    InputDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(bytes),
    }
}

/// Manifest location for an output file: `<output>.manifest.jsonl`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.jsonl");
    output.with_file_name(name)
}

pub fn render(desc: &RunDescription, unix_seconds: u64) -> String {
    let header = serde_json::json!({ "created_unix": unix_seconds });
    format!(
        "{}\n{}\n",
        header,
        serde_json::to_string(desc).expect("manifest serializes")
    )
}

pub fn write_manifest(output: &Path, desc: &RunDescription) -> std::io::Result<PathBuf> {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let path = manifest_path(output);
    std::fs::write(&path, render(desc, now))?;
    Ok(path)
}
