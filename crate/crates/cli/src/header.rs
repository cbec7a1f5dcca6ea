//! Provenance header written as the first line of every output file.
//!
//! The header pins tool version, resolved-config hash, input-file hashes,
//! and seed, so a stage's output is traceable to exactly what produced it.
//! Readers skip it; `created_at` is the only field allowed to differ between
//! re-runs.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{CliError, Settings};

#[derive(Debug, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    pub input_hashes: BTreeMap<String, String>,
    pub seed: u64,
    pub created_at: u64,
}

#[derive(Serialize)]
struct HeaderLine<'a> {
    _header: &'a Header,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn hash_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
    Ok(format!("sha256:{}", sha256_hex(&bytes)))
}

pub fn make_header(
    command: &'static str,
    settings: &Settings,
    inputs: &[(&str, &Path)],
) -> Result<Header, CliError> {
    let config_json = serde_json::to_string(settings)
        .map_err(|e| CliError::Internal(format!("serialize settings: {e}")))?;
    let mut input_hashes = BTreeMap::new();
    for (name, path) in inputs {
        input_hashes.insert(name.to_string(), hash_file(path)?);
    }
    let created_at = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(Header {
        tool: "ecdetect",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config_hash: format!("sha256:{}", sha256_hex(config_json.as_bytes())),
        input_hashes,
        seed: settings.seed,
        created_at,
    })
}

/// Writes the header line followed by one JSON line per row.
pub fn write_jsonl<T: Serialize>(
    path: &Path,
    header: &Header,
    rows: &[T],
) -> Result<(), CliError> {
    let file = File::create(path)
        .map_err(|e| CliError::Schema(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| CliError::Schema(format!("write {}: {e}", path.display()));
    let line = serde_json::to_string(&HeaderLine { _header: header })
        .map_err(|e| CliError::Internal(format!("serialize header: {e}")))?;
    writeln!(w, "{line}").map_err(io_err)?;
    for row in rows {
        let line = serde_json::to_string(row)
            .map_err(|e| CliError::Internal(format!("serialize row: {e}")))?;
        writeln!(w, "{line}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FileConfig;

    #[test]
    fn header_line_has_the_marker_key() {
        let settings = Settings::resolve(&FileConfig::default(), Some(3));
        let h = make_header("segment", &settings, &[]).unwrap();
        let line = serde_json::to_string(&HeaderLine { _header: &h }).unwrap();
        assert!(line.starts_with("{\"_header\""));
        assert!(line.contains("\"seed\":3"));
        assert!(line.contains("\"config_hash\":\"sha256:"));
    }

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
