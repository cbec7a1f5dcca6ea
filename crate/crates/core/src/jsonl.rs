//! Line-oriented JSON helpers shared by all file formats.
//!
//! Every pipeline stage writes one JSON record per line. The first line of a
//! stage output is a header record keyed by [`HEADER_KEY`]; readers skip it so
//! that stage outputs can be fed back in as inputs.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

/// Top-level key identifying the header record of a pipeline output file.
pub const HEADER_KEY: &str = "_header";

/// Reads all records from a JSON-lines file, skipping blank lines and the
/// header record. Malformed lines are reported with their line number.
pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || is_header_line(trimmed) {
            continue;
        }
        let record: T = serde_json::from_str(trimmed).map_err(|e| Error::MalformedLine {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

fn is_header_line(line: &str) -> bool {
    line.starts_with("{\"_header\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[derive(Debug, serde::Deserialize)]
    struct Row {
        id: String,
    }

    #[test]
    fn skips_header_and_blank_lines() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "{{\"_header\":{{\"tool\":\"x\"}}}}").unwrap();
        writeln!(f, "{{\"id\":\"a\"}}").unwrap();
        writeln!(f).unwrap();
        writeln!(f, "{{\"id\":\"b\"}}").unwrap();
        let rows: Vec<Row> = read_records(f.path()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].id, "a");
        assert_eq!(rows[1].id, "b");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "{{\"id\":\"a\"}}").unwrap();
        writeln!(f, "{{\"id\":").unwrap();
        let err = read_records::<Row>(f.path()).unwrap_err();
        match err {
            Error::MalformedLine { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn empty_file_yields_empty_list() {
        let f = tempfile::NamedTempFile::new().unwrap();
        let rows: Vec<Row> = read_records(f.path()).unwrap();
        assert!(rows.is_empty());
    }
}
