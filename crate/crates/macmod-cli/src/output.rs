//! File output helpers: versioned JSON envelopes, CSV writers, atomic
//! writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Wraps a payload with the top-level `schema_version` field.
#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema_version: u32,
    #[serde(flatten)]
    pub payload: T,
}

pub fn to_versioned_json<T: Serialize>(payload: T) -> String {
    let mut text = serde_json::to_string_pretty(&Envelope {
        schema_version: SCHEMA_VERSION,
        payload,
    })
    .expect("report serialization cannot fail");
    text.push('\n');
    text
}

/// Writes via a temporary file in the target directory plus rename, so
/// concurrent campaign tasks never expose partial files.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::usage(format!("cannot write in {}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| CliError::usage(format!("write failed: {e}")))?;
    tmp.persist(path)
        .map_err(|e| CliError::usage(format!("cannot persist {}: {e}", path.display())))?;
    Ok(())
}

/// Renders a CSV table with a header row; floats use the shortest
/// round-trip representation so identical runs are byte-identical.
pub fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}
