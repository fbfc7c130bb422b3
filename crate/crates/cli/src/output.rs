//! Deterministic file and stdout emission helpers.
//!
//! Output files never contain timing or other volatile values: a fixed seed
//! must produce byte-identical artifacts at any parallelism degree. Floats
//! are written with 17 significant digits for lossless round trips.

use std::io::Write;
use std::path::Path;

use momreg_core::error::Result;
use momreg_core::fmt_float17;

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

/// One CSV document from a header and rows of preformatted fields.
pub fn csv_document(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut doc = String::new();
    doc.push_str(&header.join(","));
    doc.push('\n');
    for row in rows {
        doc.push_str(&row.join(","));
        doc.push('\n');
    }
    doc
}

pub fn field_f64(v: f64) -> String {
    fmt_float17(v)
}

pub fn field_usize(v: usize) -> String {
    v.to_string()
}

pub fn field_u64(v: u64) -> String {
    v.to_string()
}

pub fn json_document<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut doc = serde_json::to_string_pretty(value)
        .map_err(|e| momreg_core::Error::Internal(format!("json serialization: {e}")))?;
    doc.push('\n');
    Ok(doc)
}
