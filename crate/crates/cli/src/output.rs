use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// `%.12g`-style rendering: 12 significant digits, trailing zeros dropped,
/// scientific notation outside `[1e-5, 1e12)`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A CSV file rendered in memory; written only after everything succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvFile {
    pub name: String,
    pub contents: String,
}

impl CsvFile {
    /// Empty cells are written for `None`.
    pub fn new(name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<Option<f64>>>) -> Self {
        let mut contents = header.join(",");
        contents.push('\n');
        for row in rows {
            let cells: Vec<String> = row.into_iter().map(|c| c.map(fmt_num).unwrap_or_default()).collect();
            contents.push_str(&cells.join(","));
            contents.push('\n');
        }
        Self { name: name.to_string(), contents }
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.contents.as_bytes()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest<C: Serialize> {
    pub command: String,
    pub config: C,
    pub master_seed: Option<u64>,
    pub tool_version: String,
    pub wall_clock_seconds: f64,
    /// File name to SHA-256 of its bytes.
    pub outputs: BTreeMap<String, String>,
    pub summary: BTreeMap<String, serde_json::Value>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Creates `dir` and writes the CSVs followed by the manifest.
pub fn write_all<C: Serialize>(dir: &Path, files: &[CsvFile], manifest: &RunManifest<C>) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    for f in files {
        let path = dir.join(&f.name);
        fs::write(&path, &f.contents).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    let path = dir.join(MANIFEST_NAME);
    let mut json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    json.push('\n');
    fs::write(&path, json).map_err(|e| CliError::io(&path, e))?;
    written.push(path);
    Ok(written)
}
