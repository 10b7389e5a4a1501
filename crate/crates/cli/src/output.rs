//! Ordered result buffer, CSV and plot formatting, and the manifest.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::RunError;

/// Version of every CSV column layout; bump when a layout changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Formats a float with 17 significant digits, enough to round-trip.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), num)
}

/// A CSV table whose first line names the layout and its version.
#[derive(Debug, Clone)]
pub struct Table {
    text: String,
    columns: usize,
}

impl Table {
    pub fn new(experiment: &str, columns: &[&str]) -> Self {
        let mut text = format!("# zeno-lab {experiment} schema v{SCHEMA_VERSION}\n");
        text.push_str(&columns.join(","));
        text.push('\n');
        Table {
            text,
            columns: columns.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

/// Whitespace-separated columns with a `#` header, for plotting tools.
#[derive(Debug, Clone)]
pub struct PlotData {
    text: String,
}

impl PlotData {
    pub fn new(columns: &[&str]) -> Self {
        PlotData {
            text: format!("# {}\n", columns.join(" ")),
        }
    }

    pub fn row(&mut self, cells: &[f64]) {
        let line: Vec<String> = cells.iter().map(|&x| num(x)).collect();
        let _ = writeln!(self.text, "{}", line.join(" "));
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

/// Files in the order they are written.
#[derive(Debug, Default, Clone)]
pub struct OutputBuffer {
    files: Vec<(String, Vec<u8>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

impl OutputBuffer {
    pub fn push(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn push_json<T: Serialize>(
        &mut self,
        name: impl Into<String>,
        value: &T,
    ) -> Result<(), RunError> {
        let mut bytes =
            serde_json::to_vec_pretty(value).map_err(|e| RunError::Numerical(e.to_string()))?;
        bytes.push(b'\n');
        self.push(name, bytes);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.as_slice())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn entries(&self) -> Vec<FileEntry> {
        self.files
            .iter()
            .map(|(name, bytes)| FileEntry {
                name: name.clone(),
                bytes: bytes.len() as u64,
                sha256: sha256_hex(bytes),
            })
            .collect()
    }

    /// Creates `dir` if needed and writes every file in order.
    pub fn write_all(&self, dir: &Path) -> Result<(), RunError> {
        let io = |e: std::io::Error, what: &Path| RunError::Io(format!("{}: {e}", what.display()));
        std::fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| io(e, &path))?;
        }
        Ok(())
    }
}
