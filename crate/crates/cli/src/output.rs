//! Artifact writing: CSV curves and tables, JSON documents, atomic renames.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// A CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(k) => k.to_string(),
            Cell::Num(v) => format_number(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Header row plus data rows, rendered with `,` and `\n`.
pub fn render_csv(columns: &[&str], rows: &[Vec<Cell>]) -> Result<String, CliError> {
    let mut out = columns.join(",");
    out.push('\n');
    for (k, row) in rows.iter().enumerate() {
        if row.len() != columns.len() {
            return Err(CliError::Config(format!(
                "row {k} has {} cells, header has {}",
                row.len(),
                columns.len()
            )));
        }
        let cells: Vec<String> = row.iter().map(Cell::render).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Writes to a temporary sibling, then renames over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| CliError::Config(format!("bad artifact path {}", path.display())))?;
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArtifactRecord {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Collects the files written by one run.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    records: Vec<ArtifactRecord>,
}

impl ArtifactWriter {
    pub fn new(dir: PathBuf) -> Self {
        Self {
            dir,
            records: Vec::new(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn records(&self) -> &[ArtifactRecord] {
        &self.records
    }

    pub fn write(&mut self, file: &str, text: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(file);
        write_atomic(&path, text.as_bytes())?;
        self.records.push(ArtifactRecord {
            file: file.to_string(),
            bytes: text.len(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(path)
    }

    pub fn csv(
        &mut self,
        file: &str,
        columns: &[&str],
        rows: &[Vec<Cell>],
    ) -> Result<PathBuf, CliError> {
        let text = render_csv(columns, rows)?;
        self.write(file, &text)
    }

    pub fn json<T: Serialize>(&mut self, file: &str, value: &T) -> Result<PathBuf, CliError> {
        let text = to_json(value)?;
        self.write(file, &text)
    }
}

/// Writes `(theta, ...)` style curve data as CSV.
pub fn emit_curve(
    writer: &mut ArtifactWriter,
    name: &str,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> Result<PathBuf, CliError> {
    let cells: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| Cell::Num(v)).collect())
        .collect();
    writer.csv(&format!("{name}.csv"), columns, &cells)
}
