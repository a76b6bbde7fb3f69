//! CSV tables and the in-memory set of files a run produces.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// 17 significant digits in scientific notation; round-trips every `f64`.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        // -0 and 0 print the same
        return format!("{:.16e}", 0.0);
    }
    format!("{v:.16e}")
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Header plus rows; rendered as UTF-8 CSV with LF line endings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Files produced by one experiment, kept in memory until written.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, path: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.push((path.into(), bytes.into()));
    }

    pub fn add_json<T: Serialize>(&mut self, path: impl Into<String>, value: &T) {
        let mut text = serde_json::to_string_pretty(value).expect("summaries serialize");
        text.push('\n');
        self.add(path, text);
    }

    pub fn get(&self, path: &str) -> Option<&[u8]> {
        self.files.iter().find(|(p, _)| p == path).map(|(_, b)| b.as_slice())
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(p, _)| p.as_str())
    }

    /// Writes every file below `dir` in insertion order.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<Vec<FileRecord>> {
        let mut records = Vec::with_capacity(self.files.len());
        for (rel, bytes) in &self.files {
            let path: PathBuf = dir.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&path, bytes)?;
            records.push(FileRecord { path: rel.clone(), bytes: bytes.len() as u64, sha256: sha256_hex(bytes) });
        }
        Ok(records)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_use_seventeen_digits() {
        assert_eq!(format_real(0.5), "5.0000000000000000e-1");
        assert_eq!(format_real(-0.0), "0.0000000000000000e0");
        assert_eq!(format_real(1.0 / 3.0), "3.3333333333333331e-1");
        let v = std::f64::consts::PI / 20.0;
        assert_eq!(format_real(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["n", "p", "note"]);
        t.push(vec![(-1i64).into(), 0.25.into(), "a,b".into()]);
        t.push(vec![2i64.into(), 0.0.into(), "x".into()]);
        assert_eq!(t.to_csv(), "n,p,note\n-1,2.5000000000000000e-1,\"a,b\"\n2,0.0000000000000000e0,x\n");
    }

    #[test]
    fn write_records_checksums() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::default();
        a.add("sub/x.csv", "n\n1\n");
        let rec = a.write_to(dir.path()).unwrap();
        assert_eq!(rec[0].bytes, 4);
        assert_eq!(rec[0].sha256, sha256_hex(b"n\n1\n"));
        assert_eq!(std::fs::read(dir.path().join("sub/x.csv")).unwrap(), b"n\n1\n");
    }
}
