//! CSV tables, pass/fail checks, the run manifest and atomic file writes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliResult;

/// One pass/fail line with the tolerance it was held to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(deserialize_with = "nan_from_null")]
    pub measured: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

// JSON has no NaN; serde_json writes it as null
fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl Check {
    /// Passes when `measured ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, tolerance, pass: measured <= tolerance, detail: String::new() }
    }

    /// Passes when `measured < bound`.
    pub fn below(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), measured, tolerance: bound, pass: measured < bound, detail: String::new() }
    }

    /// Passes when `measured > bound`.
    pub fn above(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), measured, tolerance: bound, pass: measured > bound, detail: String::new() }
    }

    /// Passes when `measured ≥ bound`.
    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), measured, tolerance: bound, pass: measured >= bound, detail: String::new() }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { name: name.into(), measured: f64::NAN, tolerance: f64::NAN, pass: false, detail: detail.into() }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// A table cell; reals are written with 17 significant digits.
#[derive(Clone, Debug)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::text)).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// A file produced by an experiment, not yet on disk.
#[derive(Clone, Debug)]
pub struct OutFile {
    pub name: String,
    pub contents: Vec<u8>,
}

impl OutFile {
    pub fn csv(name: &str, t: &Table) -> Self {
        Self { name: name.into(), contents: t.to_csv() }
    }
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &target)?;
    Ok(target)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub artifact: String,
    pub version: String,
    pub experiment: String,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub started: String,
    pub finished: String,
    /// Every file of the run directory except the manifest itself.
    pub files: Vec<FileEntry>,
    pub checks: Vec<Check>,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub results: BTreeMap<String, serde_json::Value>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

impl Manifest {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339()
}

/// The check table printed on stdout.
pub fn render_checks(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(5).max(5);
    let mut s = format!("{:<width$}  {:>12}  {:>12}  result\n", "check", "measured", "tolerance");
    for c in checks {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        s.push_str(&format!("{:<width$}  {:>12.4e}  {:>12.4e}  {verdict}", c.name, c.measured, c.tolerance));
        if !c.detail.is_empty() {
            s.push_str(&format!("  ({})", c.detail));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_full_precision() {
        let mut t = Table::new(["alpha", "n", "ok"]);
        t.push(vec![0.1.into(), 8u32.into(), true.into()]);
        let s = String::from_utf8(t.to_csv()).unwrap();
        assert_eq!(s, "alpha,n,ok\n1.0000000000000001e-1,8,true\n");
        let back: f64 = s.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn atomic_write_leaves_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "a.csv", b"x\n").unwrap();
        write_atomic(dir.path(), "a.csv", b"y\n").unwrap();
        let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names, vec![std::ffi::OsString::from("a.csv")]);
        assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), b"y\n");
    }

    #[test]
    fn check_relations() {
        assert!(Check::at_most("a", 1.0, 1.0).pass);
        assert!(!Check::below("b", 1.0, 1.0).pass);
        assert!(Check::at_least("c", 10.0, 10.0).pass);
        assert!(!Check::failed("d", "boom").pass);
        assert!(!Check::at_most("e", f64::NAN, 1.0).pass);
    }
}
