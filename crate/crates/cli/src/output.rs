//! CSV output with a fixed number format.
//!
//! Numbers are written with 12 significant digits in scientific notation and
//! a signed two-digit exponent (`6.20064061020e-01`), so identical inputs give
//! byte-identical files. Undefined values are written as `nan`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// `x` with 12 significant digits, e.g. `-1.00000000000e-03`.
pub fn fmt_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let s = format!("{x:.11e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Compact label for a frequency in file names: `1250`, `-500`, `2.5`.
pub fn fmt_label(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Writes `# <comment>`, the column header, then rows, all `\n`-terminated.
pub struct CsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, comment: &str, columns: &[&str]) -> Result<Self, CliError> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut writer = CsvWriter {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        };
        writer.line(&format!("# {comment}"))?;
        writer.line(&columns.join(","))?;
        Ok(writer)
    }

    fn line(&mut self, line: &str) -> Result<(), CliError> {
        self.out
            .write_all(line.as_bytes())
            .and_then(|_| self.out.write_all(b"\n"))
            .map_err(|e| CliError::io(&self.path, e))
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        self.line(&fields.join(","))
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.out.flush().map_err(|e| CliError::io(&self.path, e))?;
        Ok(self.path)
    }
}

/// A CSV file as written by [`CsvWriter`].
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub comment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut lines = text.lines();
        let comment = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .unwrap_or_default()
            .to_string();
        let columns = lines
            .next()
            .map(|l| l.split(',').map(str::to_string).collect())
            .unwrap_or_default();
        let rows = lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        Ok(CsvTable {
            comment,
            columns,
            rows,
        })
    }

    /// Column `name` parsed as floats (`nan` parses to NaN).
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows
            .iter()
            .map(|r| r.get(i).and_then(|s| s.parse().ok()))
            .collect()
    }
}
