//! CSV and JSON output, written atomically.
//!
//! CSV files have a header row, rows in ascending `t`, LF line endings and
//! numbers in Rust's shortest round-trip form.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::CliError;

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        let header: Vec<&str> = columns.iter().map(AsRef::as_ref).collect();
        Self { text: header.join(",") + "\n" }
    }

    /// Header `t,re_1,im_1,…,re_d,im_d`.
    pub fn components(dim: usize) -> Self {
        let mut cols = vec!["t".to_string()];
        for k in 1..=dim {
            cols.push(format!("re_{k}"));
            cols.push(format!("im_{k}"));
        }
        Self::new(&cols)
    }

    pub fn row(&mut self, first: f64, values: &[Complex64]) {
        write!(self.text, "{first}").unwrap();
        for z in values {
            write!(self.text, ",{},{}", z.re, z.im).unwrap();
        }
        self.text.push('\n');
    }

    pub fn real_row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(f64::to_string).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// `[re, im]` in JSON.
pub fn complex(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn prefixed(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{suffix}"))
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let err = |source| CliError::Write { path: path.into(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(err)?;
    let mut tmp = NamedTempFile::new_in(&dir).map_err(err)?;
    tmp.write_all(contents).map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

/// Writes `<prefix>.csv` and `<prefix>.summary.json`.
pub fn write_outputs<S: Serialize>(prefix: &str, csv: Csv, summary: &S) -> Result<(PathBuf, PathBuf), CliError> {
    let csv_path = prefixed(prefix, ".csv");
    let json_path = prefixed(prefix, ".summary.json");
    write_atomic(&csv_path, csv.into_string().as_bytes())?;
    let mut json = serde_json::to_string_pretty(summary).expect("summaries serialize");
    json.push('\n');
    write_atomic(&json_path, json.as_bytes())?;
    Ok((csv_path, json_path))
}
