//! The `.poly` text format.
//!
//! ```text
//! # optional comment lines
//! N 8
//! 0 1
//! 2 3
//! ```
//!
//! The first non-comment line gives the length; every following line is one
//! `<index> <coefficient>` term with strictly ascending indices below the
//! length and nonzero coefficients. Blank lines are ignored.

use std::fs;
use std::path::{Path, PathBuf};

use sparseconv::{Envelope, SparseVector};

#[derive(Debug, thiserror::Error)]
pub enum PolyFileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn parse_error(line: usize, message: impl Into<String>) -> PolyFileError {
    PolyFileError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_poly(text: &str) -> Result<SparseVector, PolyFileError> {
    let mut dim: Option<u64> = None;
    let mut terms: Vec<(u64, i64)> = Vec::new();
    let mut last_line = 0;
    let mut header_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let Some(n) = dim else {
            match fields.as_slice() {
                ["N", len] => {
                    let len: u64 = len
                        .parse()
                        .map_err(|_| parse_error(line, format!("malformed length {len:?}")))?;
                    Envelope::default()
                        .check_dimension(len)
                        .map_err(|e| parse_error(line, e.to_string()))?;
                    dim = Some(len);
                    header_line = line;
                }
                _ => return Err(parse_error(line, "malformed header, expected \"N <length>\"")),
            }
            continue;
        };
        let [index, coeff] = fields.as_slice() else {
            return Err(parse_error(line, "malformed line, expected \"<index> <coefficient>\""));
        };
        let index: u64 = index
            .parse()
            .map_err(|_| parse_error(line, format!("malformed index {index:?}")))?;
        let coeff: i64 = coeff
            .parse()
            .map_err(|_| parse_error(line, format!("malformed coefficient {coeff:?}")))?;
        if index >= n {
            return Err(parse_error(line, format!("index {index} out of range for N = {n}")));
        }
        if coeff == 0 {
            return Err(parse_error(line, "zero coefficient"));
        }
        match terms.last() {
            Some(&(prev, _)) if prev == index => {
                return Err(parse_error(line, format!("duplicate index {index}")))
            }
            Some(&(prev, _)) if prev > index => {
                return Err(parse_error(
                    line,
                    format!("index {index} after {prev}, indices must ascend"),
                ))
            }
            _ => terms.push((index, coeff)),
        }
    }
    let n = dim.ok_or_else(|| parse_error(last_line.max(1), "missing \"N <length>\" header"))?;
    SparseVector::new(n, terms).map_err(|e| parse_error(header_line, e.to_string()))
}

pub fn format_poly(v: &SparseVector) -> String {
    let mut out = format!("N {}\n", v.dim());
    for &(i, c) in v.terms() {
        out.push_str(&format!("{i} {c}\n"));
    }
    out
}

pub fn read_poly_file(path: &Path) -> Result<SparseVector, PolyFileError> {
    let text = fs::read_to_string(path).map_err(|source| PolyFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_poly(&text)
}

pub fn write_poly_file(v: &SparseVector, path: &Path) -> Result<(), PolyFileError> {
    fs::write(path, format_poly(v)).map_err(|source| PolyFileError::Io {
        path: path.to_path_buf(),
        source,
    })
}
