//! Matrix file formats.
//!
//! Plain text: the first line holds `n`, followed by `n` rows of `n`
//! whitespace-separated numbers. Blank lines and lines starting with `#` are
//! skipped.
//!
//! JSON: `{"n": 2, "entries": [a11, a12, a21, a22]}` with entries row-major.
//!
//! Both writers print 17 significant digits, which round-trips every `f64`.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Text,
    Json,
}

impl MatrixFormat {
    /// JSON if the extension is `.json` or the content starts with `{`.
    pub fn detect(path: &Path, content: &str) -> Self {
        let by_ext = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if by_ext || content.trim_start().starts_with('{') {
            MatrixFormat::Json
        } else {
            MatrixFormat::Text
        }
    }
}

pub fn parse_text(content: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = content
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, first) = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let n: usize = first
        .parse()
        .map_err(|_| Error::Parse(format!("first line must be the dimension, got {first:?}")))?;
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut rows = Vec::with_capacity(n);
    for (lineno, line) in lines {
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number {tok:?}", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != n {
            return Err(Error::Parse(format!(
                "line {}: expected {n} entries, found {}",
                lineno + 1,
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
    }
    Ok(rows)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonMatrix {
    n: usize,
    entries: Vec<f64>,
}

pub fn parse_json(content: &str) -> Result<Vec<Vec<f64>>> {
    let m: JsonMatrix = serde_json::from_str(content).map_err(|e| Error::Parse(e.to_string()))?;
    if m.n == 0 {
        return Err(Error::Empty);
    }
    if m.entries.len() != m.n * m.n {
        return Err(Error::Parse(format!(
            "n = {} needs {} entries, found {}",
            m.n,
            m.n * m.n,
            m.entries.len()
        )));
    }
    Ok(m.entries.chunks(m.n).map(<[f64]>::to_vec).collect())
}

pub fn parse_matrix(content: &str, format: MatrixFormat) -> Result<Vec<Vec<f64>>> {
    match format {
        MatrixFormat::Text => parse_text(content),
        MatrixFormat::Json => parse_json(content),
    }
}

/// Reads a matrix file, detecting the format.
pub fn read_matrix_file(path: &Path) -> Result<Vec<Vec<f64>>> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&content, MatrixFormat::detect(path, &content))
}

/// 17 significant digits in scientific notation; valid in both formats.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_text(rows: &[Vec<f64>]) -> String {
    let mut out = format!("{}\n", rows.len());
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| format_f64(v)).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_json(rows: &[Vec<f64>]) -> String {
    let entries: Vec<String> = rows.iter().flatten().map(|&v| format_f64(v)).collect();
    format!("{{\"n\":{},\"entries\":[{}]}}\n", rows.len(), entries.join(","))
}

pub fn write_matrix(rows: &[Vec<f64>], format: MatrixFormat) -> String {
    match format {
        MatrixFormat::Text => write_text(rows),
        MatrixFormat::Json => write_json(rows),
    }
}
