//! CSV reading and writing for matrices and vectors.
//!
//! One matrix row per line, entries separated by commas. Complex entries are
//! written `a+bi` / `a-bi` without spaces. Output uses the shortest decimal
//! representation that parses back to the identical double.

use std::fs;
use std::path::Path;

use super::matrix::{Matrix, Vector, C64};
use crate::error::{Error, Result};

fn parse_real(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    v.is_finite().then_some(v)
}

/// Parses one entry: `3`, `-2.5e-3`, `1+2i`, `1-2i`, `4i`, `-i`.
pub fn parse_scalar(field: &str) -> std::result::Result<C64, String> {
    let s = field.trim();
    if s.is_empty() {
        return Err("empty entry".into());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return parse_real(s).map(|v| C64::new(v, 0.0)).ok_or_else(|| format!("malformed number `{s}`"));
    };
    let bytes = body.as_bytes();
    // last sign that is not a leading sign and not part of an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im_val = match im {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        other => parse_real(other),
    };
    match (parse_real(re), im_val) {
        (Some(r), Some(i)) => Ok(C64::new(r, i)),
        _ => Err(format!("malformed complex literal `{s}`")),
    }
}

pub fn parse_matrix_str(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<C64>> = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate().map(|(k, l)| (k + 1, l)) {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(parse_scalar)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|msg| Error::Parse { line: lineno, msg })?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("ragged row: {} entries, expected {w}", row.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    let Some(cols) = width else {
        return Err(Error::Parse { line: 1, msg: "empty matrix file".into() });
    };
    let m = rows.len();
    Matrix::new(m, cols, rows.into_iter().flatten().collect())
}

/// Accepts a single row or a single column.
pub fn parse_vector_str(text: &str) -> Result<Vector> {
    let m = parse_matrix_str(text)?;
    if m.rows() == 1 {
        Ok(m.row(0))
    } else if m.cols() == 1 {
        Ok(m.col(0))
    } else {
        Err(Error::Parse { line: 1, msg: format!("expected a single row or column, got {}x{}", m.rows(), m.cols()) })
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn parse_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    parse_matrix_str(&read(path.as_ref())?)
}

pub fn parse_vector(path: impl AsRef<Path>) -> Result<Vector> {
    parse_vector_str(&read(path.as_ref())?)
}

pub fn format_real(v: f64) -> String {
    format!("{v:?}")
}

pub fn format_scalar(z: C64) -> String {
    if z.im == 0.0 {
        format_real(z.re)
    } else {
        let sign = if z.im.is_sign_negative() { '-' } else { '+' };
        format!("{}{}{}i", format_real(z.re), sign, format_real(z.im.abs()))
    }
}

pub fn format_matrix_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format_scalar(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Vectors are written as a single column.
pub fn format_vector_csv(v: &Vector) -> String {
    v.iter().map(|&z| format_scalar(z) + "\n").collect()
}
