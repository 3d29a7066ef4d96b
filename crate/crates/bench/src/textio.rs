//! Plain-text matrices and vectors.
//!
//! The first non-comment line is `rows cols field` with `field` one of
//! `real` or `complex`. Entries follow in row-major order, whitespace
//! separated; a complex entry is two numbers, real then imaginary. Lines
//! starting with `#` are ignored. A vector is a one-column matrix.

use std::fmt::Write as _;
use std::path::Path;

use amop::{Complex64, DenseMatrix};

use crate::error::{BenchError, Result};
use crate::table::format_g9;

/// A matrix read from text, in the field it was written in.
#[derive(Debug, Clone, PartialEq)]
pub enum TextMatrix {
    Real(DenseMatrix<f64>),
    Complex(DenseMatrix<Complex64>),
}

impl TextMatrix {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Self::Real(a) => (a.rows(), a.cols()),
            Self::Complex(a) => (a.rows(), a.cols()),
        }
    }

    /// Complex view; real data is widened.
    pub fn into_complex(self) -> DenseMatrix<Complex64> {
        match self {
            Self::Complex(a) => a,
            Self::Real(a) => {
                let data = a.as_col_major().iter().map(|&v| Complex64::new(v, 0.0)).collect();
                DenseMatrix::from_col_major(a.rows(), a.cols(), data).expect("same shape")
            }
        }
    }
}

pub fn parse_matrix(text: &str) -> Result<TextMatrix> {
    let mut tokens = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace);
    let bad = |msg: String| BenchError::spec(msg);
    let mut dim = |what: &str| -> Result<usize> {
        let tok = tokens.next().ok_or_else(|| bad(format!("missing {what} in header")))?;
        tok.parse().map_err(|_| bad(format!("{what} must be a nonnegative integer, got {tok:?}")))
    };
    let rows = dim("row count")?;
    let cols = dim("column count")?;
    let field = tokens.next().ok_or_else(|| bad("missing field in header".into()))?;
    let per_entry = match field {
        "real" => 1,
        "complex" => 2,
        other => return Err(bad(format!("field must be real or complex, got {other:?}"))),
    };
    let values: Vec<f64> = tokens
        .map(|t| t.parse::<f64>().map_err(|_| bad(format!("not a number: {t:?}"))))
        .collect::<Result<_>>()?;
    let want = rows * cols * per_entry;
    if values.len() != want {
        return Err(bad(format!("expected {want} numbers for a {rows}x{cols} {field} matrix, got {}", values.len())));
    }
    if per_entry == 1 {
        Ok(TextMatrix::Real(DenseMatrix::from_row_major(rows, cols, &values).map_err(|e| bad(e.to_string()))?))
    } else {
        let z: Vec<Complex64> = values.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        Ok(TextMatrix::Complex(DenseMatrix::from_row_major(rows, cols, &z).map_err(|e| bad(e.to_string()))?))
    }
}

pub fn read_matrix(path: &Path) -> Result<TextMatrix> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_matrix(&text).map_err(|e| match e {
        BenchError::Spec(msg) => BenchError::Spec(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn format_real(a: &DenseMatrix<f64>) -> String {
    let mut out = format!("{} {} real\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|j| format_g17(a.get(i, j))).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn format_complex(a: &DenseMatrix<Complex64>) -> String {
    let mut out = format!("{} {} complex\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = (0..a.cols())
            .map(|j| {
                let z = a.get(i, j);
                format!("{} {}", format_g17(z.re), format_g17(z.im))
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Shortest representation that round-trips exactly.
fn format_g17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        format_g9(x)
    }
}
