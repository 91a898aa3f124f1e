use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SparseSpdMatrix;

/// Parses a `%%MatrixMarket matrix coordinate real symmetric` document.
///
/// Entries are 1-based and hold the lower triangle; they are mirrored.
pub fn parse_matrix_market(text: &str) -> Result<SparseSpdMatrix> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MatrixMarket("empty input".into()))?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(Error::MatrixMarket(format!("bad header line: {header:?}")));
    }
    if tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(Error::MatrixMarket(
            "only 'matrix coordinate' is supported".into(),
        ));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(Error::MatrixMarket(format!(
            "unsupported field '{}'",
            tokens[3]
        )));
    }
    if tokens[4] != "symmetric" {
        return Err(Error::MatrixMarket(format!(
            "unsupported symmetry '{}', expected 'symmetric'",
            tokens[4]
        )));
    }

    let mut body = lines
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size = body
        .next()
        .ok_or_else(|| Error::MatrixMarket("missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::MatrixMarket(format!("size line {size:?}: {e}")))?;
    if dims.len() != 3 {
        return Err(Error::MatrixMarket(format!(
            "size line {size:?} needs 3 fields"
        )));
    }
    let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
    if rows != cols {
        return Err(Error::MatrixMarket(format!(
            "matrix is {rows}x{cols}, not square"
        )));
    }

    let mut lower = Vec::with_capacity(nnz);
    for line in body {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::MatrixMarket(format!("bad entry line {line:?}")));
        }
        let parse_idx = |s: &str| -> Result<usize> {
            let v: usize = s
                .parse()
                .map_err(|e| Error::MatrixMarket(format!("index {s:?}: {e}")))?;
            if v == 0 || v > rows {
                return Err(Error::MatrixMarket(format!(
                    "index {v} out of range 1..={rows}"
                )));
            }
            Ok(v - 1)
        };
        let (i, j) = (parse_idx(f[0])?, parse_idx(f[1])?);
        let v: f64 = f[2]
            .parse()
            .map_err(|e| Error::MatrixMarket(format!("value {:?}: {e}", f[2])))?;
        // Some writers emit the upper triangle; either is accepted.
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        lower.push((i, j, v));
    }
    if lower.len() != nnz {
        return Err(Error::MatrixMarket(format!(
            "expected {nnz} entries, found {}",
            lower.len()
        )));
    }
    SparseSpdMatrix::from_lower_triplets(rows, &lower)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseSpdMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MatrixMarket(format!("{}: {e}", path.display())))?;
    parse_matrix_market(&text)
}
