use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::spectral::{spectral_bounds, SpectralBounds, DEFAULT_SPECTRAL_TOL};
use crate::{DenseMatrix, DenseVector};

/// Symmetric positive definite matrix in compressed sparse row layout.
///
/// Both triangles are stored, so row `i` lists every nonzero `A[i, j]`.
/// Positive definiteness is asserted, not checked: every solve against the
/// matrix either converges or reports [`Error::NotConverged`].
#[derive(Debug)]
pub struct SparseSpdMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    diag: Vec<f64>,
    bounds: OnceLock<SpectralBounds>,
}

impl Clone for SparseSpdMatrix {
    fn clone(&self) -> Self {
        let bounds = OnceLock::new();
        if let Some(b) = self.bounds.get() {
            let _ = bounds.set(*b);
        }
        Self {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.clone(),
            diag: self.diag.clone(),
            bounds,
        }
    }
}

impl SparseSpdMatrix {
    /// Builds the matrix from `(row, col, value)` triplets covering both
    /// triangles. Duplicates are summed; the result must be symmetric.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "entry ({i}, {j}) out of range for dimension {n}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "entry ({i}, {j}) is not finite"
                )));
            }
            rows[i].push((j, v));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows.iter_mut() {
            row.sort_by_key(|&(j, _)| j);
            let mut last: Option<usize> = None;
            for &(j, v) in row.iter() {
                if last == Some(j) {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                    last = Some(j);
                }
            }
            row_ptr.push(col_idx.len());
        }
        let mut diag = vec![0.0; n];
        for (i, d) in diag.iter_mut().enumerate() {
            for k in row_ptr[i]..row_ptr[i + 1] {
                if col_idx[k] == i {
                    *d = values[k];
                }
            }
        }
        let m = Self {
            n,
            row_ptr,
            col_idx,
            values,
            diag,
            bounds: OnceLock::new(),
        };
        m.check_symmetric()?;
        if let Some(i) = m.diag.iter().position(|&d| d <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "diagonal entry {i} is not positive; matrix cannot be SPD"
            )));
        }
        Ok(m)
    }

    /// Builds the matrix from lower-triangle triplets (`row >= col`),
    /// mirroring the off-diagonal entries.
    pub fn from_lower_triplets(n: usize, lower: &[(usize, usize, f64)]) -> Result<Self> {
        let mut full = Vec::with_capacity(2 * lower.len());
        for &(i, j, v) in lower {
            if j > i {
                return Err(Error::InvalidParameter(format!(
                    "entry ({i}, {j}) is above the diagonal"
                )));
            }
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        Self::from_triplets(n, &full)
    }

    /// Dense input, symmetric up to exact equality.
    pub fn from_dense(a: &DenseMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        let n = a.nrows();
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if a[(i, j)] != 0.0 {
                    t.push((i, j, a[(i, j)]));
                }
            }
        }
        Self::from_triplets(n, &t)
    }

    pub fn diagonal_matrix(diag: &[f64]) -> Result<Self> {
        let t: Vec<_> = diag.iter().enumerate().map(|(i, &d)| (i, i, d)).collect();
        Self::from_triplets(diag.len(), &t)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal_matrix(&vec![1.0; n]).expect("identity is SPD")
    }

    fn check_symmetric(&self) -> Result<()> {
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                if self.get(j, i) != self.values[k] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match cols.binary_search(&j) {
            Ok(k) => self.values[self.row_ptr[i] + k],
            Err(_) => 0.0,
        }
    }

    /// Nonzeros of row `i` as `(col, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &DenseVector) -> DenseVector {
        let mut y = DenseVector::zeros(self.n);
        self.mul_into(x.as_slice(), y.as_mut_slice());
        y
    }

    pub(crate) fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    /// Product with the matrix whose rows and columns in `mask` are removed;
    /// masked output entries are zero.
    pub(crate) fn mul_masked_into(&self, mask: &[bool], x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            if mask[i] {
                *yi = 0.0;
                continue;
            }
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                if !mask[j] {
                    s += self.values[k] * x[j];
                }
            }
            *yi = s;
        }
    }

    /// Maximum absolute row sum, an upper bound on every eigenvalue.
    pub fn gershgorin_upper(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                a[(i, j)] = v;
            }
        }
        a
    }

    /// Spectral bounds computed once at the default tolerance and cached.
    pub fn cached_bounds(&self) -> Result<SpectralBounds> {
        if let Some(b) = self.bounds.get() {
            return Ok(*b);
        }
        let b = spectral_bounds(self, DEFAULT_SPECTRAL_TOL)?;
        let _ = self.bounds.set(b);
        Ok(*self.bounds.get().unwrap())
    }

    /// Installs externally certified bounds (e.g. analytic eigenvalues).
    pub fn with_bounds(self, bounds: SpectralBounds) -> Result<Self> {
        if !(bounds.lambda_min_lower > 0.0 && bounds.lambda_min_lower <= bounds.lambda_max_upper) {
            return Err(Error::InvalidParameter(format!(
                "invalid spectral bounds {bounds:?}"
            )));
        }
        let _ = self.bounds.set(bounds);
        Ok(self)
    }
}
