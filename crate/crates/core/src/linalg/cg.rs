use crate::error::{Error, Result};
use crate::linalg::{IndexSet, SparseSpdMatrix};
use crate::DenseVector;

/// Default relative residual target for SPD solves.
pub const DEFAULT_CG_TOL: f64 = 1e-12;

/// Result of a preconditioned CG run, converged or not.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: DenseVector,
    pub iterations: usize,
    /// True residual `||b - A x|| / max(1, ||b||)` at exit.
    pub residual: f64,
    pub converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned CG on the principal submatrix of `a` obtained by
/// deleting the rows and columns flagged in `mask` (no deletion when `None`).
/// Masked entries of the solution are zero and masked entries of `b` are
/// ignored.
pub fn pcg_masked(
    a: &SparseSpdMatrix,
    mask: Option<&[bool]>,
    b: &DenseVector,
    tol: f64,
    max_iter: usize,
) -> CgOutcome {
    let n = a.dim();
    let none = vec![false; n];
    let mask = mask.unwrap_or(&none);
    let mut rhs: Vec<f64> = b.iter().copied().collect();
    for i in 0..n {
        if mask[i] {
            rhs[i] = 0.0;
        }
    }
    let scale = norm(&rhs).max(1.0);
    let target = tol * scale;
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .zip(mask)
        .map(|(&d, &m)| if m { 0.0 } else { 1.0 / d })
        .collect();

    let mut x = vec![0.0; n];
    let mut ax = vec![0.0; n];
    let mut iterations = 0;
    // A few restarts from the true residual guard against drift of the
    // recursively updated one.
    for _restart in 0..4 {
        a.mul_masked_into(mask, &x, &mut ax);
        let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
        if norm(&r) <= target {
            break;
        }
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![0.0; n];
        while iterations < max_iter {
            a.mul_masked_into(mask, &p, &mut ap);
            let pap = dot(&p, &ap);
            if pap <= 0.0 || !pap.is_finite() {
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            iterations += 1;
            if norm(&r) <= 0.5 * target {
                break;
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        if iterations >= max_iter {
            break;
        }
    }
    a.mul_masked_into(mask, &x, &mut ax);
    let res = norm(
        &rhs.iter()
            .zip(&ax)
            .map(|(b, ax)| b - ax)
            .collect::<Vec<_>>(),
    ) / scale;
    CgOutcome {
        x: DenseVector::from_vec(x),
        iterations,
        residual: res,
        converged: res <= tol,
    }
}

fn check_dim(a: &SparseSpdMatrix, b: &DenseVector) -> Result<()> {
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.len(),
        });
    }
    Ok(())
}

/// Solves `A x = b` to `||A x - b|| <= tol * max(1, ||b||)`.
pub fn cg_solve(
    a: &SparseSpdMatrix,
    b: &DenseVector,
    tol: f64,
    max_iter: usize,
) -> Result<DenseVector> {
    check_dim(a, b)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "CG tolerance {tol} must be positive"
        )));
    }
    let out = pcg_masked(a, None, b, tol, max_iter);
    if out.converged {
        Ok(out.x)
    } else {
        Err(Error::NotConverged {
            solver: "cg",
            iterations: max_iter,
            residual: out.residual,
        })
    }
}

/// Solves the system with rows and columns in `eliminated` removed.
///
/// Returns `z` with `z_i = 0` for `i` in `eliminated` and
/// `sum_{j not in N} A_ij z_j = b_i` for the remaining rows, i.e.
/// `A(N)^{-1} chi(N) b`.
pub fn reduced_solve(
    a: &SparseSpdMatrix,
    eliminated: &IndexSet,
    b: &DenseVector,
) -> Result<DenseVector> {
    reduced_solve_with(a, eliminated, b, DEFAULT_CG_TOL, 20 * a.dim() + 100)
}

pub fn reduced_solve_with(
    a: &SparseSpdMatrix,
    eliminated: &IndexSet,
    b: &DenseVector,
    tol: f64,
    max_iter: usize,
) -> Result<DenseVector> {
    check_dim(a, b)?;
    if eliminated.len() == a.dim() {
        return Ok(DenseVector::zeros(a.dim()));
    }
    let mask = eliminated.mask(a.dim());
    let out = pcg_masked(a, Some(&mask), b, tol, max_iter);
    if out.converged {
        Ok(out.x)
    } else {
        Err(Error::NotConverged {
            solver: "reduced cg",
            iterations: out.iterations,
            residual: out.residual,
        })
    }
}
