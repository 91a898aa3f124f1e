use crate::error::{Error, Result};
use crate::linalg::cg::pcg_masked;
use crate::linalg::SparseSpdMatrix;
use crate::DenseVector;

/// Default convergence tolerance; the bounds are widened by `10 * tol`,
/// i.e. 1%.
pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-3;

/// Enclosure `[lambda_min_lower, lambda_max_upper]` of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBounds {
    pub lambda_min_lower: f64,
    pub lambda_max_upper: f64,
}

impl SpectralBounds {
    /// Exact extreme eigenvalues widened by the relative slack.
    pub fn widened(lambda_min: f64, lambda_max: f64, slack: f64) -> Self {
        Self {
            lambda_min_lower: lambda_min * (1.0 - slack),
            lambda_max_upper: lambda_max * (1.0 + slack),
        }
    }
}

fn start_vector(n: usize) -> DenseVector {
    // xorshift64*, fixed seed: bounds are reproducible run to run.
    let mut s: u64 = 0x9E37_79B9_7F4A_7C15;
    let v = DenseVector::from_fn(n, |_, _| {
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        let r = s.wrapping_mul(0x2545_F491_4F6C_DD1D);
        (r >> 11) as f64 / (1u64 << 53) as f64 + 0.5
    });
    let nrm = v.norm();
    v / nrm
}

fn residual(a: &SparseSpdMatrix, v: &DenseVector) -> (f64, f64) {
    let av = a.mul_vec(v);
    let theta = v.dot(&av);
    ((av - v * theta).norm(), theta)
}

/// Certified-by-slack bounds on the extreme eigenvalues of `a`.
///
/// `lambda_max` comes from power iteration and `lambda_min` from inverse
/// power iteration with CG inner solves; both Rayleigh quotients are
/// iterated until the eigen-residual drops below `tol * theta` and then
/// widened by `10 * tol` so that `lambda_min_lower <= lambda_min(A)` and
/// `lambda_max_upper >= lambda_max(A)`.
pub fn spectral_bounds(a: &SparseSpdMatrix, tol: f64) -> Result<SpectralBounds> {
    if !(tol > 0.0 && tol < 0.05) {
        return Err(Error::InvalidParameter(format!(
            "spectral tolerance {tol} must lie in (0, 0.05)"
        )));
    }
    let n = a.dim();
    let slack = 10.0 * tol;
    if n == 1 {
        let d = a.get(0, 0);
        return Ok(SpectralBounds::widened(d, d, slack));
    }
    let max_iter = (50 * n).max(5000);

    let mut v = start_vector(n);
    let mut converged = false;
    let mut res = f64::INFINITY;
    let mut it = 0;
    while it < max_iter {
        let w = a.mul_vec(&v);
        let nrm = w.norm();
        v = w / nrm;
        it += 1;
        if it % 4 == 0 {
            let (r, theta) = residual(a, &v);
            res = r / theta;
            if res <= tol {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            solver: "power iteration",
            iterations: it,
            residual: res,
        });
    }
    let (_, lmax) = residual(a, &v);

    let mut v = start_vector(n);
    let mut converged = false;
    let max_inner = 20 * n + 100;
    let mut it = 0;
    while it < max_iter {
        let out = pcg_masked(a, None, &v, 1e-10, max_inner);
        if !out.converged {
            return Err(Error::NotConverged {
                solver: "inverse iteration (cg)",
                iterations: out.iterations,
                residual: out.residual,
            });
        }
        let nrm = out.x.norm();
        v = out.x / nrm;
        it += 1;
        let (r, theta) = residual(a, &v);
        res = r / theta;
        if res <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            solver: "inverse iteration",
            iterations: it,
            residual: res,
        });
    }
    let (_, lmin) = residual(a, &v);
    Ok(SpectralBounds::widened(lmin, lmax, slack))
}
