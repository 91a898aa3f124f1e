use crate::{DenseMatrix, DenseVector};

const CURVATURE_SKIP: f64 = 1e-8;
const NORM_SLACK: f64 = 1.01;

const LANCZOS_STEPS: usize = 40;

/// Upper estimate of the spectral norm of a symmetric matrix: the largest
/// Ritz value of a short Lanczos run plus its residual, inflated by 1%,
/// capped by the Frobenius norm.
pub fn spectral_norm_estimate(h: &DenseMatrix) -> f64 {
    let n = h.nrows();
    if n == 0 {
        return 0.0;
    }
    let fro = h.norm();
    if fro == 0.0 {
        return 0.0;
    }
    if n == 1 {
        return h[(0, 0)].abs();
    }
    let steps = LANCZOS_STEPS.min(n);
    let mut basis: Vec<DenseVector> = Vec::with_capacity(steps);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let mut v = DenseVector::from_fn(n, |i, _| 1.0 + 0.1 * ((i * 7919 % 97) as f64 / 97.0));
    v /= v.norm();
    for _ in 0..steps {
        let mut w = h * &v;
        let a = v.dot(&w);
        // Full reorthogonalization, twice.
        for _ in 0..2 {
            for b in basis.iter().chain(std::iter::once(&v)) {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        alpha.push(a);
        basis.push(v);
        let bn = w.norm();
        beta.push(bn);
        if bn <= 1e-12 * fro {
            break;
        }
        v = w / bn;
    }
    let k = alpha.len();
    let t = DenseMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    // Both ends of the spectrum; `|H|` is the larger magnitude.
    let mut best: f64 = 0.0;
    for (idx, theta) in eig.eigenvalues.iter().enumerate() {
        let resid = (beta[k - 1] * eig.eigenvectors[(k - 1, idx)]).abs();
        best = best.max(theta.abs() + resid);
    }
    (best * NORM_SLACK).min(fro)
}

/// BFGS update of `H` with the pair `(s, y_diff)`.
///
/// Skipped when `<s, y> <= 1e-8 |s||y|`. When the norm estimate of the
/// result exceeds `c_h` the whole matrix is scaled by `c_h / estimate`.
pub fn hessian_update(
    h: &DenseMatrix,
    s: &DenseVector,
    y_diff: &DenseVector,
    c_h: f64,
) -> DenseMatrix {
    let mut qn = QuasiNewton::bfgs_from(h.clone());
    qn.update(s, y_diff, c_h);
    qn.h
}

/// `H` together with its inverse (kept by rank-two updates so the dogleg
/// Newton point costs one matrix-vector product) and cached norm estimate.
#[derive(Debug, Clone)]
pub(crate) struct QuasiNewton {
    pub h: DenseMatrix,
    pub h_inv: Option<DenseMatrix>,
    pub norm: f64,
    /// `H_0 = I` is replaced by `(y'y / s'y) I` at the first accepted pair.
    rescale_first: bool,
}

impl QuasiNewton {
    pub fn identity(n: usize) -> Self {
        Self {
            h: DenseMatrix::identity(n, n),
            h_inv: Some(DenseMatrix::identity(n, n)),
            norm: 1.0,
            rescale_first: true,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            h: DenseMatrix::zeros(n, n),
            h_inv: None,
            norm: 0.0,
            rescale_first: false,
        }
    }

    fn bfgs_from(h: DenseMatrix) -> Self {
        let h_inv = h.clone().cholesky().map(|c| c.inverse());
        let norm = spectral_norm_estimate(&h);
        Self {
            h,
            h_inv,
            norm,
            rescale_first: false,
        }
    }

    /// `-H^{-1} g` when the inverse is tracked.
    pub fn newton_point(&self, g: &DenseVector) -> Option<DenseVector> {
        self.h_inv.as_ref().map(|b| -(b * g))
    }

    /// Returns `false` when the pair was skipped.
    pub fn update(&mut self, s: &DenseVector, y: &DenseVector, c_h: f64) -> bool {
        let sy = s.dot(y);
        if sy <= CURVATURE_SKIP * s.norm() * y.norm() {
            return false;
        }
        if std::mem::take(&mut self.rescale_first) {
            let gamma = y.dot(y) / sy;
            let n = s.len();
            self.h = DenseMatrix::identity(n, n) * gamma;
            self.h_inv = Some(DenseMatrix::identity(n, n) / gamma);
        }
        let hs = &self.h * s;
        let shs = s.dot(&hs);
        if !(shs > 0.0) {
            return false;
        }
        self.h.ger(-1.0 / shs, &hs, &hs, 1.0);
        self.h.ger(1.0 / sy, y, y, 1.0);
        // Symmetrize against rounding drift.
        self.h = (&self.h + self.h.transpose()) * 0.5;

        if let Some(b) = self.h_inv.as_mut() {
            let by = &*b * y;
            let yby = y.dot(&by);
            let r = 1.0 / sy;
            b.ger(-r, s, &by, 1.0);
            b.ger(-r, &by, s, 1.0);
            b.ger(r * r * yby + r, s, s, 1.0);
            *b = (&*b + b.transpose()) * 0.5;
        }

        self.norm = spectral_norm_estimate(&self.h);
        if self.norm > c_h {
            let scale = c_h / self.norm;
            self.h *= scale;
            if let Some(b) = self.h_inv.as_mut() {
                *b /= scale;
            }
            self.norm = c_h;
        }
        true
    }
}
