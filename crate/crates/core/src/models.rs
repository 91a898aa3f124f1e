//! Max-of-linear model functions over finite gradient bundles.
//!
//! For a bundle `{g_1, ..., g_m}` the model is `phi(d) = max_j <g_j, d>`.
//! Its stationarity measure `psi = -min_{|d| <= 1} phi(d)` equals the
//! distance from the origin to the convex hull of the bundle, which is
//! computed with Wolfe's min-norm-point algorithm.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::IndexSet;
use crate::{DenseMatrix, DenseVector};

/// Relative threshold under which two gradients are considered equal.
pub const DEDUP_TOL: f64 = 1e-12;
/// Relative optimality gap at which the min-norm-point iteration stops.
pub const MIN_NORM_TOL: f64 = 1e-12;
/// `psi` below this value is treated as exactly zero.
pub const PSI_ZERO: f64 = 1e-14;

/// Non-empty finite set of gradients generating a model function.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientBundle {
    gradients: Vec<DenseVector>,
    provenance: Vec<Option<IndexSet>>,
}

impl GradientBundle {
    pub fn new(gradients: Vec<DenseVector>) -> Result<Self> {
        let n = gradients.len();
        Self::with_provenance(gradients, vec![None; n])
    }

    /// Builds a bundle, dropping near-duplicates (the first occurrence and its
    /// provenance are kept).
    pub fn with_provenance(
        gradients: Vec<DenseVector>,
        provenance: Vec<Option<IndexSet>>,
    ) -> Result<Self> {
        if gradients.is_empty() {
            return Err(Error::InvalidParameter(
                "gradient bundle must be non-empty".into(),
            ));
        }
        if provenance.len() != gradients.len() {
            return Err(Error::DimensionMismatch {
                expected: gradients.len(),
                found: provenance.len(),
            });
        }
        let dim = gradients[0].len();
        let mut kept: Vec<DenseVector> = Vec::with_capacity(gradients.len());
        let mut prov = Vec::with_capacity(gradients.len());
        for (g, p) in gradients.into_iter().zip(provenance) {
            if g.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.len(),
                });
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(
                    "gradient has non-finite entries".into(),
                ));
            }
            let dup = kept
                .iter()
                .any(|k| (k - &g).amax() <= DEDUP_TOL * k.amax().max(1.0));
            if !dup {
                kept.push(g);
                prov.push(p);
            }
        }
        Ok(Self {
            gradients: kept,
            provenance: prov,
        })
    }

    pub fn singleton(g: DenseVector) -> Self {
        Self::new(vec![g]).expect("single finite gradient")
    }

    pub fn len(&self) -> usize {
        self.gradients.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.gradients[0].len()
    }

    pub fn gradients(&self) -> &[DenseVector] {
        &self.gradients
    }

    pub fn provenance(&self) -> &[Option<IndexSet>] {
        &self.provenance
    }
}

/// `phi(d) = max_j <g_j, d>`.
pub fn phi_eval(bundle: &GradientBundle, d: &DenseVector) -> f64 {
    bundle
        .gradients
        .iter()
        .map(|g| g.dot(d))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Stationarity measure and the associated steepest-descent direction.
#[derive(Debug, Clone)]
pub struct Stationarity {
    pub psi: f64,
    /// `-gbar / |gbar|`, or zero when `psi` vanishes.
    pub d_star: DenseVector,
    /// Min-norm point `gbar` of the convex hull.
    pub min_norm_point: DenseVector,
    /// Convex weights of `gbar` over the bundle.
    pub weights: Vec<f64>,
}

/// `psi = -min_{|d|<=1} phi(d) = dist(0, conv bundle)`.
pub fn stationarity_measure(bundle: &GradientBundle) -> Result<Stationarity> {
    let (point, weights) = min_norm_point(bundle.gradients())?;
    let psi = point.norm();
    let d_star = if psi <= PSI_ZERO {
        DenseVector::zeros(point.len())
    } else {
        -&point / psi
    };
    Ok(Stationarity {
        psi: if psi <= PSI_ZERO { 0.0 } else { psi },
        d_star,
        min_norm_point: point,
        weights,
    })
}

/// Minimizes `|sum_i a_i p_i|^2` subject to `sum_i a_i = 1` over the affine
/// hull of the selected points.
fn affine_minimizer(points: &[DenseVector], corral: &[usize], scale: f64) -> Vec<f64> {
    let k = corral.len();
    if k == 1 {
        return vec![1.0];
    }
    let mut kkt = DMatrix::<f64>::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in a..k {
            let v = points[corral[a]].dot(&points[corral[b]]) / scale;
            kkt[(a, b)] = v;
            kkt[(b, a)] = v;
        }
        kkt[(a, k)] = 1.0;
        kkt[(k, a)] = 1.0;
    }
    let mut rhs = nalgebra::DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = kkt
        .clone()
        .full_piv_lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .or_else(|| kkt.svd(true, true).solve(&rhs, 1e-14).ok())
        .unwrap_or_else(|| {
            let mut s = nalgebra::DVector::zeros(k + 1);
            s[0] = 1.0;
            s
        });
    sol.rows(0, k).iter().copied().collect()
}

/// Wolfe's algorithm for the min-norm point of `conv(points)`.
///
/// Returns the point and its convex weights (one per input point). The
/// linear minimization oracle breaks ties by lowest index; the iteration cap
/// is `10 * (points + dimension)` major cycles.
pub fn min_norm_point(points: &[DenseVector]) -> Result<(DenseVector, Vec<f64>)> {
    let m = points.len();
    if m == 0 {
        return Err(Error::InvalidParameter(
            "min-norm point of an empty set".into(),
        ));
    }
    let n = points[0].len();
    let scale = points.iter().map(|p| p.norm_squared()).fold(0.0, f64::max);
    if scale == 0.0 {
        let mut w = vec![0.0; m];
        w[0] = 1.0;
        return Ok((DenseVector::zeros(n), w));
    }

    let argmin = |f: &dyn Fn(&DenseVector) -> f64| -> (usize, f64) {
        let mut best = (0, f(&points[0]));
        for (i, p) in points.iter().enumerate().skip(1) {
            let v = f(p);
            if v < best.1 {
                best = (i, v);
            }
        }
        best
    };

    let (j0, _) = argmin(&|p| p.norm_squared());
    let mut corral = vec![j0];
    let mut lambda = vec![1.0];
    let mut x = points[j0].clone();
    let cap = 10 * (m + n);
    let tiny = 1e-15;

    for _major in 0..cap {
        let (j, val) = argmin(&|p| x.dot(p));
        if x.norm_squared() - val <= MIN_NORM_TOL * scale || corral.contains(&j) {
            let mut w = vec![0.0; m];
            for (&c, &l) in corral.iter().zip(&lambda) {
                w[c] += l;
            }
            return Ok((x, w));
        }
        corral.push(j);
        lambda.push(0.0);

        for _minor in 0..=corral.len() {
            let alpha = affine_minimizer(points, &corral, scale);
            if alpha.iter().all(|&a| a > tiny) {
                lambda = alpha;
                break;
            }
            // Move from lambda towards alpha until a weight hits zero.
            let mut theta = 1.0;
            let mut drop = None;
            for (i, (&l, &a)) in lambda.iter().zip(&alpha).enumerate() {
                if a <= tiny {
                    let den = l - a;
                    let t = if den > 0.0 { (l / den).min(1.0) } else { 0.0 };
                    if drop.is_none() || t < theta {
                        theta = t;
                        drop = Some(i);
                    }
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            if let Some(i) = drop {
                lambda[i] = 0.0;
            }
            let mut k = 0;
            while k < corral.len() {
                if lambda[k] <= tiny {
                    corral.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            let s: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= s);
        }
        x = DenseVector::zeros(n);
        for (&c, &l) in corral.iter().zip(&lambda) {
            x.axpy(l, &points[c], 1.0);
        }
    }
    Err(Error::NotConverged {
        solver: "min-norm point",
        iterations: cap,
        residual: x.norm(),
    })
}

/// Output of the Cauchy step for the modified subproblem.
#[derive(Debug, Clone)]
pub struct ModifiedStep {
    pub d: DenseVector,
    /// `phi(d)`, feasible for the epigraph constraints `<g_j, d> <= zeta`.
    pub zeta: f64,
    /// Offset-free model value `zeta + d'Hd/2` (the caller adds `f(x)`).
    pub model_value: f64,
    pub psi: f64,
    pub step_length: f64,
}

/// Cauchy point of `min phi(d) + d'Hd/2, |d| <= delta` along the
/// steepest-descent direction of the bundle model.
///
/// With `kappa = d*' H d*` the step length is `delta` when `kappa <= 0` and
/// `min(delta, psi/kappa)` otherwise. The resulting decrease
/// `-zeta - d'Hd/2` is at least `psi/2 * min(delta, psi/|H|)`.
pub fn modified_cauchy_step(
    bundle: &GradientBundle,
    h: &DenseMatrix,
    delta: f64,
    mu: f64,
) -> Result<ModifiedStep> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius {delta} must be positive"
        )));
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "mu {mu} must lie in (0, 1]"
        )));
    }
    if h.nrows() != bundle.dim() || h.ncols() != bundle.dim() {
        return Err(Error::DimensionMismatch {
            expected: bundle.dim(),
            found: h.nrows(),
        });
    }
    let st = stationarity_measure(bundle)?;
    cauchy_from_stationarity(bundle, &st, h, delta)
}

pub(crate) fn cauchy_from_stationarity(
    bundle: &GradientBundle,
    st: &Stationarity,
    h: &DenseMatrix,
    delta: f64,
) -> Result<ModifiedStep> {
    if st.psi == 0.0 {
        return Ok(ModifiedStep {
            d: DenseVector::zeros(bundle.dim()),
            zeta: 0.0,
            model_value: 0.0,
            psi: 0.0,
            step_length: 0.0,
        });
    }
    let hd = h * &st.d_star;
    let kappa = st.d_star.dot(&hd);
    let t = if kappa <= 0.0 {
        delta
    } else {
        delta.min(st.psi / kappa)
    };
    let d = &st.d_star * t;
    let zeta = phi_eval(bundle, &d);
    let model_value = zeta + 0.5 * t * t * kappa;
    Ok(ModifiedStep {
        d,
        zeta,
        model_value,
        psi: st.psi,
        step_length: t,
    })
}

/// Local model `max_{g in clarke set} <g, d>`, independent of the radius.
///
/// Used only to reproduce the failure of purely local models; the radius
/// argument of [`LocalMaxModel::phi`] and [`LocalMaxModel::stationarity`] is
/// accepted and ignored.
#[derive(Debug, Clone)]
pub struct LocalMaxModel {
    clarke_set: GradientBundle,
}

impl LocalMaxModel {
    pub fn new(clarke_set: GradientBundle) -> Self {
        Self { clarke_set }
    }

    pub fn phi(&self, _delta: f64, d: &DenseVector) -> f64 {
        phi_eval(&self.clarke_set, d)
    }

    pub fn stationarity(&self, _delta: f64) -> Result<Stationarity> {
        stationarity_measure(&self.clarke_set)
    }

    pub fn bundle(&self) -> &GradientBundle {
        &self.clarke_set
    }
}

/// Returns the local max-model generated by a finite Clarke set.
pub fn local_max_model(clarke_set: GradientBundle) -> LocalMaxModel {
    LocalMaxModel::new(clarke_set)
}
