//! One-dimensional piecewise linear objective `max{-a x, -b x, x - (1 + b)}`
//! on which the trust-region method with a purely local model converges to
//! the non-stationary point 0.

use crate::error::{Error, Result};
use crate::models::GradientBundle;
use crate::trcore::{HessianMode, RadiusRule, TrParams};
use crate::DenseVector;

use super::Problem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleParams {
    pub a: f64,
    pub b: f64,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        Self { a: 2.0, b: 1.0 }
    }
}

impl CounterexampleParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(0.0 < b && b < a && a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < b < a, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    /// `(b/a - 1) beta1 / (beta1 beta2 - 1) + b/a`.
    pub fn theta(&self, beta1: f64, beta2: f64) -> f64 {
        let r = self.b / self.a;
        (r - 1.0) * beta1 / (beta1 * beta2 - 1.0) + r
    }

    /// Slopes of the linear pieces, left to right.
    fn slopes(&self) -> [f64; 3] {
        [-self.a, -self.b, 1.0]
    }
}

pub fn counterexample_f(p: &CounterexampleParams, x: f64) -> f64 {
    (-p.a * x).max(-p.b * x).max(x - (1.0 + p.b))
}

/// Parameters of the local-model reproduction: `a = 2, b = 1`,
/// `beta1 = 0.4, beta2 = 1.2, eta1 = 0.9, eta2 = 0.95`, `delta0 = 1.3`,
/// `delta_min = 2`, `H = 0` and the unfloored radius rule.
pub fn counterexample_tr_params() -> TrParams {
    TrParams {
        delta_min: 2.0,
        eta1: 0.9,
        eta2: 0.95,
        beta1: 0.4,
        beta2: 1.2,
        delta0: 1.3,
        max_iter: 40,
        hessian: HessianMode::Zero,
        radius_rule: RadiusRule::Unfloored,
        ..TrParams::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterexampleModel {
    /// Clarke subdifferential at `x`, independent of the radius.
    Local,
    /// Slopes of every piece meeting `[x - delta, x + delta]`.
    Neighborhood,
}

#[derive(Debug, Clone)]
pub struct CounterexampleProblem {
    pub params: CounterexampleParams,
    pub model: CounterexampleModel,
}

impl CounterexampleProblem {
    pub fn new(params: CounterexampleParams, model: CounterexampleModel) -> Self {
        Self { params, model }
    }

    fn slopes_on(&self, lo: f64, hi: f64) -> Vec<f64> {
        let [s1, s2, s3] = self.params.slopes();
        let mut out = Vec::with_capacity(3);
        if lo <= 0.0 {
            out.push(s1);
        }
        if lo <= 1.0 && hi >= 0.0 {
            out.push(s2);
        }
        if hi >= 1.0 {
            out.push(s3);
        }
        out
    }
}

impl Problem for CounterexampleProblem {
    fn dim(&self) -> usize {
        1
    }

    fn value(&mut self, x: &DenseVector) -> Result<f64> {
        Ok(counterexample_f(&self.params, x[0]))
    }

    /// Slope of the piece to the right of a kink, of the active piece
    /// elsewhere.
    fn subgradient(&mut self, x: &DenseVector) -> Result<DenseVector> {
        let [s1, s2, s3] = self.params.slopes();
        let s = if x[0] < 0.0 {
            s1
        } else if x[0] < 1.0 {
            s2
        } else {
            s3
        };
        Ok(DenseVector::from_element(1, s))
    }

    fn bundle(&mut self, x: &DenseVector, delta: f64) -> Result<GradientBundle> {
        let slopes = match self.model {
            CounterexampleModel::Local => self.slopes_on(x[0], x[0]),
            CounterexampleModel::Neighborhood => self.slopes_on(x[0] - delta, x[0] + delta),
        };
        GradientBundle::new(
            slopes
                .into_iter()
                .map(|s| DenseVector::from_element(1, s))
                .collect(),
        )
    }
}

/// Closed-form iterate of the local-model run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceIterate {
    pub x: f64,
    pub delta: f64,
    pub rho: f64,
}

/// `x_{2k} = (b1 b2)^k x0`, `x_{2k+1} = x_{2k}`, `delta_{2k} = (b1 b2)^k delta0`,
/// `delta_{2k+1} = b1 (b1 b2)^k delta0`, `rho_{2k} = theta`, `rho_{2k+1} = 1`,
/// for `k = 0..=k_max` (indices of the full sequence).
///
/// Requires `b1 + b1 b2 < 1`, `eta1 >= theta`, `x0` in
/// `((1 + (b1 b2 - 1)/b1)^{-1}, 0)` and `delta0 = (b1 b2 - 1)/b1 x0 < delta_min`.
pub fn counterexample_reference_iterates(
    p: &CounterexampleParams,
    tr: &TrParams,
    x0: f64,
    k_max: usize,
) -> Result<Vec<ReferenceIterate>> {
    let (b1, b2) = (tr.beta1, tr.beta2);
    let fail = |m: String| Err(Error::PreconditionViolated(m));
    if !(b1 + b1 * b2 < 1.0) {
        return fail(format!(
            "beta1 + beta1*beta2 = {} must be < 1",
            b1 + b1 * b2
        ));
    }
    let theta = p.theta(b1, b2);
    if !(tr.eta1 >= theta) {
        return fail(format!("eta1 = {} must be >= theta = {theta}", tr.eta1));
    }
    let c = (b1 * b2 - 1.0) / b1;
    let lower = 1.0 / (1.0 + c);
    if !(lower < x0 && x0 < 0.0) {
        return fail(format!("x0 = {x0} must lie in ({lower}, 0)"));
    }
    let delta0 = c * x0;
    if (tr.delta0 - delta0).abs() > 1e-12 * delta0.abs() {
        return fail(format!(
            "delta0 = {} must equal (b1 b2 - 1)/b1 x0 = {delta0}",
            tr.delta0
        ));
    }
    if !(delta0 < tr.delta_min) {
        return fail(format!(
            "delta0 = {delta0} must be < delta_min = {}",
            tr.delta_min
        ));
    }
    Ok((0..=k_max)
        .map(|k| {
            let r = (b1 * b2).powi((k / 2) as i32);
            if k % 2 == 0 {
                ReferenceIterate {
                    x: r * x0,
                    delta: r * tr.delta0,
                    rho: theta,
                }
            } else {
                ReferenceIterate {
                    x: r * x0,
                    delta: b1 * r * tr.delta0,
                    rho: 1.0,
                }
            }
        })
        .collect())
}
