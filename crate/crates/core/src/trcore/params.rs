use crate::error::{Error, Result};

/// How the radius reacts to accepted steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusRule {
    /// `max{delta_min, delta}` / `max{delta_min, beta2 delta}` after success.
    Floored,
    /// `delta` / `beta2 delta` after success, no lower floor. Reproduces the
    /// classical iteration that the local-model counterexample relies on.
    Unfloored,
}

/// Second-order term of the trust-region models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HessianMode {
    /// BFGS, `H_0 = I`, updated on successful steps.
    Bfgs,
    /// `H_k = 0` throughout.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrParams {
    pub delta_min: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub mu: f64,
    pub delta0: f64,
    pub max_iter: usize,
    /// Stop when the modified branch is active and `min{|g|, psi} <= tol`.
    pub tol_stationarity: f64,
    /// Stop when both the relative step and the radius fall below this.
    pub tol_step: f64,
    /// The stationarity stop additionally needs `delta <= delta_stationary`;
    /// `psi` only certifies stationarity as the radius shrinks.
    pub delta_stationary: f64,
    /// `|g| <= tol_zero_subgradient` counts as `g = 0`; rounding keeps an
    /// exact zero out of reach at smooth minimizers.
    pub tol_zero_subgradient: f64,
    /// Cap on the spectral norm of `H`.
    pub c_h: f64,
    pub hessian: HessianMode,
    pub radius_rule: RadiusRule,
}

impl Default for TrParams {
    fn default() -> Self {
        Self {
            delta_min: 1e-2,
            eta1: 0.25,
            eta2: 0.75,
            beta1: 0.5,
            beta2: 1.1,
            mu: 0.8,
            delta0: 1.0,
            max_iter: 500,
            tol_stationarity: 1e-5,
            tol_step: 1e-8,
            delta_stationary: 1e-7,
            tol_zero_subgradient: 1e-12,
            c_h: 1e8,
            hessian: HessianMode::Bfgs,
            radius_rule: RadiusRule::Floored,
        }
    }
}

impl TrParams {
    /// Checks every ordering constraint, naming the first that fails.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        let positive = [
            ("delta_min", self.delta_min),
            ("delta0", self.delta0),
            ("tol_stationarity", self.tol_stationarity),
            ("tol_step", self.tol_step),
            ("delta_stationary", self.delta_stationary),
            ("c_h", self.c_h),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} = {v} must be positive and finite"));
            }
        }
        if !(self.tol_zero_subgradient >= 0.0) {
            return fail(format!(
                "tol_zero_subgradient = {} must be non-negative",
                self.tol_zero_subgradient
            ));
        }
        if !(0.0 < self.eta1 && self.eta1 < self.eta2 && self.eta2 < 1.0) {
            return fail(format!(
                "need 0 < eta1 < eta2 < 1, got eta1 = {}, eta2 = {}",
                self.eta1, self.eta2
            ));
        }
        if !(0.0 < self.beta1 && self.beta1 < 1.0) {
            return fail(format!("beta1 = {} must lie in (0, 1)", self.beta1));
        }
        if !(self.beta2 > 1.0 && self.beta2.is_finite()) {
            return fail(format!("beta2 = {} must exceed 1", self.beta2));
        }
        if !(0.0 < self.mu && self.mu <= 1.0) {
            return fail(format!("mu = {} must lie in (0, 1]", self.mu));
        }
        if self.radius_rule == RadiusRule::Floored && self.delta0 <= self.delta_min {
            return fail(format!(
                "delta0 = {} must exceed delta_min = {}",
                self.delta0, self.delta_min
            ));
        }
        Ok(())
    }
}
