//! Subproblem steps, quality indicators and the radius/iterate update.

use crate::error::{Error, Result};
use crate::{DenseMatrix, DenseVector};

use super::params::{RadiusRule, TrParams};
use super::state::TrState;

/// Dogleg step for `min <g,d> + d'Hd/2` over `|d| <= delta`.
///
/// Returns the Newton point when `H` is positive definite and the point lies
/// in the ball, the dogleg path point otherwise, and the Cauchy point along
/// `-g` when `H` is not positive definite.
pub fn dogleg_step(g: &DenseVector, h: &DenseMatrix, delta: f64) -> DenseVector {
    let newton = h
        .clone()
        .cholesky()
        .map(|c| -c.solve(g))
        .filter(|p| p.iter().all(|v| v.is_finite()));
    dogleg_with_newton(g, h, newton.as_ref(), delta)
}

/// Dogleg with a precomputed Newton point (`None` when `H` is not positive
/// definite).
pub(crate) fn dogleg_with_newton(
    g: &DenseVector,
    h: &DenseMatrix,
    newton: Option<&DenseVector>,
    delta: f64,
) -> DenseVector {
    let gnorm = g.norm();
    if gnorm == 0.0 {
        return DenseVector::zeros(g.len());
    }
    let hg = h * g;
    let ghg = g.dot(&hg);
    let boundary = || g * (-delta / gnorm);
    if ghg <= 0.0 {
        return boundary();
    }
    let t_cauchy = gnorm * gnorm / ghg;
    let Some(p_n) = newton else {
        // Exact minimizer along -g inside the ball.
        return if t_cauchy * gnorm >= delta {
            boundary()
        } else {
            g * (-t_cauchy)
        };
    };
    if p_n.norm() <= delta {
        return p_n.clone();
    }
    let p_u = g * (-t_cauchy);
    let pu_norm = p_u.norm();
    if pu_norm >= delta {
        return boundary();
    }
    // |p_u + tau (p_n - p_u)| = delta, tau in [0, 1].
    let w = p_n - &p_u;
    let a = w.norm_squared();
    let b = 2.0 * p_u.dot(&w);
    let c = pu_norm * pu_norm - delta * delta;
    let disc = (b * b - 4.0 * a * c).max(0.0);
    // c < 0, so the positive root is well conditioned in this form.
    let tau = (2.0 * -c / (b + disc.sqrt())).clamp(0.0, 1.0);
    p_u + w * tau
}

/// Value of `<g,d> + d'Hd/2`.
pub(crate) fn quadratic_model(g: &DenseVector, h: &DenseMatrix, d: &DenseVector) -> f64 {
    g.dot(d) + 0.5 * d.dot(&(h * d))
}

/// `(f_x - f_trial) / (f_x - q_d)`.
pub fn quality_standard(f_x: f64, f_trial: f64, q_d: f64) -> Result<f64> {
    decrease_ratio(f_x - f_trial, f_x - q_d)
}

/// Modified quality indicator: zero when `psi <= |g| delta`, otherwise the
/// ratio of actual to modified-model decrease.
pub fn quality_modified(
    f_x: f64,
    f_trial: f64,
    qmod_d: f64,
    psi: f64,
    norm_g: f64,
    delta: f64,
) -> Result<f64> {
    if psi <= norm_g * delta {
        return Ok(0.0);
    }
    decrease_ratio(f_x - f_trial, f_x - qmod_d)
}

/// Takes the decreases directly; `f_x - q_d` loses the predicted decrease
/// once it drops below the precision of `f_x`.
pub(crate) fn decrease_ratio(actual: f64, predicted: f64) -> Result<f64> {
    if !(predicted > 0.0) {
        return Err(Error::DegenerateDenominator {
            denominator: predicted,
        });
    }
    Ok(actual / predicted)
}

/// New radius for a given quality indicator.
pub fn update_radius(delta: f64, rho: f64, params: &TrParams) -> f64 {
    let floor = match params.radius_rule {
        RadiusRule::Floored => params.delta_min,
        RadiusRule::Unfloored => 0.0,
    };
    if rho <= params.eta1 {
        params.beta1 * delta
    } else if rho <= params.eta2 {
        floor.max(delta)
    } else {
        floor.max(params.beta2 * delta)
    }
}

/// `true` when the step is accepted.
pub fn is_successful(rho: f64, params: &TrParams) -> bool {
    rho > params.eta1
}

/// Applies the iterate and radius update. `f_x` of the returned state is
/// left for the caller to refresh on success.
pub fn update(mut state: TrState, rho: f64, d: &DenseVector, params: &TrParams) -> TrState {
    if is_successful(rho, params) {
        state.x += d;
    }
    state.delta = update_radius(state.delta, rho, params);
    state
}
