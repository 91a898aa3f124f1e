use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{assemble_laplacian_2d, grid_point, SparseSpdMatrix};
use crate::trcore::TrParams;
use crate::vi::{BundlePolicy, ViProblemData, DEFAULT_ACT_TOL};
use crate::DenseVector;

use super::vi_tracking::{TrackingObjective, TwoPhaseTolerance, ViTrackingProblem};

/// Closed-form state of the scalar problem `2y + q = u`: soft thresholding.
pub fn experiment1_state(u: f64) -> f64 {
    if u >= 1.0 {
        0.5 * (u - 1.0)
    } else if u <= -1.0 {
        0.5 * (u + 1.0)
    } else {
        0.0
    }
}

/// The two local minimizers: `-1` and `(4 alpha u_d + 2 z_d + 1)/(4 alpha + 1)`.
pub fn experiment1_minimizers(alpha: f64, z_d: f64, u_d: f64) -> (f64, f64) {
    (
        -1.0,
        (4.0 * alpha * u_d + 2.0 * z_d + 1.0) / (4.0 * alpha + 1.0),
    )
}

/// Scalar problem `A = [2]`, `nu = 1`, `f(u) = 1/2 (S(u) - z_d)^2 + alpha/2 (u - u_d)^2`.
pub fn experiment1_problem(alpha: f64, z_d: f64, u_d: f64) -> Result<ViTrackingProblem> {
    let data = ViProblemData::new(SparseSpdMatrix::diagonal_matrix(&[2.0])?, 1.0)?;
    let obj = TrackingObjective::new(
        DenseVector::from_element(1, z_d),
        DenseVector::from_element(1, u_d),
        alpha,
    )?;
    ViTrackingProblem::new(data, obj)
}

/// Trust-region settings for the scalar problem. The modified branch only
/// takes over once the radius is at the accuracy asked of the kink, and the
/// stationarity stop fires there too, so a `psi = 0` certificate pins the
/// iterate to within a few `3e-7` of `-1`.
pub fn experiment1_tr_params() -> TrParams {
    TrParams {
        delta_min: 3e-7,
        delta_stationary: 3e-7,
        max_iter: 200,
        ..TrParams::default()
    }
}

/// `z_d = 1` at grid points with first coordinate `>= threshold`, else 0.
pub fn experiment2_target(m: usize, threshold: f64) -> DenseVector {
    DenseVector::from_fn(m * m, |i, _| {
        if grid_point(m, i).0 >= threshold {
            1.0
        } else {
            0.0
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment2Config {
    /// Interior points per direction, `h = 1/(m + 1)`.
    pub m: usize,
    pub alpha: f64,
    pub nu: f64,
    pub target_threshold: f64,
    pub schedule: Option<TwoPhaseTolerance>,
    pub policy: BundlePolicy,
}

impl Experiment2Config {
    pub fn new(m: usize, alpha: f64, nu: f64) -> Self {
        Self {
            m,
            alpha,
            nu,
            target_threshold: 0.5,
            schedule: Some(TwoPhaseTolerance::default()),
            policy: BundlePolicy::default(),
        }
    }
}

impl Experiment2Config {
    /// `2 nu z_d`. Any control with `|u|_inf <= nu` gives `y = 0` around it,
    /// so `u = 0` is already a local minimizer; this start lies outside that
    /// basin with the state switched on exactly over the target.
    pub fn initial_control(&self) -> DenseVector {
        experiment2_target(self.m, self.target_threshold) * (2.0 * self.nu)
    }
}

/// Trust-region settings for the 2D runs.
pub fn experiment2_tr_params() -> TrParams {
    TrParams {
        delta_min: 1e-3,
        max_iter: 1000,
        ..TrParams::default()
    }
}

/// Tracking problem on the unit square: finite-difference Laplacian,
/// `u_d = 0`, two-phase VI tolerance by default.
pub fn experiment2_problem(cfg: &Experiment2Config) -> Result<ViTrackingProblem> {
    if cfg.m < 2 {
        return Err(Error::InvalidParameter(format!(
            "m = {} must be at least 2",
            cfg.m
        )));
    }
    let a = assemble_laplacian_2d(cfg.m);
    let data = ViProblemData::with_act_tol(Arc::new(a), cfg.nu, DEFAULT_ACT_TOL)?;
    let n = cfg.m * cfg.m;
    let obj = TrackingObjective::new(
        experiment2_target(cfg.m, cfg.target_threshold),
        DenseVector::zeros(n),
        cfg.alpha,
    )?;
    Ok(ViTrackingProblem::new(data, obj)?
        .with_policy(cfg.policy)
        .with_schedule(cfg.schedule))
}
