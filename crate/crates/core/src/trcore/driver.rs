use std::time::Instant;

use crate::error::{Error, Result};
use crate::models::{cauchy_from_stationarity, stationarity_measure};
use crate::problems::Problem;
use crate::DenseVector;

use super::bfgs::QuasiNewton;
use super::params::{HessianMode, TrParams};
use super::state::{IterateRecord, Status, StepKind, TrState};
use super::step::{decrease_ratio, dogleg_with_newton, is_successful, quadratic_model, update};

/// Relative slack on the runtime Cauchy-decrease check (rounding only).
const CAUCHY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: TrState,
    pub records: Vec<IterateRecord>,
    /// `x_k` at the start of each recorded pass.
    pub iterates: Vec<DenseVector>,
    /// Pass at which the problem switched to its final accuracy, if it did.
    pub refined_at: Option<usize>,
    /// The problem approximated its bundles (no convergence guarantee).
    pub heuristic: bool,
}

impl RunOutput {
    pub fn iterations(&self) -> usize {
        self.state.k
    }

    pub fn count(&self, kind: StepKind) -> usize {
        self.records.iter().filter(|r| r.step_kind == kind).count()
    }
}

fn cauchy_bound(mu: f64, measure: f64, delta: f64, h_norm: f64) -> f64 {
    let cap = if h_norm > 0.0 {
        measure / h_norm
    } else {
        f64::INFINITY
    };
    0.5 * mu * measure * delta.min(cap)
}

/// Runs the trust-region iteration from `x0`.
pub fn run<P: Problem + ?Sized>(
    problem: &mut P,
    params: &TrParams,
    x0: DenseVector,
) -> Result<RunOutput> {
    params.validate()?;
    if x0.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            found: x0.len(),
        });
    }
    let start = Instant::now();
    let n = x0.len();
    let x_scale = x0.norm().max(1.0);
    let mut qn = match params.hessian {
        HessianMode::Bfgs => QuasiNewton::identity(n),
        HessianMode::Zero => QuasiNewton::zero(n),
    };
    let f0 = problem.value(&x0)?;
    let g0 = problem.subgradient(&x0)?;
    let mut state = TrState {
        k: 0,
        x: x0,
        f_x: f0,
        delta: params.delta0,
        h: qn.h.clone(),
        g: g0,
        status: Status::Running,
    };
    let mut records = Vec::new();
    let mut iterates = Vec::new();
    let mut last_step = f64::INFINITY;
    let mut refined_at = None;

    loop {
        if state.k >= params.max_iter {
            state.status = Status::MaxIter;
            break;
        }
        let mut refined = false;
        if problem.refine_accuracy(last_step.max(state.delta)) {
            state.f_x = problem.value(&state.x)?;
            state.g = problem.subgradient(&state.x)?;
            refined = true;
            refined_at = Some(state.k);
        }
        let norm_g = state.g.norm();
        let mut record = IterateRecord {
            k: state.k,
            f: state.f_x,
            norm_g,
            psi: None,
            delta: state.delta,
            rho: None,
            step_kind: StepKind::Standard,
            bundle_size: None,
            wall_ms: 0.0,
            pred_decrease: None,
            cauchy_bound: None,
            refined,
        };
        iterates.push(state.x.clone());
        if norm_g <= params.tol_zero_subgradient {
            record.wall_ms = start.elapsed().as_secs_f64() * 1e3;
            records.push(record);
            state.status = Status::StationarySubgradientZero;
            break;
        }

        let (d, pred, bound, rho, f_trial) = if state.delta >= params.delta_min {
            let newton = qn.newton_point(&state.g);
            let d = dogleg_with_newton(&state.g, &qn.h, newton.as_ref(), state.delta);
            let pred = -quadratic_model(&state.g, &qn.h, &d);
            let bound = cauchy_bound(params.mu, norm_g, state.delta, qn.norm);
            check_cauchy(state.k, "standard", pred, bound)?;
            let f_trial = problem.value(&(&state.x + &d))?;
            let rho = decrease_ratio(state.f_x - f_trial, pred)?;
            (d, pred, bound, rho, f_trial)
        } else {
            record.step_kind = StepKind::Modified;
            let bundle = problem.bundle(&state.x, state.delta)?;
            let st = stationarity_measure(&bundle)?;
            record.psi = Some(st.psi);
            record.bundle_size = Some(bundle.len());
            if norm_g.min(st.psi) <= params.tol_stationarity
                && state.delta <= params.delta_stationary
            {
                record.wall_ms = start.elapsed().as_secs_f64() * 1e3;
                records.push(record);
                state.status = Status::StationaryIndicator;
                break;
            }
            let step = cauchy_from_stationarity(&bundle, &st, &qn.h, state.delta)?;
            let pred = -step.model_value;
            let bound = cauchy_bound(params.mu, st.psi, state.delta, qn.norm);
            check_cauchy(state.k, "modified", pred, bound)?;
            let (rho, f_trial) = if st.psi <= norm_g * state.delta {
                (0.0, state.f_x)
            } else {
                let f_trial = problem.value(&(&state.x + &step.d))?;
                let rho = decrease_ratio(state.f_x - f_trial, pred)?;
                (rho, f_trial)
            };
            (step.d, pred, bound, rho, f_trial)
        };

        let success = is_successful(rho, params);
        record.rho = Some(rho);
        record.pred_decrease = Some(pred);
        record.cauchy_bound = Some(bound);
        record.step_kind = if success {
            StepKind::Successful
        } else {
            StepKind::Null
        };
        record.wall_ms = start.elapsed().as_secs_f64() * 1e3;
        records.push(record);

        let x_old = state.x.clone();
        state = update(state, rho, &d, params);
        if success {
            if f_trial > state.f_x {
                return Err(Error::NonMonotone {
                    iteration: state.k,
                    previous: state.f_x,
                    next: f_trial,
                });
            }
            let g_new = problem.subgradient(&state.x)?;
            if params.hessian == HessianMode::Bfgs {
                let s = &state.x - &x_old;
                qn.update(&s, &(&g_new - &state.g), params.c_h);
                state.h = qn.h.clone();
            }
            state.f_x = f_trial;
            state.g = g_new;
            last_step = d.norm() / x_scale;
        } else {
            last_step = 0.0;
        }
        state.k += 1;
        if last_step < params.tol_step && state.delta < params.tol_step {
            state.status = Status::StepTooSmall;
            break;
        }
    }
    Ok(RunOutput {
        state,
        records,
        iterates,
        refined_at,
        heuristic: problem.is_heuristic(),
    })
}

fn check_cauchy(iteration: usize, kind: &'static str, decrease: f64, bound: f64) -> Result<()> {
    if decrease < bound * (1.0 - CAUCHY_SLACK) {
        return Err(Error::CauchyDecreaseViolation {
            iteration,
            kind,
            decrease,
            bound,
        });
    }
    Ok(())
}
