use crate::error::{Error, Result};
use crate::linalg::IndexSet;
use crate::models::GradientBundle;
use crate::vi::{
    adjoint_gradient, gradient_bundle, solve_vi_warm, BundlePolicy, LipschitzConstants,
    ViProblemData, ViSolution,
};
use crate::DenseVector;

use super::Problem;

/// `J(y, u) = 1/2 |y - z_d|^2 + alpha/2 |u - u_d|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingObjective {
    pub z_d: DenseVector,
    pub u_d: DenseVector,
    pub alpha: f64,
}

impl TrackingObjective {
    pub fn new(z_d: DenseVector, u_d: DenseVector, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {alpha} must be positive"
            )));
        }
        if z_d.len() != u_d.len() {
            return Err(Error::DimensionMismatch {
                expected: z_d.len(),
                found: u_d.len(),
            });
        }
        Ok(Self { z_d, u_d, alpha })
    }

    pub fn value(&self, y: &DenseVector, u: &DenseVector) -> f64 {
        0.5 * (y - &self.z_d).norm_squared() + 0.5 * self.alpha * (u - &self.u_d).norm_squared()
    }

    pub fn grad_y(&self, y: &DenseVector) -> DenseVector {
        y - &self.z_d
    }

    pub fn grad_u(&self, u: &DenseVector) -> DenseVector {
        (u - &self.u_d) * self.alpha
    }
}

/// Loose VI tolerance while the iteration is still moving, tight afterwards.
/// The switch happens once, when `max(relative step, radius)` drops below
/// `switch_below`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhaseTolerance {
    pub inexact: f64,
    pub exact: f64,
    pub switch_below: f64,
}

impl Default for TwoPhaseTolerance {
    fn default() -> Self {
        Self {
            inexact: 1e-6,
            exact: 1e-12,
            switch_below: 1e-2,
        }
    }
}

const CACHE_SLOTS: usize = 3;

/// `f(u) = J(S(u), u)` with `S` the VI solution operator.
#[derive(Debug, Clone)]
pub struct ViTrackingProblem {
    data: ViProblemData,
    objective: TrackingObjective,
    lip: LipschitzConstants,
    policy: BundlePolicy,
    schedule: Option<TwoPhaseTolerance>,
    tol: f64,
    cache: Vec<(DenseVector, ViSolution)>,
    heuristic: bool,
    vi_solves: usize,
}

impl ViTrackingProblem {
    pub fn new(data: ViProblemData, objective: TrackingObjective) -> Result<Self> {
        if objective.z_d.len() != data.dim() {
            return Err(Error::DimensionMismatch {
                expected: data.dim(),
                found: objective.z_d.len(),
            });
        }
        let lip = LipschitzConstants::from_data(&data)?;
        Ok(Self {
            data,
            objective,
            lip,
            policy: BundlePolicy::default(),
            schedule: None,
            tol: 1e-12,
            cache: Vec::new(),
            heuristic: false,
            vi_solves: 0,
        })
    }

    pub fn with_policy(mut self, policy: BundlePolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_schedule(mut self, schedule: Option<TwoPhaseTolerance>) -> Self {
        self.schedule = schedule;
        self.tol = schedule.map_or(1e-12, |s| s.inexact);
        self.cache.clear();
        self
    }

    pub fn data(&self) -> &ViProblemData {
        &self.data
    }

    pub fn objective(&self) -> &TrackingObjective {
        &self.objective
    }

    pub fn lipschitz(&self) -> LipschitzConstants {
        self.lip
    }

    pub fn vi_tolerance(&self) -> f64 {
        self.tol
    }

    pub fn vi_solves(&self) -> usize {
        self.vi_solves
    }

    /// VI solution at `u` under the current tolerance (cached).
    pub fn solution(&mut self, u: &DenseVector) -> Result<ViSolution> {
        if let Some(pos) = self.cache.iter().position(|(v, _)| v == u) {
            let entry = self.cache.remove(pos);
            let sol = entry.1.clone();
            self.cache.push(entry);
            return Ok(sol);
        }
        let warm = self.cache.last().map(|(_, s)| s);
        let sol = solve_vi_warm(&self.data, u, self.tol, warm)?;
        self.vi_solves += 1;
        if self.cache.len() == CACHE_SLOTS {
            self.cache.remove(0);
        }
        self.cache.push((u.clone(), sol.clone()));
        Ok(sol)
    }

    fn check_dim(&self, u: &DenseVector) -> Result<()> {
        if u.len() != self.data.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.data.dim(),
                found: u.len(),
            });
        }
        Ok(())
    }
}

impl Problem for ViTrackingProblem {
    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn value(&mut self, u: &DenseVector) -> Result<f64> {
        self.check_dim(u)?;
        let sol = self.solution(u)?;
        Ok(self.objective.value(&sol.y, u))
    }

    /// Adjoint gradient with `N = A_s u B`.
    fn subgradient(&mut self, u: &DenseVector) -> Result<DenseVector> {
        self.check_dim(u)?;
        let sol = self.solution(u)?;
        let n_set: IndexSet = sol.sets.active();
        adjoint_gradient(
            &self.data,
            &n_set,
            &self.objective.grad_y(&sol.y),
            &self.objective.grad_u(u),
        )
    }

    fn bundle(&mut self, u: &DenseVector, delta: f64) -> Result<GradientBundle> {
        self.check_dim(u)?;
        let sol = self.solution(u)?;
        let (bundle, sampled) = gradient_bundle(
            &self.data,
            &sol,
            &self.lip,
            delta,
            &self.objective.grad_y(&sol.y),
            &self.objective.grad_u(u),
            &self.policy,
        )?;
        self.heuristic |= sampled;
        Ok(bundle)
    }

    fn refine_accuracy(&mut self, step_measure: f64) -> bool {
        match self.schedule {
            Some(s) if self.tol > s.exact && step_measure < s.switch_below => {
                self.tol = s.exact;
                self.cache.clear();
                true
            }
            _ => false,
        }
    }

    fn is_heuristic(&self) -> bool {
        self.heuristic
    }
}
