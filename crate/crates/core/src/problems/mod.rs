//! Objective oracles for the trust-region driver and concrete instances.

mod counterexample;
mod experiments;
mod vi_tracking;

pub use counterexample::{
    counterexample_f, counterexample_reference_iterates, counterexample_tr_params,
    CounterexampleModel, CounterexampleParams, CounterexampleProblem, ReferenceIterate,
};
pub use experiments::{
    experiment1_minimizers, experiment1_problem, experiment1_state, experiment1_tr_params,
    experiment2_problem, experiment2_target, experiment2_tr_params, Experiment2Config,
};
pub use vi_tracking::{TrackingObjective, TwoPhaseTolerance, ViTrackingProblem};

use crate::error::Result;
use crate::models::GradientBundle;
use crate::DenseVector;

/// Oracles of a locally Lipschitz objective.
///
/// Methods take `&mut self` so implementations can cache expensive inner
/// solves. `subgradient(x)` must lie in the convex hull of `bundle(x, delta)`
/// for every `delta > 0`.
pub trait Problem {
    fn dim(&self) -> usize;

    fn value(&mut self, x: &DenseVector) -> Result<f64>;

    /// One element of the (Bouligand) subdifferential at `x`.
    fn subgradient(&mut self, x: &DenseVector) -> Result<DenseVector>;

    /// Gradients generating the model function at `(x, delta)`.
    fn bundle(&mut self, x: &DenseVector, delta: f64) -> Result<GradientBundle>;

    /// Called at the start of every pass with `max(relative step, radius)`.
    /// Returns `true` when the problem switched to a higher accuracy, in
    /// which case the driver re-evaluates `f` and the subgradient.
    fn refine_accuracy(&mut self, _step_measure: f64) -> bool {
        false
    }

    /// `true` once an approximate bundle has been used.
    fn is_heuristic(&self) -> bool {
        false
    }
}
