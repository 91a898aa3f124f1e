//! Variational inequality of the second kind
//!
//! ```text
//!     A y + nu q = u,   |q_i| <= 1,   y_i q_i = |y_i|,
//! ```
//!
//! i.e. `y = argmin 1/2 y'Ay - u'y + nu |y|_1`: forward solver, index sets,
//! Bouligand derivatives of `S: u -> y`, adjoint gradients and the gradient
//! bundle over possibly biactive indices.

mod data;
mod derivative;
mod solver;

pub use data::{
    classify_sets, IndexSets, LipschitzConstants, ViProblemData, ViSolution, DEFAULT_ACT_TOL,
};
pub use derivative::{
    adjoint_gradient, bouligand_apply, directional_derivative_oracle, gradient_bundle,
    possibly_biactive, BundlePolicy, DEFAULT_POWERSET_CAP, ORACLE_MAX_BIACTIVE,
};
pub use solver::{solve_vi, solve_vi_warm};
