//! Nonsmooth trust-region optimization.
//!
//! The crate implements a trust-region method for locally Lipschitz
//! objectives whose step computation switches between a classical quadratic
//! model (large radius) and a neighbourhood model built from a finite bundle
//! of gradients (small radius). The neighbourhood model is specialised to
//! optimal control problems constrained by a variational inequality of the
//! second kind,
//!
//! ```text
//!     min J(y, u)   s.t.   <A y, v - y> + nu |v|_1 - nu |y|_1 >= <u, v - y>  for all v,
//! ```
//!
//! for which the Bouligand subdifferential of the control-to-state map is
//! available in closed form.
//!
//! Module map:
//!
//! * [`linalg`]: sparse SPD matrices, preconditioned CG, spectral bounds, the
//!   finite-difference Laplacian and a Matrix Market reader.
//! * [`models`]: gradient bundles, the max-of-linear model, the stationarity
//!   measure (Wolfe's min-norm point) and the modified Cauchy step.
//! * [`trcore`]: the trust-region driver, dogleg, quality indicators, BFGS.
//! * [`vi`]: the VI forward solver, index sets, Bouligand elements, adjoints,
//!   possibly-biactive sets and the gradient bundle.
//! * [`problems`]: the [`problems::Problem`] contract and concrete instances.

// `!(x > 0.0)` is the NaN-rejecting form throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod models;
pub mod problems;
pub mod trcore;
pub mod vi;

pub use error::{Error, Result};

/// Dense real vector used for controls, states, gradients and steps.
pub type DenseVector = nalgebra::DVector<f64>;

/// Dense symmetric matrix (the quasi-Newton matrix `H`).
pub type DenseMatrix = nalgebra::DMatrix<f64>;
