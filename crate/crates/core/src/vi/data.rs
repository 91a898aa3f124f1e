use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{IndexSet, SparseSpdMatrix};
use crate::DenseVector;

pub const DEFAULT_ACT_TOL: f64 = 1e-9;

/// Matrix, sparsity weight and classification tolerance of one VI.
#[derive(Debug, Clone)]
pub struct ViProblemData {
    pub a: Arc<SparseSpdMatrix>,
    pub nu: f64,
    pub act_tol: f64,
}

impl ViProblemData {
    pub fn new(a: SparseSpdMatrix, nu: f64) -> Result<Self> {
        Self::with_act_tol(Arc::new(a), nu, DEFAULT_ACT_TOL)
    }

    pub fn with_act_tol(a: Arc<SparseSpdMatrix>, nu: f64, act_tol: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "nu = {nu} must be positive"
            )));
        }
        if !(act_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "act_tol = {act_tol} must be >= 0"
            )));
        }
        Ok(Self { a, nu, act_tol })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }
}

/// Inactive, strongly active and biactive indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSets {
    pub inactive: IndexSet,
    pub strongly_active: IndexSet,
    pub biactive: IndexSet,
}

impl IndexSets {
    /// `A = A_s u B`.
    pub fn active(&self) -> IndexSet {
        self.strongly_active.union(&self.biactive)
    }
}

/// Partition by `|y_i| > tol` (inactive), `|q_i| < 1 - tol` (strongly
/// active among the rest) and the remainder (biactive).
pub fn classify_sets(y: &DenseVector, q: &DenseVector, act_tol: f64) -> IndexSets {
    let n = y.len();
    let inactive = IndexSet::from_predicate(n, |i| y[i].abs() > act_tol);
    let strongly_active =
        IndexSet::from_predicate(n, |i| y[i].abs() <= act_tol && q[i].abs() < 1.0 - act_tol);
    let biactive =
        IndexSet::from_predicate(n, |i| y[i].abs() <= act_tol && q[i].abs() >= 1.0 - act_tol);
    IndexSets {
        inactive,
        strongly_active,
        biactive,
    }
}

#[derive(Debug, Clone)]
pub struct ViSolution {
    pub y: DenseVector,
    pub q: DenseVector,
    pub sets: IndexSets,
    /// Scaled natural residual reached by the solver.
    pub residual: f64,
}

/// Certified upper bounds on the Lipschitz moduli of `u -> y` and `u -> q`
/// (max-norm in the image, Euclidean norm in the argument).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzConstants {
    pub l_y: f64,
    pub l_q: f64,
}

impl LipschitzConstants {
    /// `l_y = 1/lambda_min`, `l_q = (lambda_max/lambda_min + 1)/nu`, using the
    /// widened bounds cached on the matrix.
    pub fn from_data(data: &ViProblemData) -> Result<Self> {
        let b = data.a.cached_bounds()?;
        Ok(Self {
            l_y: 1.0 / b.lambda_min_lower,
            l_q: (b.lambda_max_upper / b.lambda_min_lower + 1.0) / data.nu,
        })
    }
}
