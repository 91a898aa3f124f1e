use crate::{DenseMatrix, DenseVector};

/// Loop status; everything but `Running` is terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Running,
    StationarySubgradientZero,
    StationaryIndicator,
    StepTooSmall,
    MaxIter,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Running => "running",
            Status::StationarySubgradientZero => "stationary_subgradient_zero",
            Status::StationaryIndicator => "stationary_indicator",
            Status::StepTooSmall => "step_too_small",
            Status::MaxIter => "max_iter",
        }
    }

    pub fn is_stationary(self) -> bool {
        matches!(
            self,
            Status::StationarySubgradientZero | Status::StationaryIndicator
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrState {
    pub k: usize,
    pub x: DenseVector,
    pub f_x: f64,
    pub delta: f64,
    pub h: DenseMatrix,
    pub g: DenseVector,
    pub status: Status,
}

/// What happened in one pass of the loop.
///
/// `Null` and `Successful` are step outcomes. `Standard` and `Modified` mark
/// a terminating pass in which the respective branch was entered but no step
/// was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Standard,
    Modified,
    Null,
    Successful,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Standard => "standard",
            StepKind::Modified => "modified",
            StepKind::Null => "null",
            StepKind::Successful => "successful",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "standard" => StepKind::Standard,
            "modified" => StepKind::Modified,
            "null" => StepKind::Null,
            "successful" => StepKind::Successful,
            _ => return None,
        })
    }
}

/// Per-iteration audit record. `psi` and `bundle_size` are present exactly
/// on modified-branch passes.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub k: usize,
    pub f: f64,
    pub norm_g: f64,
    pub psi: Option<f64>,
    pub delta: f64,
    pub rho: Option<f64>,
    pub step_kind: StepKind,
    pub bundle_size: Option<usize>,
    pub wall_ms: f64,
    /// Model decrease `f(x) - q(d)` of the computed step.
    pub pred_decrease: Option<f64>,
    /// Right-hand side of the applicable Cauchy-decrease inequality.
    pub cauchy_bound: Option<f64>,
    /// The problem switched to its final accuracy before this pass and `f`
    /// was re-evaluated.
    pub refined: bool,
}

impl IterateRecord {
    pub fn is_modified(&self) -> bool {
        self.psi.is_some()
    }
}
