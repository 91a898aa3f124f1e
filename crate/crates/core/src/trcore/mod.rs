//! Trust-region driver for locally Lipschitz objectives.
//!
//! Large radii (`delta >= delta_min`) use the quadratic model built from one
//! subgradient; small radii switch to the bundle model of [`crate::models`]
//! together with the modified quality indicator.

mod bfgs;
mod driver;
mod params;
mod record;
mod state;
mod step;

pub use bfgs::{hessian_update, spectral_norm_estimate};
pub use driver::{run, RunOutput};
pub use params::{HessianMode, RadiusRule, TrParams};
pub use record::{audit_records, parse_csv, to_csv_string, write_csv, CSV_HEADER};
pub use state::{IterateRecord, Status, StepKind, TrState};
pub use step::{
    dogleg_step, is_successful, quality_modified, quality_standard, update, update_radius,
};
