//! The three desk-scale experiment pipelines.

pub mod model_select;
pub mod one_time;
pub mod sgd_compare;

pub use model_select::{run_model_select, ModelSelectOutcome};
pub use one_time::{run_one_time, OneTimeOutcome, OneTimeRow};
pub use sgd_compare::{run_sgd_compare, SgdCompareOutcome, SgdFinalRow};
