//! Estimation and minimization of risks that take the form of generalized
//! K-sample U-statistics.
//!
//! The full ("complete") U-statistic averages a kernel over every valid
//! index tuple, which is numerically unfeasible beyond moderate sample
//! sizes. This crate provides the complete estimator together with its
//! incomplete Monte-Carlo counterparts (sampling with replacement, without
//! replacement, Bernoulli / Horvitz-Thompson), closed-form variance
//! identities and deviation bounds, a distribution-free model-selection
//! penalty, and stochastic gradient descent driven by incomplete gradient
//! estimates.
//!
//! Everything stochastic takes an explicit [`rng::SplitRng`]; a fixed seed
//! reproduces results bit for bit.

pub mod bounds;
pub mod estimators;
pub mod index;
pub mod kernel;
pub mod learning;
pub mod linalg;
pub mod rng;
pub mod samples;
pub mod sampling;

mod error;

pub use error::{Error, Result};
pub use estimators::EstimateResult;
pub use index::{IndexSpace, IndexTuple};
pub use kernel::Kernel;
pub use rng::SplitRng;
pub use samples::{SampleBlock, SampleSet};
pub use sampling::{Scheme, TermSet};
