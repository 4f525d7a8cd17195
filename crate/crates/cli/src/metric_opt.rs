//! Optimizers used by the metric-learning experiments.
//!
//! `projected_gd` minimizes the hinge risk over one fixed pair multiset
//! (the one-time-sampling protocol: sample once, then run plain projected
//! gradient descent on that frozen objective).
//!
//! `sgd_metric` redraws the gradient estimate at every step, either as an
//! incomplete U-statistic over pair draws or as the complete U-statistic
//! of a fresh observation subsample, and defers the PSD projection to the
//! end of the run (the one-projection principle).

use crate::data::PairSet;
use crate::error::{CliError, CliResult};
use ustat_core::learning::project_psd;
use ustat_core::linalg::Matrix;
use ustat_core::{SampleBlock, SplitRng};

/// Step sizes follow η_t = 1 / (η₀ · t).
#[inline]
fn step_size(eta0: f64, t: u64) -> f64 {
    1.0 / (eta0 * t as f64)
}

/// Projected gradient descent on a fixed pair multiset; projection on
/// every step. Returns the final iterate and its training risk on the
/// same pair multiset, plus the number of kernel-gradient evaluations
/// (the instrumentation counter the budget checks assert on).
pub fn projected_gd(
    pairs: &PairSet,
    dim: usize,
    steps: u64,
    eta0: f64,
    threshold: f64,
) -> CliResult<(Matrix, f64, u64)> {
    if pairs.is_empty() {
        return Err(CliError::domain("empty pair set".to_string()));
    }
    if pairs.dim() != dim {
        return Err(CliError::domain(format!(
            "pair set dimension {} vs expected {dim}",
            pairs.dim()
        )));
    }
    let mut theta = Matrix::zeros(dim, dim);
    let mut grad = Matrix::zeros(dim, dim);
    let mut evals = 0u64;
    for t in 1..=steps {
        pairs.risk_and_gradient(&theta, threshold, &mut grad);
        evals += pairs.len() as u64;
        theta.add_scaled(-step_size(eta0, t), &grad);
        theta = project_psd(&theta);
    }
    let risk = pairs.risk(&theta, threshold);
    Ok((theta, risk, evals))
}

/// Per-step gradient strategy for [`sgd_metric`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepGradient {
    /// B unordered pairs drawn uniformly (with replacement) per step.
    IncompletePairs { terms: usize },
    /// All pairs of a fresh uniform without-replacement subsample of
    /// `subsample` observations per step.
    CompleteSubsample { subsample: usize },
}

impl StepGradient {
    pub fn terms_per_step(&self) -> usize {
        match *self {
            StepGradient::IncompletePairs { terms } => terms,
            StepGradient::CompleteSubsample { subsample } => subsample * (subsample - 1) / 2,
        }
    }
}

/// SGD over the hinge risk with per-step redraws and one final projection.
/// `observe(t, theta)` fires after each update (on the unprojected
/// iterate, matching what the descent actually uses). Returns the
/// projected final iterate and the gradient-evaluation counter.
pub fn sgd_metric(
    block: &SampleBlock,
    strategy: StepGradient,
    steps: u64,
    eta0: f64,
    threshold: f64,
    rng: &SplitRng,
    mut observe: impl FnMut(u64, &Matrix),
) -> CliResult<(Matrix, u64)> {
    let n = block.len();
    let dim = block.dim();
    match strategy {
        StepGradient::IncompletePairs { terms } if terms == 0 => {
            return Err(CliError::domain("incomplete gradient needs terms >= 1".to_string()))
        }
        StepGradient::CompleteSubsample { subsample } if subsample < 2 || subsample > n => {
            return Err(CliError::domain(format!(
                "subsample size {subsample} must lie in [2, {n}]"
            )))
        }
        _ => {}
    }
    let mut theta = Matrix::zeros(dim, dim);
    let mut grad = Matrix::zeros(dim, dim);
    let mut diff = vec![0.0f64; dim];
    let mut evals = 0u64;
    for t in 1..=steps {
        let mut step_rng = rng.child(t);
        grad.scale(0.0);
        match strategy {
            StepGradient::IncompletePairs { terms } => {
                let w = 1.0 / terms as f64;
                for _ in 0..terms {
                    let (i, j) = distinct_pair(n, &mut step_rng);
                    accumulate_pair(block, i, j, &theta, threshold, w, &mut diff, &mut grad);
                }
                evals += terms as u64;
            }
            StepGradient::CompleteSubsample { subsample } => {
                let chosen = floyd_indices(n, subsample, &mut step_rng);
                let total = (subsample * (subsample - 1) / 2) as f64;
                let w = 1.0 / total;
                for a in 0..subsample {
                    for b in (a + 1)..subsample {
                        accumulate_pair(
                            block,
                            chosen[a],
                            chosen[b],
                            &theta,
                            threshold,
                            w,
                            &mut diff,
                            &mut grad,
                        );
                    }
                }
                evals += total as u64;
            }
        }
        theta.add_scaled(-step_size(eta0, t), &grad);
        observe(t, &theta);
    }
    Ok((project_psd(&theta), evals))
}

#[inline]
fn accumulate_pair(
    block: &SampleBlock,
    i: usize,
    j: usize,
    theta: &Matrix,
    threshold: f64,
    weight: f64,
    diff: &mut [f64],
    grad: &mut Matrix,
) {
    let (xa, xb) = (block.features(i), block.features(j));
    for (d, (a, b)) in diff.iter_mut().zip(xa.iter().zip(xb.iter())) {
        *d = a - b;
    }
    let y = if block.label(i) == block.label(j) {
        1.0
    } else {
        -1.0
    };
    let u = y * (threshold - theta.quadratic_form(diff));
    if 1.0 - u > 0.0 {
        grad.add_scaled_outer(weight * y, diff);
    }
}

/// Uniform unordered pair of distinct indices.
#[inline]
pub fn distinct_pair(n: usize, rng: &mut SplitRng) -> (usize, usize) {
    loop {
        let i = rng.below(n as u64) as usize;
        let j = rng.below(n as u64) as usize;
        if i != j {
            return (i.min(j), i.max(j));
        }
    }
}

/// Uniform without-replacement index subset (Floyd), sorted ascending.
pub fn floyd_indices(n: usize, count: usize, rng: &mut SplitRng) -> Vec<usize> {
    let mut chosen = std::collections::HashSet::with_capacity(count);
    for j in (n - count)..n {
        let t = rng.below(j as u64 + 1) as usize;
        if chosen.contains(&t) {
            chosen.insert(j);
        } else {
            chosen.insert(t);
        }
    }
    let mut out: Vec<usize> = chosen.into_iter().collect();
    out.sort_unstable();
    out
}
