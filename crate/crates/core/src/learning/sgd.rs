//! Gradient descent with U-statistic gradient estimates.
//!
//! At each step the full empirical gradient (itself a U-statistic over Λ)
//! is replaced by one of:
//!
//! * `Incomplete(B)` — the average of the gradient kernel over B tuples
//!   drawn with replacement from Λ, redrawn independently at every step;
//! * `CompleteSubsample(n')` — the complete gradient U-statistic over a
//!   fresh uniform without-replacement subsample of `n'_k` observations
//!   per block;
//! * `Full` — the deterministic full gradient (a test mode; it turns the
//!   loop into plain projected gradient descent).
//!
//! Both stochastic estimates are unbiased for the full empirical gradient;
//! at matched term budget `B = ∏ C(n'_k, d_k)` the incomplete one has the
//! smaller variance, which is the point of using it.

use crate::error::{Error, Result};
use crate::index::{enumerate_tuples_capped, IndexSpace, IndexTuple};
use crate::rng::SplitRng;
use crate::samples::SampleSet;

/// Parameters a gradient can be accumulated into: enough vector-space
/// structure for the update `θ ← θ - η·g`.
pub trait Parameter: Clone {
    fn zeroed(&self) -> Self;
    fn scale(&mut self, a: f64);
    fn add_scaled(&mut self, a: f64, other: &Self);
    fn norm(&self) -> f64;
}

impl Parameter for Vec<f64> {
    fn zeroed(&self) -> Self {
        vec![0.0; self.len()]
    }

    fn scale(&mut self, a: f64) {
        for v in self.iter_mut() {
            *v *= a;
        }
    }

    fn add_scaled(&mut self, a: f64, other: &Self) {
        for (x, y) in self.iter_mut().zip(other.iter()) {
            *x += a * y;
        }
    }

    fn norm(&self) -> f64 {
        self.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// A differentiable U-statistic objective: per-tuple gradient accumulation
/// plus the feasible-set projection.
pub trait SgdObjective {
    type Theta: Parameter;

    fn degrees(&self) -> Vec<usize>;

    /// `into += weight · ∇H(X_tuple; θ)`.
    fn accumulate_gradient(
        &self,
        theta: &Self::Theta,
        samples: &SampleSet,
        tuple: &IndexTuple,
        into: &mut Self::Theta,
        weight: f64,
    );

    /// Project onto the feasible set; identity by default.
    fn project(&self, _theta: &mut Self::Theta) {}
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GradientMode {
    /// Incomplete gradient: B with-replacement draws from Λ per step.
    Incomplete { terms: u64 },
    /// Complete gradient over a fresh per-block subsample of these sizes.
    CompleteSubsample { sizes: Vec<usize> },
    /// Deterministic full gradient each step (test mode).
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionPolicy {
    EveryStep,
    FinalOnly,
}

#[derive(Debug, Clone)]
pub struct SgdConfig {
    pub steps: u64,
    /// Learning-rate scale: η_t = 1 / (η₀ · t).
    pub eta0: f64,
    pub gradient_mode: GradientMode,
    pub projection_policy: ProjectionPolicy,
    pub seed: u64,
}

/// Run the descent from `theta0`; `observer(t, θ_t, ‖g̃_t‖)` fires after
/// every update. Returns the final (projected) iterate.
pub fn sgd<O: SgdObjective>(
    objective: &O,
    samples: &SampleSet,
    space: &IndexSpace,
    config: &SgdConfig,
    theta0: O::Theta,
    mut observer: impl FnMut(u64, &O::Theta, f64),
) -> Result<O::Theta> {
    if config.steps == 0 {
        return Err(Error::InvalidArgument("SGD needs at least one step".into()));
    }
    if !(config.eta0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eta0 must be positive, got {}",
            config.eta0
        )));
    }
    if objective.degrees() != space.degrees() {
        return Err(Error::DimensionMismatch(format!(
            "objective degrees {:?} vs space degrees {:?}",
            objective.degrees(),
            space.degrees()
        )));
    }
    // Validate the gradient mode up front.
    let sub_space = match &config.gradient_mode {
        GradientMode::Incomplete { terms } => {
            if *terms == 0 {
                return Err(Error::EmptyBudget);
            }
            None
        }
        GradientMode::CompleteSubsample { sizes } => {
            if sizes.len() != space.block_count() {
                return Err(Error::DimensionMismatch(format!(
                    "{} subsample sizes for {} blocks",
                    sizes.len(),
                    space.block_count()
                )));
            }
            for (k, (&m, &full)) in sizes.iter().zip(space.sizes().iter()).enumerate() {
                let d = space.degrees()[k];
                if m < d {
                    return Err(Error::InvalidDegrees {
                        block: k,
                        degree: d,
                        size: m,
                    });
                }
                if m > full {
                    return Err(Error::InvalidArgument(format!(
                        "subsample size {m} exceeds block size {full} in block {k}"
                    )));
                }
            }
            Some(IndexSpace::build(sizes, space.degrees())?)
        }
        GradientMode::Full => None,
    };

    let rng = SplitRng::new(config.seed);
    let mut theta = theta0;
    let mut scratch: Vec<Vec<usize>> = Vec::new();

    for t in 1..=config.steps {
        let eta = 1.0 / (config.eta0 * t as f64);
        let mut gradient = theta.zeroed();
        // Fresh stream per step so draws are independent across steps and
        // reproducible regardless of observer behavior.
        let mut step_rng = rng.child(t);
        match &config.gradient_mode {
            GradientMode::Incomplete { terms } => {
                let w = 1.0 / *terms as f64;
                for _ in 0..*terms {
                    let tuple = space.random_tuple(&mut step_rng);
                    objective.accumulate_gradient(&theta, samples, &tuple, &mut gradient, w);
                }
            }
            GradientMode::CompleteSubsample { sizes } => {
                let sub = sub_space.as_ref().expect("validated above");
                // Per-block uniform without-replacement index draws, kept
                // sorted so tuples stay canonical under composition.
                scratch.clear();
                for (k, &m) in sizes.iter().enumerate() {
                    let full = space.sizes()[k] as u64;
                    let mut chosen: Vec<usize> = Vec::with_capacity(m);
                    let mut seen = std::collections::HashSet::with_capacity(m);
                    // Floyd's algorithm over observation indices.
                    for j in (full - m as u64)..full {
                        let t = step_rng.below(j + 1) as usize;
                        if seen.contains(&t) {
                            seen.insert(j as usize);
                            chosen.push(j as usize);
                        } else {
                            seen.insert(t);
                            chosen.push(t);
                        }
                    }
                    chosen.sort_unstable();
                    scratch.push(chosen);
                }
                let total = sub
                    .cardinality_u128()
                    .expect("subsample spaces are small") as f64;
                let w = 1.0 / total;
                for sub_tuple in enumerate_tuples_capped(sub, u128::MAX)? {
                    let blocks: Vec<Vec<usize>> = sub_tuple
                        .blocks()
                        .iter()
                        .enumerate()
                        .map(|(k, b)| b.iter().map(|&i| scratch[k][i]).collect())
                        .collect();
                    let tuple = IndexTuple::new(blocks)?;
                    objective.accumulate_gradient(&theta, samples, &tuple, &mut gradient, w);
                }
            }
            GradientMode::Full => {
                let total = space.cardinality_f64();
                if !total.is_finite() {
                    return Err(Error::EnumerationCap {
                        cardinality: space.cardinality().to_string(),
                        cap: u128::MAX,
                    });
                }
                let w = 1.0 / total;
                for tuple in enumerate_tuples_capped(space, crate::index::DEFAULT_ENUMERATION_CAP)?
                {
                    objective.accumulate_gradient(&theta, samples, &tuple, &mut gradient, w);
                }
            }
        }
        let gnorm = gradient.norm();
        theta.add_scaled(-eta, &gradient);
        if config.projection_policy == ProjectionPolicy::EveryStep {
            objective.project(&mut theta);
        }
        observer(t, &theta, gnorm);
    }
    if config.projection_policy == ProjectionPolicy::FinalOnly {
        objective.project(&mut theta);
    }
    Ok(theta)
}
