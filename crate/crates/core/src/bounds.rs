//! Closed-form variance identities, deviation bounds for complete and
//! incomplete U-processes over VC-major kernel classes, the
//! distribution-free model-selection penalty, and the penalized selection
//! rule.
//!
//! Every bound consumes `ln(1 + #Λ)` rather than the raw cardinality, so
//! nothing here overflows at realistic sample sizes; pair the inputs with
//! [`crate::index::IndexSpace::log1p_cardinality`].

use crate::error::{Error, Result};
use crate::estimators::{complete_u, KahanSum};
use crate::kernel::Kernel;
use crate::samples::SampleSet;
use crate::sampling::Scheme;

/// Everything the closed-form bounds need: the uniform kernel bound M, the
/// VC dimension V of the kernel class, the effective block count
/// `N = min_k floor(n_k / d_k)`, `ln(1 + #Λ)`, the term budget B, the
/// confidence level δ and the pooled sample size n.
#[derive(Debug, Clone, Copy)]
pub struct BoundInputs {
    pub kernel_bound: f64,
    pub vc_dimension: f64,
    pub block_count: u64,
    pub log_lambda: f64,
    pub terms: u64,
    pub delta: f64,
    pub pooled_n: u64,
}

impl BoundInputs {
    fn validate(&self) -> Result<()> {
        if !(self.kernel_bound > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "kernel bound must be positive, got {}",
                self.kernel_bound
            )));
        }
        if !(self.vc_dimension >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "VC dimension must be >= 1, got {}",
                self.vc_dimension
            )));
        }
        if self.block_count == 0 {
            return Err(Error::InvalidArgument("block count N must be >= 1".into()));
        }
        if !(self.log_lambda > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "log(1 + #Lambda) must be positive, got {}",
                self.log_lambda
            )));
        }
        if self.terms == 0 {
            return Err(Error::EmptyBudget);
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must lie strictly inside (0, 1), got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Variance of the incomplete estimator built by sampling B terms with
/// replacement: `(1 - 1/B)·Var(U_n) + (1/B)·Var(H)`. Always at least the
/// complete variance, and decreasing to it as B grows.
pub fn incomplete_variance(var_complete: f64, var_kernel: f64, b: u64) -> Result<f64> {
    if b == 0 {
        return Err(Error::EmptyBudget);
    }
    if var_complete < 0.0 || var_kernel < 0.0 {
        return Err(Error::InvalidArgument(
            "variances must be nonnegative".into(),
        ));
    }
    let binv = 1.0 / b as f64;
    Ok((1.0 - binv) * var_complete + binv * var_kernel)
}

/// Estimated linear / degenerate variance components of a one-sample
/// degree-2 kernel.
#[derive(Debug, Clone, Copy)]
pub struct VarianceDecomposition {
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub n: u64,
}

/// Variance of a non-degenerate degree-2 U-statistic from its orthogonal
/// decomposition: `4σ₁²/n + 2σ₂²/(n(n-1))`.
pub fn degree2_variance(decomp: &VarianceDecomposition) -> Result<f64> {
    if decomp.n < 2 {
        return Err(Error::InvalidArgument(format!(
            "degree-2 variance needs n >= 2, got {}",
            decomp.n
        )));
    }
    if decomp.sigma1_sq < 0.0 || decomp.sigma2_sq < 0.0 {
        return Err(Error::InvalidArgument(
            "variance components must be nonnegative".into(),
        ));
    }
    let n = decomp.n as f64;
    Ok(4.0 * decomp.sigma1_sq / n + 2.0 * decomp.sigma2_sq / (n * (n - 1.0)))
}

/// Plug-in estimates of the orthogonal components of a one-sample degree-2
/// kernel: the linear part `H₁(x_i) = mean_{j≠i} H(x_i, x_j) - U_n` and the
/// degenerate residual `H₂(x_i,x_j) = H(x_i,x_j) - U_n - H₁(x_i) - H₁(x_j)`.
/// V-statistic flavored, bias O(1/n).
pub fn estimate_projections<K: Kernel>(
    kernel: &K,
    samples: &SampleSet,
) -> Result<VarianceDecomposition> {
    kernel.validate(samples)?;
    if kernel.degrees() != [2] {
        return Err(Error::DimensionMismatch(format!(
            "projection estimation needs a one-sample degree-2 kernel, got degrees {:?}",
            kernel.degrees()
        )));
    }
    let n = samples.block(0).len();
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "projection estimation needs n >= 4, got {n}"
        )));
    }
    let space = crate::index::IndexSpace::build(&[n], &[2])?;
    let u_n = complete_u(kernel, samples, &space)?.value;

    let mut row_sums = vec![KahanSum::new(); n];
    for tuple in crate::index::enumerate_tuples(&space)? {
        let [i, j] = [tuple.block(0)[0], tuple.block(0)[1]];
        let h = kernel.evaluate(samples, &tuple);
        row_sums[i].add(h);
        row_sums[j].add(h);
    }
    let h1: Vec<f64> = row_sums
        .iter()
        .map(|s| s.value() / (n as f64 - 1.0) - u_n)
        .collect();
    // Σ H₁(x_i) = 0 exactly, so the plain mean of squares is the variance.
    let mut s1 = KahanSum::new();
    for v in &h1 {
        s1.add(v * v);
    }
    let sigma1_sq = s1.value() / n as f64;

    let mut s2 = KahanSum::new();
    for tuple in crate::index::enumerate_tuples(&space)? {
        let [i, j] = [tuple.block(0)[0], tuple.block(0)[1]];
        let h = kernel.evaluate(samples, &tuple);
        let resid = h - u_n - h1[i] - h1[j];
        s2.add(resid * resid);
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let sigma2_sq = s2.value() / pairs;

    Ok(VarianceDecomposition {
        sigma1_sq,
        sigma2_sq,
        n: n as u64,
    })
}

/// Uniform deviation bound for the complete U-process over a VC-major
/// class: `M·{ 2√(2V ln(1+N)/N) + √(ln(1/δ)/N) }`.
pub fn complete_deviation_bound(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let n = inputs.block_count as f64;
    let v = inputs.vc_dimension;
    Ok(inputs.kernel_bound
        * (2.0 * (2.0 * v * (1.0 + n).ln() / n).sqrt() + ((1.0 / inputs.delta).ln() / n).sqrt()))
}

/// Deviation of the incomplete estimator from the complete one, uniform
/// over the class: `M·√(2(V·ln(1+#Λ) + ln(2/δ))/B)`.
pub fn incomplete_vs_complete_bound(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let b = inputs.terms as f64;
    Ok(inputs.kernel_bound
        * (2.0 * (inputs.vc_dimension * inputs.log_lambda + (2.0 / inputs.delta).ln()) / b).sqrt())
}

/// Total deviation of the incomplete estimator from the estimand, as the
/// printed three-term sum:
/// `M·{ 2√(2V ln(1+N)/N) + √(ln(2/δ)/N) + √(2(V·ln(1+#Λ) + ln(4/δ))/B) }`.
pub fn incomplete_total_bound(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let n = inputs.block_count as f64;
    let b = inputs.terms as f64;
    let v = inputs.vc_dimension;
    let t1 = 2.0 * (2.0 * v * (1.0 + n).ln() / n).sqrt();
    let t2 = ((2.0 / inputs.delta).ln() / n).sqrt();
    let t3 = (2.0 * (v * inputs.log_lambda + (4.0 / inputs.delta).ln()) / b).sqrt();
    Ok(inputs.kernel_bound * (t1 + t2 + t3))
}

/// Deviation of the Horvitz-Thompson estimator from the complete
/// U-statistic, with `L = ln(2/δ) + V·ln(1+#Λ)`:
/// Bernoulli design `2M√(L/B) + 2LM/(3B)`; fixed-size without-replacement
/// design `√2·M·√(L/B)`.
pub fn ht_deviation_bound(inputs: &BoundInputs, scheme: Scheme) -> Result<f64> {
    inputs.validate()?;
    let b = inputs.terms as f64;
    let m = inputs.kernel_bound;
    let l = (2.0 / inputs.delta).ln() + inputs.vc_dimension * inputs.log_lambda;
    match scheme {
        Scheme::Bernoulli => Ok(2.0 * m * (l / b).sqrt() + 2.0 * l * m / (3.0 * b)),
        Scheme::WithoutReplacement => Ok(std::f64::consts::SQRT_2 * m * (l / b).sqrt()),
        Scheme::WithReplacement => Err(Error::SchemeMismatch {
            scheme: "with_replacement",
            reason: "with-replacement deviations are covered by the incomplete-U bound",
        }),
    }
}

/// One model in a structural-risk-minimization list: its index `m >= 1`
/// (unique within the list), declared complexity, kernel bound, and the
/// incomplete empirical risk of its fitted rule.
#[derive(Debug, Clone, Copy)]
pub struct ModelSpec {
    pub index: usize,
    pub vc_dimension: f64,
    pub kernel_bound: f64,
    pub risk: f64,
}

/// Distribution-free penalty for model `m`:
/// `2M_m{√(2V_m ln(1+N)/N) + √(2(ln2 + V_m·ln(1+#Λ))/B)} + 2M√((B+n)·ln m / B²)`.
/// The third term vanishes at m = 1.
pub fn penalty(
    terms: u64,
    pooled_n: u64,
    block_count: u64,
    log_lambda: f64,
    model: &ModelSpec,
    envelope: f64,
) -> Result<f64> {
    if terms == 0 {
        return Err(Error::EmptyBudget);
    }
    if model.index == 0 {
        return Err(Error::InvalidArgument("model index m starts at 1".into()));
    }
    if !(model.vc_dimension >= 1.0) || !(model.kernel_bound > 0.0) || !(envelope > 0.0) {
        return Err(Error::InvalidArgument(
            "model complexity, kernel bound and envelope must be positive".into(),
        ));
    }
    if block_count == 0 {
        return Err(Error::InvalidArgument("block count N must be >= 1".into()));
    }
    if !(log_lambda > 0.0) {
        return Err(Error::InvalidArgument(
            "log(1 + #Lambda) must be positive".into(),
        ));
    }
    let b = terms as f64;
    let n = block_count as f64;
    let vm = model.vc_dimension;
    let class_term = 2.0
        * model.kernel_bound
        * ((2.0 * vm * (1.0 + n).ln() / n).sqrt()
            + (2.0 * (std::f64::consts::LN_2 + vm * log_lambda) / b).sqrt());
    let index_term =
        2.0 * envelope * ((b + pooled_n as f64) * (model.index as f64).ln() / (b * b)).sqrt();
    Ok(class_term + index_term)
}

/// Argmin of `risk + penalty` over explicit (index, risk, penalty) triples;
/// ties break toward the smallest model index. Selection is by index, so it
/// is invariant under reordering of the list.
pub fn select_penalized(items: &[(usize, f64, f64)]) -> Result<usize> {
    if items.is_empty() {
        return Err(Error::InvalidArgument("empty model list".into()));
    }
    let mut best: Option<(f64, usize)> = None;
    for &(index, risk, pen) in items {
        let total = risk + pen;
        match best {
            None => best = Some((total, index)),
            Some((bt, bi)) => {
                if total < bt || (total == bt && index < bi) {
                    best = Some((total, index));
                }
            }
        }
    }
    Ok(best.expect("nonempty").1)
}

/// Penalized model selection: pick
/// `argmin_m { risk_m + pen(B, m) }` over the provided models.
pub fn select_model(
    models: &[ModelSpec],
    terms: u64,
    pooled_n: u64,
    block_count: u64,
    log_lambda: f64,
    envelope: f64,
) -> Result<usize> {
    if models.is_empty() {
        return Err(Error::InvalidArgument("empty model list".into()));
    }
    let items = models
        .iter()
        .map(|m| {
            penalty(terms, pooled_n, block_count, log_lambda, m, envelope)
                .map(|p| (m.index, m.risk, p))
        })
        .collect::<Result<Vec<_>>>()?;
    select_penalized(&items)
}
