//! Pairwise ranking: antisymmetric rules `r(x, x') ∈ {-1, +1}`, the
//! misranking kernel `1{(y - y')·r(x, x') < 0}`, and the excess-risk kernel
//! `q_r = H_r - H_{r*}` against a reference rule. Finite rule classes are
//! plain slices of rules.

use crate::error::{Error, Result};
use crate::index::IndexTuple;
use crate::kernel::Kernel;
use crate::rng::SplitRng;
use crate::samples::SampleSet;

/// An antisymmetric pairwise decision: +1 ranks the first argument above
/// the second. Implementations return ±1 except on measure-zero ties, where
/// 0 (abstention) is tolerated.
pub trait RankingRule {
    fn compare(&self, a: &[f64], b: &[f64]) -> i8;
}

impl<R: RankingRule + ?Sized> RankingRule for &R {
    fn compare(&self, a: &[f64], b: &[f64]) -> i8 {
        (**self).compare(a, b)
    }
}

/// Rank by a single feature: `sign(a[f] - b[f])`.
#[derive(Debug, Clone, Copy)]
pub struct FeatureRule {
    pub feature: usize,
}

impl RankingRule for FeatureRule {
    fn compare(&self, a: &[f64], b: &[f64]) -> i8 {
        sign(a[self.feature] - b[self.feature])
    }
}

/// Threshold rule: ranks by the indicator `1{x[f] > t}`, falling back to a
/// secondary feature comparison when both sides of the threshold agree so
/// the rule stays total on continuous data.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdRule {
    pub feature: usize,
    pub threshold: f64,
    pub tie_feature: usize,
}

impl RankingRule for ThresholdRule {
    fn compare(&self, a: &[f64], b: &[f64]) -> i8 {
        let (ia, ib) = (
            a[self.feature] > self.threshold,
            b[self.feature] > self.threshold,
        );
        match (ia, ib) {
            (true, false) => 1,
            (false, true) => -1,
            _ => sign(a[self.tie_feature] - b[self.tie_feature]),
        }
    }
}

/// The rule with every decision flipped.
#[derive(Debug, Clone, Copy)]
pub struct ReverseRule<R>(pub R);

impl<R: RankingRule> RankingRule for ReverseRule<R> {
    fn compare(&self, a: &[f64], b: &[f64]) -> i8 {
        -self.0.compare(a, b)
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Spot-check of antisymmetry on random pairs drawn from the data; returns
/// the number of violations.
pub fn check_antisymmetry<R: RankingRule>(
    rule: &R,
    samples: &SampleSet,
    trials: usize,
    rng: &mut SplitRng,
) -> usize {
    let block = samples.block(0);
    let n = block.len() as u64;
    let mut violations = 0;
    for _ in 0..trials {
        let i = rng.below(n) as usize;
        let j = rng.below(n) as usize;
        if i == j {
            continue;
        }
        let (a, b) = (block.features(i), block.features(j));
        if rule.compare(a, b) != -rule.compare(b, a) {
            violations += 1;
        }
    }
    violations
}

/// Misranking kernel `H_r((x,y),(x',y')) = 1{(y - y')·r(x, x') < 0}`;
/// symmetric because the rule is antisymmetric, bounded by 1.
pub struct RankingKernel<R> {
    rule: R,
    degrees: [usize; 1],
}

pub fn ranking_kernel<R: RankingRule>(rule: R) -> RankingKernel<R> {
    RankingKernel {
        rule,
        degrees: [2],
    }
}

impl<R> RankingKernel<R> {
    pub fn rule(&self) -> &R {
        &self.rule
    }
}

fn misranked<R: RankingRule>(
    rule: &R,
    samples: &SampleSet,
    tuple: &IndexTuple,
) -> f64 {
    let block = samples.block(0);
    let [i, j] = [tuple.block(0)[0], tuple.block(0)[1]];
    let ya = block.label(i).expect("labeled data");
    let yb = block.label(j).expect("labeled data");
    let r = rule.compare(block.features(i), block.features(j)) as i64;
    if (ya - yb) * r < 0 {
        1.0
    } else {
        0.0
    }
}

fn validate_labeled_pairs(samples: &SampleSet) -> Result<()> {
    if samples.block_count() != 1 {
        return Err(Error::DimensionMismatch(
            "ranking kernels are one-sample".into(),
        ));
    }
    if !samples.block(0).has_labels() {
        return Err(Error::InvalidArgument(
            "ranking kernels require labeled observations".into(),
        ));
    }
    Ok(())
}

impl<R: RankingRule> Kernel for RankingKernel<R> {
    fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    fn evaluate(&self, samples: &SampleSet, tuple: &IndexTuple) -> f64 {
        misranked(&self.rule, samples, tuple)
    }

    fn bound(&self) -> Option<f64> {
        Some(1.0)
    }

    fn validate(&self, samples: &SampleSet) -> Result<()> {
        validate_labeled_pairs(samples)
    }
}

/// Excess kernel `q_r = H_r - H_{r*}` against a reference rule; its
/// U-statistic estimates the excess ranking risk.
pub struct ExcessKernel<R, S> {
    rule: R,
    reference: S,
    degrees: [usize; 1],
}

pub fn excess_kernel<R: RankingRule, S: RankingRule>(rule: R, reference: S) -> ExcessKernel<R, S> {
    ExcessKernel {
        rule,
        reference,
        degrees: [2],
    }
}

impl<R: RankingRule, S: RankingRule> Kernel for ExcessKernel<R, S> {
    fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    fn evaluate(&self, samples: &SampleSet, tuple: &IndexTuple) -> f64 {
        misranked(&self.rule, samples, tuple) - misranked(&self.reference, samples, tuple)
    }

    fn bound(&self) -> Option<f64> {
        Some(1.0)
    }

    fn validate(&self, samples: &SampleSet) -> Result<()> {
        validate_labeled_pairs(samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::complete_u;
    use crate::index::IndexSpace;
    use crate::samples::{SampleBlock, SampleSet};

    fn labeled_line() -> SampleSet {
        // labels follow the first coordinate ordering
        let rows = vec![
            vec![0.1, 7.0],
            vec![0.9, -2.0],
            vec![1.7, 0.4],
            vec![2.4, 3.3],
            vec![3.9, 1.1],
        ];
        SampleSet::single(SampleBlock::new(rows, Some(vec![0, 1, 2, 3, 4])).unwrap())
    }

    #[test]
    fn perfect_ranker_has_zero_risk() {
        let samples = labeled_line();
        let space = IndexSpace::build(&[5], &[2]).unwrap();
        let k = ranking_kernel(FeatureRule { feature: 0 });
        assert_eq!(complete_u(&k, &samples, &space).unwrap().value, 0.0);
    }

    #[test]
    fn reversed_ranker_errs_on_every_distinct_pair() {
        let samples = labeled_line();
        let space = IndexSpace::build(&[5], &[2]).unwrap();
        let k = ranking_kernel(ReverseRule(FeatureRule { feature: 0 }));
        // all 10 pairs have distinct labels, so the risk is exactly 1
        assert_eq!(complete_u(&k, &samples, &space).unwrap().value, 1.0);
    }

    #[test]
    fn excess_kernel_of_rule_against_itself_is_zero() {
        let samples = labeled_line();
        let space = IndexSpace::build(&[5], &[2]).unwrap();
        let k = excess_kernel(FeatureRule { feature: 0 }, FeatureRule { feature: 0 });
        assert_eq!(complete_u(&k, &samples, &space).unwrap().value, 0.0);
    }

    #[test]
    fn threshold_rules_are_antisymmetric() {
        let samples = labeled_line();
        let mut rng = SplitRng::new(5);
        for t in [0.5, 1.0, 2.0, 3.0] {
            let rule = ThresholdRule {
                feature: 0,
                threshold: t,
                tie_feature: 1,
            };
            assert_eq!(check_antisymmetry(&rule, &samples, 200, &mut rng), 0);
        }
    }

    #[test]
    fn unlabeled_data_rejected() {
        let samples = SampleSet::single(
            SampleBlock::new(vec![vec![0.0], vec![1.0]], None).unwrap(),
        );
        let space = IndexSpace::build(&[2], &[2]).unwrap();
        let k = ranking_kernel(FeatureRule { feature: 0 });
        assert!(complete_u(&k, &samples, &space).is_err());
    }
}
