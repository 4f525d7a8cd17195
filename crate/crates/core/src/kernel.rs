//! The kernel abstraction: a bounded function H evaluated on one index
//! tuple's worth of observations, assumed symmetric within each block of
//! arguments.
//!
//! Symmetry is not enforced at runtime (it would double every evaluation);
//! [`check_block_symmetry`] is a diagnostic that spot-checks it by permuting
//! observations within the selected rows.

use crate::error::{Error, Result};
use crate::index::IndexTuple;
use crate::rng::SplitRng;
use crate::samples::{SampleBlock, SampleSet};

/// A kernel H: pure function of the observations selected by an index
/// tuple. Same inputs always give the same output.
pub trait Kernel {
    /// Degrees `(d_1, ..., d_K)` this kernel expects.
    fn degrees(&self) -> &[usize];

    /// Evaluate H at the observations selected by `tuple`.
    fn evaluate(&self, samples: &SampleSet, tuple: &IndexTuple) -> f64;

    /// Declared uniform bound `M_H >= sup |H|`, when known.
    fn bound(&self) -> Option<f64> {
        None
    }

    /// Cheap structural compatibility check against a sample set; estimators
    /// call this once before iterating.
    fn validate(&self, samples: &SampleSet) -> Result<()> {
        if samples.block_count() != self.degrees().len() {
            return Err(Error::DimensionMismatch(format!(
                "kernel expects {} blocks, sample set has {}",
                self.degrees().len(),
                samples.block_count()
            )));
        }
        Ok(())
    }
}

impl<K: Kernel + ?Sized> Kernel for &K {
    fn degrees(&self) -> &[usize] {
        (**self).degrees()
    }

    fn evaluate(&self, samples: &SampleSet, tuple: &IndexTuple) -> f64 {
        (**self).evaluate(samples, tuple)
    }

    fn bound(&self) -> Option<f64> {
        (**self).bound()
    }

    fn validate(&self, samples: &SampleSet) -> Result<()> {
        (**self).validate(samples)
    }
}

impl Kernel for Box<dyn Kernel + '_> {
    fn degrees(&self) -> &[usize] {
        (**self).degrees()
    }

    fn evaluate(&self, samples: &SampleSet, tuple: &IndexTuple) -> f64 {
        (**self).evaluate(samples, tuple)
    }

    fn bound(&self) -> Option<f64> {
        (**self).bound()
    }

    fn validate(&self, samples: &SampleSet) -> Result<()> {
        (**self).validate(samples)
    }
}

/// Kernel backed by a closure.
pub struct FnKernel<F> {
    degrees: Vec<usize>,
    bound: Option<f64>,
    f: F,
}

impl<F: Fn(&SampleSet, &IndexTuple) -> f64> FnKernel<F> {
    pub fn new(degrees: Vec<usize>, f: F) -> Self {
        FnKernel {
            degrees,
            bound: None,
            f,
        }
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }
}

impl<F: Fn(&SampleSet, &IndexTuple) -> f64> Kernel for FnKernel<F> {
    fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    fn evaluate(&self, samples: &SampleSet, tuple: &IndexTuple) -> f64 {
        (self.f)(samples, tuple)
    }

    fn bound(&self) -> Option<f64> {
        self.bound
    }
}

/// One-sample degree-2 kernel from a function of two feature vectors.
pub fn pairwise<F>(f: F) -> FnKernel<impl Fn(&SampleSet, &IndexTuple) -> f64>
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    FnKernel::new(vec![2], move |samples: &SampleSet, tuple: &IndexTuple| {
        let block = samples.block(0);
        let idx = tuple.block(0);
        f(block.features(idx[0]), block.features(idx[1]))
    })
}

/// Like [`pairwise`] but with labels.
pub fn labeled_pairwise<F>(f: F) -> FnKernel<impl Fn(&SampleSet, &IndexTuple) -> f64>
where
    F: Fn(&[f64], Option<i64>, &[f64], Option<i64>) -> f64,
{
    FnKernel::new(vec![2], move |samples: &SampleSet, tuple: &IndexTuple| {
        let block = samples.block(0);
        let idx = tuple.block(0);
        f(
            block.features(idx[0]),
            block.label(idx[0]),
            block.features(idx[1]),
            block.label(idx[1]),
        )
    })
}

/// Diagnostic for the within-block symmetry assumption: evaluates the kernel
/// at random tuples, then re-evaluates with the selected observations
/// permuted among themselves inside each block. Returns the largest absolute
/// discrepancy seen over `trials` random (tuple, permutation) pairs; an
/// honestly symmetric kernel yields exactly 0.0.
pub fn check_block_symmetry<K: Kernel>(
    kernel: &K,
    samples: &SampleSet,
    space: &crate::index::IndexSpace,
    trials: usize,
    rng: &mut SplitRng,
) -> Result<f64> {
    kernel.validate(samples)?;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let tuple = space.random_tuple(rng);
        let reference = kernel.evaluate(samples, &tuple);
        let permuted = permute_within_tuple(samples, &tuple, rng);
        let shuffled = kernel.evaluate(&permuted, &tuple);
        worst = worst.max((reference - shuffled).abs());
    }
    Ok(worst)
}

/// Copy of `samples` where, inside each block, the observations selected by
/// `tuple` are randomly permuted among themselves.
fn permute_within_tuple(samples: &SampleSet, tuple: &IndexTuple, rng: &mut SplitRng) -> SampleSet {
    let blocks = samples
        .blocks()
        .iter()
        .zip(tuple.blocks().iter())
        .map(|(block, idx)| {
            let mut order: Vec<usize> = (0..block.len()).collect();
            let mut shuffled: Vec<usize> = idx.clone();
            // Fisher-Yates over the selected positions.
            for i in (1..shuffled.len()).rev() {
                let j = rng.below((i + 1) as u64) as usize;
                shuffled.swap(i, j);
            }
            for (src, dst) in idx.iter().zip(shuffled.iter()) {
                order[*src] = *dst;
            }
            let rows: Vec<Vec<f64>> = order.iter().map(|&i| block.features(i).to_vec()).collect();
            let labels = block
                .labels()
                .map(|l| order.iter().map(|&i| l[i]).collect());
            SampleBlock::new(rows, labels).expect("permutation preserves shape")
        })
        .collect();
    SampleSet::new(blocks).expect("non-empty")
}
