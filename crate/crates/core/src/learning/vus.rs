//! Volume under the ROC surface: the K-sample degree-(1, ..., 1) kernel
//! `1{s(x₁) < ... < s(x_K)}` with strict inequalities — score ties count
//! as failures, no tie-correction.

use crate::error::{Error, Result};
use crate::index::IndexTuple;
use crate::kernel::Kernel;
use crate::samples::SampleSet;

pub struct VusKernel<S> {
    score: S,
    degrees: Vec<usize>,
}

/// Build the VUS kernel for `blocks` ordered classes under a scoring
/// function.
pub fn vus_kernel<S: Fn(&[f64]) -> f64>(blocks: usize, score: S) -> VusKernel<S> {
    VusKernel {
        score,
        degrees: vec![1; blocks],
    }
}

impl<S: Fn(&[f64]) -> f64> Kernel for VusKernel<S> {
    fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    fn evaluate(&self, samples: &SampleSet, tuple: &IndexTuple) -> f64 {
        let mut prev = f64::NEG_INFINITY;
        for k in 0..self.degrees.len() {
            let s = (self.score)(samples.block(k).features(tuple.block(k)[0]));
            if s <= prev {
                return 0.0;
            }
            prev = s;
        }
        1.0
    }

    fn bound(&self) -> Option<f64> {
        Some(1.0)
    }

    fn validate(&self, samples: &SampleSet) -> Result<()> {
        if samples.block_count() != self.degrees.len() {
            return Err(Error::DimensionMismatch(format!(
                "VUS kernel over {} classes, sample set has {} blocks",
                self.degrees.len(),
                samples.block_count()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::complete_u;
    use crate::index::IndexSpace;
    use crate::samples::{SampleBlock, SampleSet};

    fn block(values: &[f64]) -> SampleBlock {
        SampleBlock::new(values.iter().map(|&v| vec![v]).collect(), None).unwrap()
    }

    #[test]
    fn separated_classes_give_vus_one() {
        let samples = SampleSet::new(vec![
            block(&[0.1, 0.2]),
            block(&[1.1, 1.3, 1.2]),
            block(&[2.5, 2.2]),
        ])
        .unwrap();
        let space = IndexSpace::build(&[2, 3, 2], &[1, 1, 1]).unwrap();
        let k = vus_kernel(3, |x: &[f64]| x[0]);
        assert_eq!(complete_u(&k, &samples, &space).unwrap().value, 1.0);
    }

    #[test]
    fn constant_score_gives_zero() {
        let samples = SampleSet::new(vec![block(&[0.1, 0.2]), block(&[1.1, 1.3])]).unwrap();
        let space = IndexSpace::build(&[2, 2], &[1, 1]).unwrap();
        let k = vus_kernel(2, |_: &[f64]| 0.5);
        assert_eq!(complete_u(&k, &samples, &space).unwrap().value, 0.0);
    }

    #[test]
    fn broken_chain_gives_zero() {
        // K = 3, one observation per class, scores (0.1, 0.5, 0.3)
        let samples =
            SampleSet::new(vec![block(&[0.1]), block(&[0.5]), block(&[0.3])]).unwrap();
        let space = IndexSpace::build(&[1, 1, 1], &[1, 1, 1]).unwrap();
        let k = vus_kernel(3, |x: &[f64]| x[0]);
        assert_eq!(complete_u(&k, &samples, &space).unwrap().value, 0.0);
    }

    #[test]
    fn vus_stays_in_unit_interval() {
        let samples = SampleSet::new(vec![
            block(&[0.4, 1.9, 0.6]),
            block(&[1.1, 0.2, 0.9, 2.0]),
        ])
        .unwrap();
        let space = IndexSpace::build(&[3, 4], &[1, 1]).unwrap();
        let k = vus_kernel(2, |x: &[f64]| x[0]);
        let v = complete_u(&k, &samples, &space).unwrap().value;
        assert!((0.0..=1.0).contains(&v));
    }
}
