//! Shared fixtures for the benchmark targets.

use ustat_cli::data::generate_gaussian_mixture;
use ustat_core::{SampleBlock, SampleSet, SplitRng};

/// Labeled mixture block used across benchmarks.
pub fn mixture(n: usize, dim: usize) -> SampleBlock {
    let mut rng = SplitRng::new(42);
    generate_gaussian_mixture(dim, 5, dim.min(5), 1.0, 2.0, n, &mut rng).expect("valid mixture")
}

pub fn mixture_samples(n: usize, dim: usize) -> SampleSet {
    SampleSet::single(mixture(n, dim))
}
