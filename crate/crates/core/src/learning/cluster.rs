//! Clustering risk: the within-cluster point scatter, a one-sample
//! degree-2 U-statistic with kernel `D(x, x')·1{same cluster}`.

use crate::error::{Error, Result};
use crate::index::IndexTuple;
use crate::kernel::Kernel;
use crate::samples::SampleSet;

/// Assignment of each observation to a cluster id in `[0, clusters)`.
/// Empty ids are permitted, so nested families can share an id range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    clusters: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, clusters: usize) -> Result<Self> {
        if clusters == 0 {
            return Err(Error::InvalidArgument("partition needs >= 1 cluster".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= clusters) {
            return Err(Error::InvalidArgument(format!(
                "cluster label {bad} out of range 0..{clusters}"
            )));
        }
        Ok(Partition { labels, clusters })
    }

    /// Every observation in its own cluster.
    pub fn singletons(n: usize) -> Self {
        Partition {
            labels: (0..n).collect(),
            clusters: n,
        }
    }

    /// All observations in one cluster.
    pub fn single_cluster(n: usize) -> Self {
        Partition {
            labels: vec![0; n],
            clusters: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn same_cluster(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }
}

/// `H(x, x') = D(x, x')·1{x, x' in the same cluster}`; its complete
/// U-statistic is the empirical within-cluster point scatter.
pub struct ClusteringKernel<D> {
    distance: D,
    partition: Partition,
    degrees: [usize; 1],
}

pub fn clustering_kernel<D>(distance: D, partition: Partition) -> ClusteringKernel<D>
where
    D: Fn(&[f64], &[f64]) -> f64,
{
    ClusteringKernel {
        distance,
        partition,
        degrees: [2],
    }
}

impl<D: Fn(&[f64], &[f64]) -> f64> Kernel for ClusteringKernel<D> {
    fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    fn evaluate(&self, samples: &SampleSet, tuple: &IndexTuple) -> f64 {
        let [i, j] = [tuple.block(0)[0], tuple.block(0)[1]];
        if !self.partition.same_cluster(i, j) {
            return 0.0;
        }
        let block = samples.block(0);
        (self.distance)(block.features(i), block.features(j))
    }

    fn validate(&self, samples: &SampleSet) -> Result<()> {
        if samples.block_count() != 1 {
            return Err(Error::DimensionMismatch(
                "clustering kernel is one-sample".into(),
            ));
        }
        if self.partition.len() != samples.block(0).len() {
            return Err(Error::DimensionMismatch(format!(
                "partition over {} points, sample has {}",
                self.partition.len(),
                samples.block(0).len()
            )));
        }
        Ok(())
    }
}

/// Squared Euclidean distance, the usual scatter dissimilarity.
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}
