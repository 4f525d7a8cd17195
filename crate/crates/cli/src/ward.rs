//! Agglomerative hierarchical clustering with Ward's minimum-variance
//! criterion, via the Lance-Williams update on merge costs. Produces the
//! full nested family of partitions: the m-cluster partition refines the
//! (m-1)-cluster one by construction.

use crate::error::{CliError, CliResult};
use ustat_core::learning::Partition;
use ustat_core::SampleBlock;

/// Ordered list of nested partitions; index m-1 holds the partition into m
/// clusters.
pub struct NestedPartitions {
    parts: Vec<Partition>,
}

impl NestedPartitions {
    pub fn from_partitions(parts: Vec<Partition>) -> CliResult<Self> {
        for (i, p) in parts.iter().enumerate() {
            if p.clusters() != i + 1 {
                return Err(CliError::domain(format!(
                    "partition at position {i} has {} clusters, expected {}",
                    p.clusters(),
                    i + 1
                )));
            }
        }
        if parts.is_empty() {
            return Err(CliError::domain("no partitions given".to_string()));
        }
        Ok(NestedPartitions { parts })
    }

    /// The partition into exactly `m` clusters.
    pub fn partition(&self, m: usize) -> &Partition {
        &self.parts[m - 1]
    }

    pub fn max_clusters(&self) -> usize {
        self.parts.len()
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.parts
    }
}

/// Ward agglomeration over one sample block. Ties in the merge cost break
/// toward the smallest index pair.
pub fn agglomerative_ward(block: &SampleBlock) -> CliResult<NestedPartitions> {
    let n = block.len();
    if n < 2 {
        return Err(CliError::domain(format!(
            "clustering needs at least 2 observations, got {n}"
        )));
    }
    // Merge-cost matrix: Ward cost between singletons is ||x-y||^2 / 2.
    let mut cost = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d2: f64 = block
                .features(i)
                .iter()
                .zip(block.features(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            cost[i * n + j] = 0.5 * d2;
            cost[j * n + i] = 0.5 * d2;
        }
    }
    let mut active: Vec<bool> = vec![true; n];
    let mut sizes: Vec<usize> = vec![1; n];
    // cluster id per observation; cluster ids are the representative slots
    let mut member: Vec<usize> = (0..n).collect();
    let mut snapshots: Vec<Vec<usize>> = Vec::with_capacity(n);
    snapshots.push(member.clone());

    for _step in 0..(n - 1) {
        // cheapest merge, smallest index pair on ties
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..n {
                if !active[j] {
                    continue;
                }
                let c = cost[i * n + j];
                match best {
                    None => best = Some((c, i, j)),
                    Some((bc, _, _)) if c < bc => best = Some((c, i, j)),
                    _ => {}
                }
            }
        }
        let (_, a, b) = best.expect("at least two active clusters");
        // Lance-Williams (Ward): cost(k, a∪b) from cost(k,a), cost(k,b),
        // cost(a,b) with the size coefficients.
        let (na, nb) = (sizes[a] as f64, sizes[b] as f64);
        let cab = cost[a * n + b];
        for k in 0..n {
            if !active[k] || k == a || k == b {
                continue;
            }
            let nk = sizes[k] as f64;
            let denom = na + nb + nk;
            let merged = ((na + nk) * cost[a * n + k] + (nb + nk) * cost[b * n + k]
                - nk * cab)
                / denom;
            cost[a * n + k] = merged;
            cost[k * n + a] = merged;
        }
        active[b] = false;
        sizes[a] += sizes[b];
        for m in member.iter_mut() {
            if *m == b {
                *m = a;
            }
        }
        snapshots.push(member.clone());
    }

    // snapshots[k] has n - k clusters; canonicalize labels by first
    // occurrence and order by cluster count ascending.
    let mut parts: Vec<Partition> = Vec::with_capacity(n);
    for k in (0..n).rev() {
        parts.push(canonical_partition(&snapshots[k], n - k)?);
    }
    NestedPartitions::from_partitions(parts)
}

fn canonical_partition(member: &[usize], clusters: usize) -> CliResult<Partition> {
    let mut remap: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut labels = Vec::with_capacity(member.len());
    for &m in member {
        let next = remap.len();
        labels.push(*remap.entry(m).or_insert(next));
    }
    Partition::new(labels, clusters).map_err(CliError::from)
}
