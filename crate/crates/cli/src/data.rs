//! Dataset machinery: the two synthetic generators, CSV ingestion,
//! partition-file IO, metric-model checkpoints, and the precomputed pair
//! sets the metric-learning experiments iterate over.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::config::{DataConfig, DataSource};
use crate::error::{CliError, CliResult};
use ustat_core::learning::Partition;
use ustat_core::linalg::Matrix;
use ustat_core::{SampleBlock, SplitRng};

/// Gaussian mixture with class means confined to a random
/// `subspace_dim`-dimensional linear subspace and shared isotropic
/// covariance `variance·I`; balanced labels. Deterministic per seed.
pub fn generate_gaussian_mixture(
    dim: usize,
    n_classes: usize,
    subspace_dim: usize,
    variance: f64,
    mean_scale: f64,
    n: usize,
    rng: &mut SplitRng,
) -> CliResult<SampleBlock> {
    if subspace_dim > dim {
        return Err(CliError::domain(format!(
            "subspace dimension {subspace_dim} exceeds ambient dimension {dim}"
        )));
    }
    if n_classes == 0 || n == 0 || dim == 0 || subspace_dim == 0 {
        return Err(CliError::domain(
            "mixture needs positive dim, subspace, classes and n".to_string(),
        ));
    }
    if variance < 0.0 {
        return Err(CliError::domain(format!("negative variance {variance}")));
    }
    // Orthonormal basis of a random subspace: Gaussian matrix,
    // Gram-Schmidt on the columns.
    let mut basis = vec![vec![0.0f64; dim]; subspace_dim];
    for col in basis.iter_mut() {
        for v in col.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
    }
    for c in 0..subspace_dim {
        for prev in 0..c {
            let dot: f64 = (0..dim).map(|i| basis[c][i] * basis[prev][i]).sum();
            for i in 0..dim {
                basis[c][i] -= dot * basis[prev][i];
            }
        }
        let norm: f64 = basis[c].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(CliError::domain(
                "degenerate random basis draw; change the seed".to_string(),
            ));
        }
        for v in basis[c].iter_mut() {
            *v /= norm;
        }
    }
    // Class means inside the subspace.
    let mut means = vec![vec![0.0f64; dim]; n_classes];
    for mean in means.iter_mut() {
        for col in basis.iter() {
            let z: f64 = rng.sample(StandardNormal);
            for i in 0..dim {
                mean[i] += mean_scale * z * col[i];
            }
        }
    }
    let sd = variance.sqrt();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % n_classes;
        let mut row = means[class].clone();
        for v in row.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v += sd * z;
        }
        rows.push(row);
        labels.push(class as i64);
    }
    SampleBlock::new(rows, Some(labels)).map_err(CliError::from)
}

/// Paired-cluster geometry for the model-selection experiment: super-center
/// `a` sits at `super_scale·e_a`, and splits into two sub-clusters offset
/// by `±(sub_distance/2)·e_last`; isotropic noise `sigma`. Labels are the
/// sub-cluster ids.
pub fn generate_paired_clusters(
    dim: usize,
    clusters: usize,
    sigma: f64,
    sub_distance: f64,
    super_scale: f64,
    n: usize,
    rng: &mut SplitRng,
) -> CliResult<SampleBlock> {
    if clusters == 0 || clusters % 2 != 0 {
        return Err(CliError::domain(format!(
            "paired-cluster geometry needs an even cluster count, got {clusters}"
        )));
    }
    let supers = clusters / 2;
    if dim < supers + 1 {
        return Err(CliError::domain(format!(
            "dim {dim} too small for {supers} super-centers plus a split axis"
        )));
    }
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let cluster = i % clusters;
        let (sup, side) = (cluster / 2, cluster % 2);
        let mut row = vec![0.0f64; dim];
        row[sup] = super_scale;
        row[dim - 1] = if side == 0 {
            -0.5 * sub_distance
        } else {
            0.5 * sub_distance
        };
        for v in row.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v += sigma * z;
        }
        rows.push(row);
        labels.push(cluster as i64);
    }
    SampleBlock::new(rows, Some(labels)).map_err(CliError::from)
}

/// Resolve a data config into (train, test) blocks. The test block is
/// `None` when the source provides none.
pub fn load_dataset(
    cfg: &DataConfig,
    rng: &SplitRng,
) -> CliResult<(SampleBlock, Option<SampleBlock>)> {
    match cfg.source {
        DataSource::Synthetic => {
            let mut train_rng = rng.child(cfg.data_seed).child(0);
            let train = generate_gaussian_mixture(
                cfg.dim,
                cfg.classes,
                cfg.subspace_dim,
                cfg.variance,
                cfg.mean_scale,
                cfg.train_n,
                &mut train_rng,
            )?;
            let test = if cfg.test_n > 0 {
                let mut test_rng = rng.child(cfg.data_seed).child(1);
                Some(generate_gaussian_mixture(
                    cfg.dim,
                    cfg.classes,
                    cfg.subspace_dim,
                    cfg.variance,
                    cfg.mean_scale,
                    cfg.test_n,
                    &mut test_rng,
                )?)
            } else {
                None
            };
            Ok((train, test))
        }
        DataSource::Clustered => {
            let mut train_rng = rng.child(cfg.data_seed).child(0);
            let train = generate_paired_clusters(
                cfg.dim,
                cfg.clusters,
                cfg.sigma,
                cfg.sub_distance,
                cfg.super_scale,
                cfg.train_n,
                &mut train_rng,
            )?;
            Ok((train, None))
        }
        DataSource::Csv => {
            let train_path = cfg
                .train_path
                .as_ref()
                .ok_or_else(|| CliError::config("csv source needs data.train_path"))?;
            let train = SampleBlock::read_csv(train_path)?;
            let test = cfg
                .test_path
                .as_ref()
                .map(|p| SampleBlock::read_csv(p))
                .transpose()?;
            Ok((train, test))
        }
    }
}

/// Nested-partitions file: one row per m (m = 1 on the first row), n
/// 0-based label columns; row m may only use labels below m.
pub fn write_partitions_csv(parts: &[Partition], path: &Path) -> CliResult<()> {
    let mut out = String::new();
    for p in parts {
        let row = p
            .labels()
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&row);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(CliError::from)
}

pub fn load_partitions_csv(path: &Path) -> CliResult<Vec<Partition>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut parts = Vec::new();
    let mut expected_len: Option<usize> = None;
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let m = idx + 1;
        let labels = line
            .split(',')
            .map(|c| {
                c.trim().parse::<usize>().map_err(|_| {
                    CliError::config(format!(
                        "{}:{}: bad cluster label {c:?}",
                        path.display(),
                        m
                    ))
                })
            })
            .collect::<CliResult<Vec<usize>>>()?;
        if let Some(n) = expected_len {
            if labels.len() != n {
                return Err(CliError::config(format!(
                    "{}:{}: row has {} labels, expected {n}",
                    path.display(),
                    m,
                    labels.len()
                )));
            }
        } else {
            expected_len = Some(labels.len());
        }
        let part = Partition::new(labels, m).map_err(|e| {
            CliError::config(format!("{}:{}: {e}", path.display(), m))
        })?;
        parts.push(part);
    }
    if parts.is_empty() {
        return Err(CliError::config(format!(
            "{}: no partitions found",
            path.display()
        )));
    }
    Ok(parts)
}

/// Metric-model checkpoint: `b,<threshold>` then the matrix rows.
pub fn write_metric_model(matrix: &Matrix, threshold: f64, path: &Path) -> CliResult<()> {
    let mut out = String::new();
    let _ = writeln!(out, "b,{threshold}");
    for i in 0..matrix.rows() {
        let row = matrix
            .row(i)
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&row);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(CliError::from)
}

pub fn read_metric_model(path: &Path) -> CliResult<(Matrix, f64)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| CliError::config(format!("{}: empty model file", path.display())))?;
    let threshold = header
        .strip_prefix("b,")
        .and_then(|v| v.trim().parse::<f64>().ok())
        .ok_or_else(|| {
            CliError::config(format!(
                "{}: first line must be `b,<threshold>`, got {header:?}",
                path.display()
            ))
        })?;
    let rows: Vec<Vec<f64>> = lines
        .enumerate()
        .map(|(i, line)| {
            line.split(',')
                .map(|c| {
                    c.trim().parse::<f64>().map_err(|_| {
                        CliError::config(format!(
                            "{}:{}: bad matrix entry {c:?}",
                            path.display(),
                            i + 2
                        ))
                    })
                })
                .collect()
        })
        .collect::<CliResult<_>>()?;
    let matrix = Matrix::from_rows(rows).map_err(CliError::from)?;
    if !matrix.is_square() {
        return Err(CliError::config(format!(
            "{}: model matrix is not square",
            path.display()
        )));
    }
    Ok((matrix, threshold))
}

/// Labeled pairs with precomputed difference vectors: the inner object the
/// metric-learning loops evaluate. `signs[p]` is +1 for a same-label pair,
/// -1 otherwise.
pub struct PairSet {
    dim: usize,
    diffs: Vec<f64>,
    signs: Vec<f64>,
}

impl PairSet {
    pub fn from_pairs(block: &SampleBlock, pairs: &[(usize, usize)]) -> Self {
        let dim = block.dim();
        let mut diffs = Vec::with_capacity(pairs.len() * dim);
        let mut signs = Vec::with_capacity(pairs.len());
        for &(i, j) in pairs {
            let (a, b) = (block.features(i), block.features(j));
            diffs.extend(a.iter().zip(b.iter()).map(|(x, y)| x - y));
            let (ya, yb) = (
                block.label(i).expect("labeled data"),
                block.label(j).expect("labeled data"),
            );
            signs.push(if ya == yb { 1.0 } else { -1.0 });
        }
        PairSet { dim, diffs, signs }
    }

    /// Uniform random pairs of distinct indices (unordered), seeded.
    pub fn random_from_block(
        block: &SampleBlock,
        count: usize,
        rng: &mut SplitRng,
    ) -> CliResult<Self> {
        if block.len() < 2 {
            return Err(CliError::domain(format!(
                "cannot form pairs from {} observation(s)",
                block.len()
            )));
        }
        let n = block.len() as u64;
        let mut pairs = Vec::with_capacity(count);
        while pairs.len() < count {
            let i = rng.below(n) as usize;
            let j = rng.below(n) as usize;
            if i != j {
                pairs.push((i.min(j), i.max(j)));
            }
        }
        Ok(PairSet::from_pairs(block, &pairs))
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Mean hinge risk at `(matrix, threshold)`.
    pub fn risk(&self, matrix: &Matrix, threshold: f64) -> f64 {
        let mut acc = ustat_core::estimators::KahanSum::new();
        for p in 0..self.len() {
            let d = &self.diffs[p * self.dim..(p + 1) * self.dim];
            let u = self.signs[p] * (threshold - matrix.quadratic_form(d));
            acc.add((1.0 - u).max(0.0));
        }
        acc.value() / self.len() as f64
    }

    /// Mean hinge risk and mean subgradient; `into` is overwritten.
    pub fn risk_and_gradient(&self, matrix: &Matrix, threshold: f64, into: &mut Matrix) -> f64 {
        into.scale(0.0);
        let mut acc = ustat_core::estimators::KahanSum::new();
        let w = 1.0 / self.len() as f64;
        for p in 0..self.len() {
            let d = &self.diffs[p * self.dim..(p + 1) * self.dim];
            let y = self.signs[p];
            let u = y * (threshold - matrix.quadratic_form(d));
            let loss = 1.0 - u;
            if loss > 0.0 {
                acc.add(loss);
                into.add_scaled_outer(w * y, d);
            }
        }
        acc.value() / self.len() as f64
    }
}
