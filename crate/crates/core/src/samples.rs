//! Sample storage: K independent blocks of fixed-dimension observations.
//!
//! Block `k` holds `n_k` observations; each observation is a real feature
//! vector plus an optional integer label. Observation order is stable, so
//! index `i` in block `k` always refers to the same observation. All types
//! here are immutable after construction and safe to share across threads.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// One sample block: `len` observations of dimension `dim`, stored row-major.
#[derive(Debug, Clone)]
pub struct SampleBlock {
    dim: usize,
    features: Vec<f64>,
    labels: Option<Vec<i64>>,
}

impl SampleBlock {
    pub fn new(rows: Vec<Vec<f64>>, labels: Option<Vec<i64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument(
                "sample block must contain at least one observation".into(),
            ));
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "observations must have at least one feature".into(),
            ));
        }
        let mut features = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "observation {i} has {} features, expected {dim}",
                    row.len()
                )));
            }
            features.extend_from_slice(row);
        }
        if let Some(ref l) = labels {
            if l.len() != rows.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} labels for {} observations",
                    l.len(),
                    rows.len()
                )));
            }
        }
        Ok(SampleBlock {
            dim,
            features,
            labels,
        })
    }

    /// Build directly from flat row-major storage.
    pub fn from_flat(dim: usize, features: Vec<f64>, labels: Option<Vec<i64>>) -> Result<Self> {
        if dim == 0 || features.is_empty() || features.len() % dim != 0 {
            return Err(Error::DimensionMismatch(format!(
                "flat feature buffer of len {} is not a multiple of dim {dim}",
                features.len()
            )));
        }
        if let Some(ref l) = labels {
            if l.len() != features.len() / dim {
                return Err(Error::DimensionMismatch(format!(
                    "{} labels for {} observations",
                    l.len(),
                    features.len() / dim
                )));
            }
        }
        Ok(SampleBlock {
            dim,
            features,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> Option<i64> {
        self.labels.as_ref().map(|l| l[i])
    }

    pub fn has_labels(&self) -> bool {
        self.labels.is_some()
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    /// New block containing the given observations (in the given order).
    pub fn subset(&self, indices: &[usize]) -> SampleBlock {
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            features.extend_from_slice(self.features(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i]).collect());
        SampleBlock {
            dim: self.dim,
            features,
            labels,
        }
    }

    /// Read one block from CSV: header row required, one row per
    /// observation, feature columns, optional trailing `label` column.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let pathstr = path.display().to_string();
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            path: pathstr.clone(),
            line: 1,
            column: 1,
            message: "empty file; header row required".into(),
        })?;
        let cols: Vec<&str> = header.split(',').collect();
        let labeled = cols.last().map(|c| c.trim() == "label").unwrap_or(false);
        let dim = if labeled { cols.len() - 1 } else { cols.len() };
        if dim == 0 {
            return Err(Error::Parse {
                path: pathstr,
                line: 1,
                column: 1,
                message: "no feature columns".into(),
            });
        }

        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut labels: Vec<i64> = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != cols.len() {
                return Err(Error::Parse {
                    path: pathstr,
                    line: idx + 1,
                    column: 1,
                    message: format!("expected {} cells, found {}", cols.len(), cells.len()),
                });
            }
            let mut row = Vec::with_capacity(dim);
            for (c, cell) in cells[..dim].iter().enumerate() {
                row.push(cell.trim().parse::<f64>().map_err(|_| Error::Parse {
                    path: pathstr.clone(),
                    line: idx + 1,
                    column: c + 1,
                    message: format!("not a number: {cell:?}"),
                })?);
            }
            if labeled {
                let cell = cells[dim];
                labels.push(cell.trim().parse::<i64>().map_err(|_| Error::Parse {
                    path: pathstr.clone(),
                    line: idx + 1,
                    column: dim + 1,
                    message: format!("not an integer label: {cell:?}"),
                })?);
            }
            rows.push(row);
        }
        SampleBlock::new(rows, if labeled { Some(labels) } else { None })
    }

    /// Write the block in the format `read_csv` accepts.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for j in 0..self.dim {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "f{j}");
        }
        if self.labels.is_some() {
            out.push_str(",label");
        }
        out.push('\n');
        for i in 0..self.len() {
            let row = self.features(i);
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            if let Some(y) = self.label(i) {
                let _ = write!(out, ",{y}");
            }
            out.push('\n');
        }
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// K independent sample blocks.
#[derive(Debug, Clone)]
pub struct SampleSet {
    blocks: Vec<SampleBlock>,
}

impl SampleSet {
    pub fn new(blocks: Vec<SampleBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptyProblem);
        }
        Ok(SampleSet { blocks })
    }

    /// One-sample convenience constructor.
    pub fn single(block: SampleBlock) -> Self {
        SampleSet {
            blocks: vec![block],
        }
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, k: usize) -> &SampleBlock {
        &self.blocks[k]
    }

    pub fn blocks(&self) -> &[SampleBlock] {
        &self.blocks
    }

    /// Block sizes `(n_1, ..., n_K)`.
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// Pooled size `n = n_1 + ... + n_K`.
    pub fn pooled_size(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// One CSV file per block.
    pub fn from_csv_files(paths: &[impl AsRef<Path>]) -> Result<Self> {
        let blocks = paths
            .iter()
            .map(|p| SampleBlock::read_csv(p.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        SampleSet::new(blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_accessors() {
        let b = SampleBlock::new(
            vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]],
            Some(vec![0, 1, 0]),
        )
        .unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.dim(), 2);
        assert_eq!(b.features(1), &[3.0, 4.0]);
        assert_eq!(b.label(2), Some(0));
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = SampleBlock::new(vec![vec![1.0, 2.0], vec![3.0]], None);
        assert!(err.is_err());
    }

    #[test]
    fn empty_sample_set_rejected() {
        assert!(matches!(SampleSet::new(vec![]), Err(Error::EmptyProblem)));
    }

    #[test]
    fn csv_roundtrip() {
        let dir = std::env::temp_dir().join("ustat_core_samples_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("block.csv");
        let b = SampleBlock::new(
            vec![vec![1.5, -2.0], vec![0.25, 1e-9], vec![3.0, 4.0]],
            Some(vec![1, 2, 3]),
        )
        .unwrap();
        b.write_csv(&path).unwrap();
        let back = SampleBlock::read_csv(&path).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back.dim(), 2);
        for i in 0..3 {
            assert_eq!(back.features(i), b.features(i));
            assert_eq!(back.label(i), b.label(i));
        }
    }

    #[test]
    fn csv_parse_small_unlabeled() {
        let dir = std::env::temp_dir().join("ustat_core_samples_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("plain.csv");
        std::fs::write(&path, "a,b\n1,2\n3,4\n5,6\n").unwrap();
        let b = SampleBlock::read_csv(&path).unwrap();
        assert_eq!((b.len(), b.dim()), (3, 2));
        assert!(!b.has_labels());
    }

    #[test]
    fn csv_error_carries_location() {
        let dir = std::env::temp_dir().join("ustat_core_samples_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "a,b\n1,2\n1,oops\n").unwrap();
        match SampleBlock::read_csv(&path) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!((line, column), (3, 2));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
