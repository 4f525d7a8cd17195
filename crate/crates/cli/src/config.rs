//! Experiment configuration: flat JSON sections with per-field defaults.
//!
//! A config file is a single JSON object whose top-level keys are sections
//! (`"data"`, `"experiment"`), each a flat map of JSON values. Precedence
//! is flags > file > defaults; the binary applies flag overrides after
//! loading. The fully resolved configuration is serialized into every
//! report so a run can be reproduced from its output alone.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use ustat_core::Scheme;

/// Where the observations come from.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    /// Gaussian mixture with class means in a random low-dimensional
    /// subspace (the metric-learning setting).
    Synthetic,
    /// Paired cluster geometry: well-separated super-centers, each split
    /// into two sub-clusters (the model-selection setting).
    Clustered,
    /// CSV files in the sample-block format.
    Csv,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DataConfig {
    pub source: DataSource,
    // synthetic mixture parameters
    pub dim: usize,
    pub classes: usize,
    pub subspace_dim: usize,
    pub variance: f64,
    pub mean_scale: f64,
    pub train_n: usize,
    pub test_n: usize,
    // clustered-geometry parameters
    pub clusters: usize,
    pub sigma: f64,
    pub sub_distance: f64,
    pub super_scale: f64,
    // csv paths
    pub train_path: Option<PathBuf>,
    pub test_path: Option<PathBuf>,
    /// Data stream index under the experiment seed.
    pub data_seed: u64,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            source: DataSource::Synthetic,
            dim: 40,
            classes: 10,
            subspace_dim: 15,
            variance: 1.0,
            mean_scale: 1.0,
            train_n: 2000,
            test_n: 1000,
            clusters: 8,
            sigma: 0.5,
            sub_distance: 4.0,
            super_scale: 10.0,
            train_path: None,
            test_path: None,
            data_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OneTimeConfig {
    pub data: DataConfig,
    pub p_grid: Vec<usize>,
    pub trials: u64,
    pub steps: u64,
    pub eta0_grid: Vec<f64>,
    pub threshold_b: f64,
    /// Size of the fixed random test-pair set.
    pub test_pairs: usize,
    /// Scheme for the incomplete arm (the complete arm always subsamples
    /// observations).
    pub incomplete_scheme: String,
    pub record_timing: bool,
    pub plot_data: bool,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for OneTimeConfig {
    fn default() -> Self {
        OneTimeConfig {
            data: DataConfig::default(),
            p_grid: vec![20, 40, 60, 80],
            trials: 50,
            steps: 500,
            eta0_grid: vec![1.0, 2.5, 5.0, 10.0, 25.0, 50.0],
            threshold_b: 2.0,
            test_pairs: 100_000,
            incomplete_scheme: "with_replacement".into(),
            record_timing: false,
            plot_data: false,
            seed: 0,
            out_dir: PathBuf::from("one_time_out"),
        }
    }
}

impl OneTimeConfig {
    pub fn scheme(&self) -> CliResult<Scheme> {
        Scheme::parse(&self.incomplete_scheme).map_err(CliError::from)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SgdCompareConfig {
    pub data: DataConfig,
    pub m_grid: Vec<usize>,
    pub runs: u64,
    pub steps: u64,
    pub eta0_grid: Vec<f64>,
    pub threshold_b: f64,
    pub eval_pairs: usize,
    pub eval_every: u64,
    pub record_timing: bool,
    pub plot_data: bool,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for SgdCompareConfig {
    fn default() -> Self {
        SgdCompareConfig {
            data: DataConfig::default(),
            m_grid: vec![10, 28, 55, 105, 253],
            runs: 20,
            steps: 2000,
            eta0_grid: vec![1.0, 2.5, 5.0, 10.0, 25.0, 50.0],
            threshold_b: 2.0,
            eval_pairs: 20_000,
            eval_every: 100,
            record_timing: false,
            plot_data: false,
            seed: 0,
            out_dir: PathBuf::from("sgd_compare_out"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSelectConfig {
    pub data: DataConfig,
    /// Incomplete term budget B.
    pub budget: u64,
    /// Penalty scale: pen(m) = c·ln(m).
    pub c: f64,
    pub max_models: usize,
    pub trials: u64,
    /// Sampling scheme for the incomplete risk.
    pub scheme: String,
    /// Optional nested-partitions CSV; when absent the partitions come
    /// from Ward agglomeration of the data.
    pub partitions_path: Option<PathBuf>,
    pub record_timing: bool,
    pub plot_data: bool,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for ModelSelectConfig {
    fn default() -> Self {
        ModelSelectConfig {
            data: DataConfig {
                source: DataSource::Clustered,
                dim: 5,
                train_n: 500,
                ..DataConfig::default()
            },
            budget: 500,
            c: 1.1,
            max_models: 20,
            trials: 100,
            scheme: "with_replacement".into(),
            partitions_path: None,
            record_timing: false,
            plot_data: false,
            seed: 0,
            out_dir: PathBuf::from("model_select_out"),
        }
    }
}

impl ModelSelectConfig {
    pub fn scheme(&self) -> CliResult<Scheme> {
        Scheme::parse(&self.scheme).map_err(CliError::from)
    }
}

/// Load one experiment config from a sectioned JSON file. The
/// `"experiment"` section feeds the experiment struct, the `"data"`
/// section its `data` field.
pub fn load_config<T>(path: &Path) -> CliResult<T>
where
    T: Default + serde::de::DeserializeOwned + serde::Serialize + HasDataSection,
{
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{} is not valid JSON: {e}", path.display())))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::config("config file must be a JSON object of sections"))?;
    for key in obj.keys() {
        if key != "experiment" && key != "data" {
            return Err(CliError::config(format!(
                "unknown config section {key:?} (expected \"experiment\" and/or \"data\")"
            )));
        }
    }
    // Start from defaults serialized to JSON, overlay the file sections,
    // then deserialize back: unknown keys inside sections fail loudly.
    let mut base = serde_json::to_value(T::default())
        .map_err(|e| CliError::config(format!("internal default serialization: {e}")))?;
    if let Some(exp) = obj.get("experiment") {
        let exp = exp
            .as_object()
            .ok_or_else(|| CliError::config("\"experiment\" section must be an object"))?;
        overlay(&mut base, exp)?;
    }
    if let Some(data) = obj.get("data") {
        let data = data
            .as_object()
            .ok_or_else(|| CliError::config("\"data\" section must be an object"))?;
        let slot = base
            .as_object_mut()
            .expect("default config is an object")
            .entry("data")
            .or_insert(serde_json::Value::Object(Default::default()));
        overlay(slot, data)?;
    }
    serde_json::from_value(base).map_err(|e| CliError::config(format!("bad config value: {e}")))
}

fn overlay(
    base: &mut serde_json::Value,
    section: &serde_json::Map<String, serde_json::Value>,
) -> CliResult<()> {
    let obj = base
        .as_object_mut()
        .ok_or_else(|| CliError::config("section overlay target is not an object"))?;
    for (k, v) in section {
        if !obj.contains_key(k) {
            return Err(CliError::config(format!("unknown config key {k:?}")));
        }
        obj.insert(k.clone(), v.clone());
    }
    Ok(())
}

/// Marker for config types whose JSON shape carries a `data` field.
pub trait HasDataSection {}

impl HasDataSection for OneTimeConfig {}
impl HasDataSection for SgdCompareConfig {}
impl HasDataSection for ModelSelectConfig {}
