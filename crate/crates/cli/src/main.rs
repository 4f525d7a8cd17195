//! `ustat`: estimate U-statistic risks completely or incompletely, evaluate
//! the deviation bounds, select models, run SGD, and drive the three
//! experiment pipelines. Exit codes: 0 success, 2 configuration error,
//! 3 numeric/domain error.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use ustat_cli::config::{
    load_config, DataConfig, ModelSelectConfig, OneTimeConfig, SgdCompareConfig,
};
use ustat_cli::error::CliResult;
use ustat_cli::experiments::{run_model_select, run_one_time, run_sgd_compare};

use ustat_cli::commands;

#[derive(Parser)]
#[command(
    name = "ustat",
    about = "Incomplete U-statistic risk estimation, bounds and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic Gaussian-mixture dataset as CSV.
    GenData {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 40)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        classes: usize,
        #[arg(long, default_value_t = 15)]
        subspace_dim: usize,
        #[arg(long, default_value_t = 1.0)]
        variance: f64,
        #[arg(long, default_value_t = 1.0)]
        mean_scale: f64,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate a risk estimator on a dataset and kernel spec.
    Estimate {
        /// One CSV file per sample block.
        #[arg(long, required = true)]
        data: Vec<PathBuf>,
        #[arg(long)]
        kernel: String,
        /// complete | incomplete | ht
        #[arg(long)]
        estimator: String,
        /// Comma-separated degrees, e.g. "2" or "1,1,1".
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<usize>,
        /// with_replacement | without_replacement | bernoulli
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long)]
        terms: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Enumeration cap override for the complete estimator.
        #[arg(long)]
        cap: Option<u128>,
    },
    /// Evaluate a closed-form deviation bound / variance formula.
    Bounds {
        #[arg(long)]
        bound: String,
        #[arg(long, default_value_t = 1.0)]
        kernel_bound: f64,
        #[arg(long, default_value_t = 1.0)]
        vc: f64,
        /// Effective block count N = min_k floor(n_k / d_k).
        #[arg(long)]
        blocks: Option<u64>,
        /// ln(1 + #Lambda); alternatively pass --sizes/--degrees.
        #[arg(long)]
        log_lambda: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1)]
        terms: u64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        pooled_n: Option<u64>,
        #[arg(long, default_value_t = 1)]
        model_index: usize,
        #[arg(long)]
        envelope: Option<f64>,
        #[arg(long)]
        var_complete: Option<f64>,
        #[arg(long)]
        var_kernel: Option<f64>,
    },
    /// Penalized model selection over a models CSV.
    SelectModel {
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        terms: u64,
        #[arg(long)]
        pooled_n: u64,
        #[arg(long)]
        blocks: Option<u64>,
        #[arg(long)]
        log_lambda: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<usize>>,
        #[arg(long)]
        envelope: Option<f64>,
    },
    /// Metric-learning SGD on a labeled CSV dataset.
    Sgd {
        #[arg(long)]
        data: PathBuf,
        /// incomplete | complete-subsample | full
        #[arg(long)]
        mode: String,
        #[arg(long)]
        terms: Option<u64>,
        #[arg(long)]
        subsample: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        steps: u64,
        #[arg(long, default_value_t = 10.0)]
        eta0: f64,
        #[arg(long, default_value_t = 2.0)]
        threshold: f64,
        /// every-step | final
        #[arg(long, default_value = "final")]
        projection: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        eval_data: Option<PathBuf>,
        #[arg(long, default_value_t = 10000)]
        eval_pairs: usize,
        #[arg(long, default_value_t = 100)]
        eval_every: u64,
        /// Write <prefix>.model.csv and <prefix>.trajectory.csv.
        #[arg(long)]
        out_prefix: Option<PathBuf>,
    },
    /// Run an experiment pipeline from a JSON config file.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCommand,
    },
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Fixed risk approximation, then projected gradient descent.
    OneTimeSampling {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: CommonOverrides,
    },
    /// Per-step gradient estimation: complete-subsample vs incomplete.
    SgdCompare {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: CommonOverrides,
    },
    /// Penalized clustering model selection.
    ModelSelect {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: CommonOverrides,
    },
}

#[derive(clap::Args)]
struct CommonOverrides {
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    record_timing: bool,
    #[arg(long)]
    plot_data: bool,
    #[arg(long)]
    train_n: Option<usize>,
    #[arg(long)]
    test_n: Option<usize>,
}

impl CommonOverrides {
    fn apply_data(&self, data: &mut DataConfig) {
        if let Some(n) = self.train_n {
            data.train_n = n;
        }
        if let Some(n) = self.test_n {
            data.test_n = n;
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(stdout) => {
            print!("{stdout}");
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::GenData {
            out,
            dim,
            classes,
            subspace_dim,
            variance,
            mean_scale,
            n,
            seed,
        } => commands::gen_data(&commands::GenDataArgs {
            out,
            dim,
            classes,
            subspace_dim,
            variance,
            mean_scale,
            n,
            seed,
        }),
        Command::Estimate {
            data,
            kernel,
            estimator,
            degrees,
            scheme,
            terms,
            seed,
            cap,
        } => commands::estimate(&commands::EstimateArgs {
            data,
            kernel,
            estimator,
            degrees,
            scheme,
            terms,
            seed,
            cap,
        }),
        Command::Bounds {
            bound,
            kernel_bound,
            vc,
            blocks,
            log_lambda,
            sizes,
            degrees,
            terms,
            delta,
            pooled_n,
            model_index,
            envelope,
            var_complete,
            var_kernel,
        } => commands::bounds(&commands::BoundsArgs {
            bound,
            kernel_bound,
            vc,
            blocks,
            log_lambda,
            sizes,
            degrees,
            terms,
            delta,
            pooled_n,
            model_index,
            envelope,
            var_complete,
            var_kernel,
        }),
        Command::SelectModel {
            models,
            terms,
            pooled_n,
            blocks,
            log_lambda,
            sizes,
            degrees,
            envelope,
        } => commands::select_model_cmd(&commands::SelectModelArgs {
            models,
            terms,
            pooled_n,
            blocks,
            log_lambda,
            sizes,
            degrees,
            envelope,
        }),
        Command::Sgd {
            data,
            mode,
            terms,
            subsample,
            steps,
            eta0,
            threshold,
            projection,
            seed,
            eval_data,
            eval_pairs,
            eval_every,
            out_prefix,
        } => commands::sgd_cmd(&commands::SgdArgs {
            data,
            mode,
            terms,
            subsample,
            steps,
            eta0,
            threshold,
            projection,
            seed,
            eval_data,
            eval_pairs,
            eval_every,
            out_prefix,
        }),
        Command::Experiment { which } => match which {
            ExperimentCommand::OneTimeSampling { config, overrides } => {
                let mut cfg: OneTimeConfig = match config {
                    Some(path) => load_config(&path)?,
                    None => OneTimeConfig::default(),
                };
                if let Some(d) = overrides.out_dir.clone() {
                    cfg.out_dir = d;
                }
                if let Some(s) = overrides.seed {
                    cfg.seed = s;
                }
                if let Some(t) = overrides.trials {
                    cfg.trials = t;
                }
                if let Some(t) = overrides.steps {
                    cfg.steps = t;
                }
                if overrides.record_timing {
                    cfg.record_timing = true;
                }
                if overrides.plot_data {
                    cfg.plot_data = true;
                }
                overrides.apply_data(&mut cfg.data);
                let outcome = run_one_time(&cfg)?;
                Ok(format!("report,{}\n", outcome.report_path.display()))
            }
            ExperimentCommand::SgdCompare { config, overrides } => {
                let mut cfg: SgdCompareConfig = match config {
                    Some(path) => load_config(&path)?,
                    None => SgdCompareConfig::default(),
                };
                if let Some(d) = overrides.out_dir.clone() {
                    cfg.out_dir = d;
                }
                if let Some(s) = overrides.seed {
                    cfg.seed = s;
                }
                if let Some(t) = overrides.trials {
                    cfg.runs = t;
                }
                if let Some(t) = overrides.steps {
                    cfg.steps = t;
                }
                if overrides.record_timing {
                    cfg.record_timing = true;
                }
                if overrides.plot_data {
                    cfg.plot_data = true;
                }
                overrides.apply_data(&mut cfg.data);
                let outcome = run_sgd_compare(&cfg)?;
                Ok(format!(
                    "curves,{}\nfinals,{}\n",
                    outcome.curves_path.display(),
                    outcome.finals_path.display()
                ))
            }
            ExperimentCommand::ModelSelect { config, overrides } => {
                let mut cfg: ModelSelectConfig = match config {
                    Some(path) => load_config(&path)?,
                    None => ModelSelectConfig::default(),
                };
                if let Some(d) = overrides.out_dir.clone() {
                    cfg.out_dir = d;
                }
                if let Some(s) = overrides.seed {
                    cfg.seed = s;
                }
                if let Some(t) = overrides.trials {
                    cfg.trials = t;
                }
                if overrides.record_timing {
                    cfg.record_timing = true;
                }
                if overrides.plot_data {
                    cfg.plot_data = true;
                }
                overrides.apply_data(&mut cfg.data);
                let outcome = run_model_select(&cfg)?;
                Ok(format!(
                    "report,{}\ncomplete_selection,{}\nincomplete_agreement,{}\nbaseline_agreement,{}\n",
                    outcome.report_path.display(),
                    outcome.complete_selection,
                    outcome.incomplete_agreement,
                    outcome.baseline_agreement
                ))
            }
        },
    }
}
