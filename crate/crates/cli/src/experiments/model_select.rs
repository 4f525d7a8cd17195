//! Clustering model selection: nested Ward partitions scored by the
//! within-cluster scatter plus a `c·ln(m)` complexity penalty.
//!
//! The reference selection uses the complete risk. Each trial repeats the
//! selection with an incomplete risk over B sampled terms (one term set
//! shared by all partitions, so the comparison is paired) and with the
//! matched-budget baseline: the complete risk of a random q-observation
//! subsample with q(q-1)/2 <= B. Reported are both agreement rates with
//! the reference selection.

use std::path::PathBuf;

use rayon::prelude::*;

use crate::config::ModelSelectConfig;
use crate::data::{load_dataset, load_partitions_csv};
use crate::error::{CliError, CliResult};
use crate::metric_opt::floyd_indices;
use crate::report::{cell_f64, Report};
use crate::ward::agglomerative_ward;
use ustat_core::bounds::select_penalized;
use ustat_core::estimators::{complete_u, horvitz_thompson, incomplete_u};
use ustat_core::learning::cluster::{clustering_kernel, squared_euclidean};
use ustat_core::learning::Partition;
use ustat_core::sampling::{
    sample_bernoulli, sample_with_replacement, sample_without_replacement,
};
use ustat_core::{IndexSpace, SampleSet, Scheme, SplitRng};

#[derive(Debug)]
pub struct ModelSelectOutcome {
    pub complete_selection: usize,
    pub complete_risks: Vec<f64>,
    pub incomplete_agreement: f64,
    pub baseline_agreement: f64,
    pub baseline_subsample: usize,
    pub trial_rows: Vec<(u64, usize, usize)>,
    pub report_path: PathBuf,
}

pub fn run_model_select(cfg: &ModelSelectConfig) -> CliResult<ModelSelectOutcome> {
    if cfg.trials == 0 {
        return Err(CliError::config("trials must be >= 1"));
    }
    if cfg.max_models == 0 {
        return Err(CliError::config("max_models must be >= 1"));
    }
    let scheme = cfg.scheme()?;
    let root = SplitRng::new(cfg.seed);
    let (train, _) = load_dataset(&cfg.data, &root)?;
    let n = train.len();
    if cfg.max_models > n {
        return Err(CliError::domain(format!(
            "cannot build {} partitions from {n} observations",
            cfg.max_models
        )));
    }
    let space = IndexSpace::build(&[n], &[2])?;
    if scheme == Scheme::WithoutReplacement
        && num_bigint::BigUint::from(cfg.budget) > *space.cardinality()
    {
        return Err(CliError::domain(format!(
            "budget {} exceeds the {} available pairs",
            cfg.budget,
            space.cardinality()
        )));
    }

    let partitions: Vec<Partition> = match &cfg.partitions_path {
        Some(path) => {
            let parts = load_partitions_csv(path)?;
            if parts.len() < cfg.max_models {
                return Err(CliError::config(format!(
                    "{} holds {} partitions, max_models is {}",
                    path.display(),
                    parts.len(),
                    cfg.max_models
                )));
            }
            if parts[0].len() != n {
                return Err(CliError::config(format!(
                    "partitions cover {} observations, data has {n}",
                    parts[0].len()
                )));
            }
            parts.into_iter().take(cfg.max_models).collect()
        }
        None => {
            let nested = agglomerative_ward(&train)?;
            (1..=cfg.max_models)
                .map(|m| nested.partition(m).clone())
                .collect()
        }
    };
    let samples = SampleSet::single(train.clone());

    // Reference: complete risks and penalized selection.
    let complete_risks: Vec<f64> = partitions
        .iter()
        .map(|p| {
            complete_u(
                &clustering_kernel(squared_euclidean, p.clone()),
                &samples,
                &space,
            )
            .map(|r| r.value)
        })
        .collect::<ustat_core::Result<_>>()?;
    let criterion_items = |risks: &[f64]| -> Vec<(usize, f64, f64)> {
        risks
            .iter()
            .enumerate()
            .map(|(i, &r)| (i + 1, r, cfg.c * ((i + 1) as f64).ln()))
            .collect()
    };
    let complete_selection = select_penalized(&criterion_items(&complete_risks))?;

    // Matched-budget baseline subsample size: largest q with q(q-1)/2 <= B.
    let mut q = 2usize;
    while (q + 1) * q / 2 <= cfg.budget as usize && q < n {
        q += 1;
    }
    let baseline_subsample = q;

    let trial_rows: Vec<CliResult<(u64, usize, usize)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = root.child(100 + trial);
            // one term set shared across all partitions
            let terms = match scheme {
                Scheme::WithReplacement => sample_with_replacement(&space, cfg.budget, &mut rng)?,
                Scheme::WithoutReplacement => {
                    sample_without_replacement(&space, cfg.budget, &mut rng)?
                }
                Scheme::Bernoulli => sample_bernoulli(&space, cfg.budget as f64, &mut rng)?,
            };
            let incomplete_risks: Vec<f64> = partitions
                .iter()
                .map(|p| {
                    let kernel = clustering_kernel(squared_euclidean, p.clone());
                    match scheme {
                        Scheme::Bernoulli => {
                            horvitz_thompson(&kernel, &samples, &terms, &space).map(|r| r.value)
                        }
                        _ => incomplete_u(&kernel, &samples, &terms).map(|r| r.value),
                    }
                })
                .collect::<ustat_core::Result<_>>()?;
            let sel_inc = select_penalized(&criterion_items(&incomplete_risks))?;

            // baseline: complete risk of a fresh q-point subsample
            let idx = floyd_indices(n, baseline_subsample, &mut rng);
            let sub_block = train.subset(&idx);
            let sub_samples = SampleSet::single(sub_block);
            let sub_space = IndexSpace::build(&[baseline_subsample], &[2])?;
            let baseline_risks: Vec<f64> = partitions
                .iter()
                .map(|p| {
                    let labels: Vec<usize> = idx.iter().map(|&i| p.label(i)).collect();
                    let sub_part = Partition::new(labels, p.clusters())?;
                    complete_u(
                        &clustering_kernel(squared_euclidean, sub_part),
                        &sub_samples,
                        &sub_space,
                    )
                    .map(|r| r.value)
                })
                .collect::<ustat_core::Result<_>>()?;
            let sel_base = select_penalized(&criterion_items(&baseline_risks))?;
            Ok((trial, sel_inc, sel_base))
        })
        .collect();
    let trial_rows: Vec<(u64, usize, usize)> =
        trial_rows.into_iter().collect::<CliResult<_>>()?;

    let agree = |sel: usize| -> f64 {
        if sel == complete_selection {
            1.0
        } else {
            0.0
        }
    };
    let incomplete_agreement =
        trial_rows.iter().map(|&(_, s, _)| agree(s)).sum::<f64>() / cfg.trials as f64;
    let baseline_agreement =
        trial_rows.iter().map(|&(_, _, s)| agree(s)).sum::<f64>() / cfg.trials as f64;

    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CliError::config(format!("{}: {e}", cfg.out_dir.display())))?;

    let mut risks_report = Report::new(
        "model-select config:",
        cfg,
        &["m", "complete_risk", "penalty", "criterion"],
    );
    // Pair bookkeeping: the risk averages over unordered pairs; the
    // ordered-pair count is recorded alongside for comparison with
    // conventions that count both orders.
    risks_report.note("pairs_unordered", space.cardinality());
    risks_report.note("pairs_ordered", n * (n - 1));
    for (i, &r) in complete_risks.iter().enumerate() {
        let pen = cfg.c * ((i + 1) as f64).ln();
        risks_report.row(&[
            (i + 1).to_string(),
            cell_f64(r),
            cell_f64(pen),
            cell_f64(r + pen),
        ]);
    }
    risks_report.write(&cfg.out_dir.join("model_select_risks.csv"))?;

    let mut report = Report::new(
        "model-select config:",
        cfg,
        &["trial", "selected_incomplete", "selected_baseline"],
    );
    for (trial, sel_inc, sel_base) in &trial_rows {
        report.row(&[
            trial.to_string(),
            sel_inc.to_string(),
            sel_base.to_string(),
        ]);
    }
    let report_path = cfg.out_dir.join("model_select_report.csv");
    report.write(&report_path)?;

    let mut summary = Report::new(
        "model-select config:",
        cfg,
        &[
            "complete_selection",
            "incomplete_agreement",
            "baseline_agreement",
            "baseline_subsample",
            "budget",
        ],
    );
    summary.row(&[
        complete_selection.to_string(),
        cell_f64(incomplete_agreement),
        cell_f64(baseline_agreement),
        baseline_subsample.to_string(),
        cfg.budget.to_string(),
    ]);
    summary.write(&cfg.out_dir.join("model_select_summary.csv"))?;

    if cfg.plot_data {
        let mut long = Report::new(
            "model-select config:",
            cfg,
            &["trial", "metric", "value"],
        );
        for (i, &r) in complete_risks.iter().enumerate() {
            long.row(&[
                "-".to_string(),
                format!("complete_risk_m{}", i + 1),
                cell_f64(r),
            ]);
        }
        for (trial, sel_inc, sel_base) in &trial_rows {
            long.row(&[
                trial.to_string(),
                "selected_incomplete".to_string(),
                sel_inc.to_string(),
            ]);
            long.row(&[
                trial.to_string(),
                "selected_baseline".to_string(),
                sel_base.to_string(),
            ]);
        }
        long.write(&cfg.out_dir.join("model_select_long.csv"))?;
    }

    Ok(ModelSelectOutcome {
        complete_selection,
        complete_risks,
        incomplete_agreement,
        baseline_agreement,
        baseline_subsample,
        trial_rows,
        report_path,
    })
}
