//! One-time sampling: approximate the empirical metric-learning risk once,
//! then run projected gradient descent on the frozen approximation.
//!
//! Two arms at matched pair budget `p(p-1)/2`: the complete U-statistic
//! over a p-observation subsample, and an incomplete U-statistic with the
//! same number of pairs drawn from the full index space. The step-size
//! scale η₀ is tuned per (arm, p) on the first trial's objective by final
//! training risk, and the choice is recorded in the report.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::OneTimeConfig;
use crate::data::{load_dataset, PairSet};
use crate::error::{CliError, CliResult};
use crate::metric_opt::{distinct_pair, floyd_indices, projected_gd};
use crate::report::{cell_f64, Report};
use ustat_core::sampling::sample_without_replacement;
use ustat_core::{IndexSpace, SampleBlock, Scheme, SplitRng};

#[derive(Debug, Clone)]
pub struct OneTimeRow {
    pub scheme: &'static str,
    pub p: usize,
    pub seed: u64,
    pub test_risk: f64,
    pub train_risk: f64,
    pub seconds: f64,
}

#[derive(Debug)]
pub struct OneTimeOutcome {
    pub rows: Vec<OneTimeRow>,
    pub chosen_eta0: Vec<(&'static str, usize, f64)>,
    pub report_path: PathBuf,
}

#[derive(Clone, Copy, PartialEq)]
enum Arm {
    CompleteSubsample,
    Incomplete(Scheme),
}

impl Arm {
    fn name(&self) -> &'static str {
        match self {
            Arm::CompleteSubsample => "complete",
            Arm::Incomplete(_) => "incomplete",
        }
    }
}

pub fn run_one_time(cfg: &OneTimeConfig) -> CliResult<OneTimeOutcome> {
    if cfg.trials == 0 {
        return Err(CliError::config("trials must be >= 1"));
    }
    if let Some(&p) = cfg.p_grid.iter().find(|&&p| p < 2) {
        return Err(CliError::domain(format!(
            "subsample size p = {p} cannot form a pair"
        )));
    }
    if cfg.eta0_grid.is_empty() {
        return Err(CliError::config("eta0_grid must not be empty"));
    }
    let scheme = cfg.scheme()?;
    if scheme == Scheme::Bernoulli {
        return Err(CliError::config(
            "Bernoulli sampling has a random term count and cannot honor the matched budget; \
             use with_replacement or without_replacement",
        ));
    }

    let root = SplitRng::new(cfg.seed);
    let (train, test) = load_dataset(&cfg.data, &root)?;
    let test = test.ok_or_else(|| {
        CliError::config("one-time-sampling needs test data (set data.test_n or data.test_path)")
    })?;
    if !train.has_labels() || !test.has_labels() {
        return Err(CliError::config("metric learning needs labeled data"));
    }
    let n = train.len();
    let dim = train.dim();
    if cfg.p_grid.iter().any(|&p| p > n) {
        return Err(CliError::domain(format!(
            "p grid exceeds the training size {n}"
        )));
    }
    let space = IndexSpace::build(&[n], &[2])?;
    let mut test_rng = root.child(1);
    let test_pairs = PairSet::random_from_block(&test, cfg.test_pairs, &mut test_rng)?;

    let arms = [Arm::CompleteSubsample, Arm::Incomplete(scheme)];
    let mut rows: Vec<OneTimeRow> = Vec::new();
    let mut chosen: Vec<(&'static str, usize, f64)> = Vec::new();

    for (pi, &p) in cfg.p_grid.iter().enumerate() {
        let budget = p * (p - 1) / 2;
        for (ai, arm) in arms.iter().enumerate() {
            // η₀ tuning on the first trial's pair draw.
            let tune_pairs = build_pairs(*arm, &train, &space, p, budget, &trial_rng(&root, ai, pi, 0))?;
            let mut best = (f64::INFINITY, cfg.eta0_grid[0]);
            for &eta0 in &cfg.eta0_grid {
                let (_, train_risk, _) =
                    projected_gd(&tune_pairs, dim, cfg.steps, eta0, cfg.threshold_b)?;
                if train_risk < best.0 {
                    best = (train_risk, eta0);
                }
            }
            let eta0 = best.1;
            chosen.push((arm.name(), p, eta0));

            let trial_rows: Vec<CliResult<OneTimeRow>> = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| {
                    let pairs =
                        build_pairs(*arm, &train, &space, p, budget, &trial_rng(&root, ai, pi, trial))?;
                    // matched-budget instrumentation: both arms must
                    // evaluate exactly p(p-1)/2 terms per risk evaluation
                    assert_eq!(pairs.len(), budget, "budget accounting violated");
                    let t0 = Instant::now();
                    let (theta, train_risk, evals) =
                        projected_gd(&pairs, dim, cfg.steps, eta0, cfg.threshold_b)?;
                    let elapsed = t0.elapsed().as_secs_f64();
                    assert_eq!(evals, cfg.steps * budget as u64);
                    let test_risk = test_pairs.risk(&theta, cfg.threshold_b);
                    Ok(OneTimeRow {
                        scheme: arm.name(),
                        p,
                        seed: trial,
                        test_risk,
                        train_risk,
                        seconds: if cfg.record_timing { elapsed } else { 0.0 },
                    })
                })
                .collect();
            for r in trial_rows {
                rows.push(r?);
            }
        }
    }

    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CliError::config(format!("{}: {e}", cfg.out_dir.display())))?;
    let mut report = Report::new(
        "one-time-sampling config:",
        cfg,
        &["scheme", "p", "seed", "test_risk", "train_risk", "seconds"],
    );
    for r in &rows {
        report.row(&[
            r.scheme.to_string(),
            r.p.to_string(),
            r.seed.to_string(),
            cell_f64(r.test_risk),
            cell_f64(r.train_risk),
            cell_f64(r.seconds),
        ]);
    }
    let report_path = cfg.out_dir.join("one_time_report.csv");
    report.write(&report_path)?;

    let mut tuning = Report::new(
        "one-time-sampling config:",
        cfg,
        &["scheme", "p", "eta0"],
    );
    for (scheme, p, eta0) in &chosen {
        tuning.row(&[scheme.to_string(), p.to_string(), cell_f64(*eta0)]);
    }
    tuning.write(&cfg.out_dir.join("one_time_eta0.csv"))?;

    if cfg.plot_data {
        let mut long = Report::new(
            "one-time-sampling config:",
            cfg,
            &["scheme", "p", "seed", "metric", "value"],
        );
        for r in &rows {
            for (metric, value) in [
                ("test_risk", r.test_risk),
                ("train_risk", r.train_risk),
                ("seconds", r.seconds),
            ] {
                long.row(&[
                    r.scheme.to_string(),
                    r.p.to_string(),
                    r.seed.to_string(),
                    metric.to_string(),
                    cell_f64(value),
                ]);
            }
        }
        long.write(&cfg.out_dir.join("one_time_long.csv"))?;
    }

    Ok(OneTimeOutcome {
        rows,
        chosen_eta0: chosen,
        report_path,
    })
}

fn trial_rng(root: &SplitRng, arm: usize, p_index: usize, trial: u64) -> SplitRng {
    root.child(2)
        .child(arm as u64)
        .child(p_index as u64)
        .child(trial)
}

fn build_pairs(
    arm: Arm,
    train: &SampleBlock,
    space: &IndexSpace,
    p: usize,
    budget: usize,
    rng: &SplitRng,
) -> CliResult<PairSet> {
    let mut rng = rng.clone();
    match arm {
        Arm::CompleteSubsample => {
            let indices = floyd_indices(train.len(), p, &mut rng);
            let mut pairs = Vec::with_capacity(budget);
            for a in 0..p {
                for b in (a + 1)..p {
                    pairs.push((indices[a], indices[b]));
                }
            }
            Ok(PairSet::from_pairs(train, &pairs))
        }
        Arm::Incomplete(Scheme::WithReplacement) => {
            let mut pairs = Vec::with_capacity(budget);
            for _ in 0..budget {
                pairs.push(distinct_pair(train.len(), &mut rng));
            }
            Ok(PairSet::from_pairs(train, &pairs))
        }
        Arm::Incomplete(Scheme::WithoutReplacement) => {
            let ts = sample_without_replacement(space, budget as u64, &mut rng)?;
            let pairs: Vec<(usize, usize)> = ts
                .terms()
                .iter()
                .map(|t| (t.block(0)[0], t.block(0)[1]))
                .collect();
            Ok(PairSet::from_pairs(train, &pairs))
        }
        Arm::Incomplete(Scheme::Bernoulli) => {
            Err(CliError::config("Bernoulli not usable at matched budget"))
        }
    }
}
