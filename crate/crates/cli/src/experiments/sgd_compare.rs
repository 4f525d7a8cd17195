//! SGD strategy comparison: at each iteration the gradient is estimated
//! either from the complete U-statistic of a fresh n'-observation
//! subsample ("complete") or from an incomplete U-statistic with the same
//! number of terms ("incomplete"). Mini-batch sizes m map to the largest
//! n' with n'(n'-1)/2 <= m; the realized budget is recorded. η₀ is chosen
//! per strategy by best training risk over the grid, the PSD projection
//! happens once at the end of each run, and test-risk curves are sampled
//! every `eval_every` iterations on the raw iterate.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::SgdCompareConfig;
use crate::data::{load_dataset, PairSet};
use crate::error::{CliError, CliResult};
use crate::metric_opt::{sgd_metric, StepGradient};
use crate::report::{cell_f64, Report};
use ustat_core::SplitRng;

#[derive(Debug, Clone)]
pub struct SgdFinalRow {
    pub strategy: &'static str,
    pub m: usize,
    pub n_prime: usize,
    pub budget: usize,
    pub eta0: f64,
    pub run: u64,
    pub final_test_risk: f64,
    pub final_train_risk: f64,
    pub seconds: f64,
}

#[derive(Debug)]
pub struct SgdCompareOutcome {
    pub finals: Vec<SgdFinalRow>,
    pub curves_path: PathBuf,
    pub finals_path: PathBuf,
}

/// Largest n' whose complete pair count fits the mini-batch size, and the
/// realized budget n'(n'-1)/2.
pub fn subsample_for_batch(m: usize) -> CliResult<(usize, usize)> {
    if m < 1 {
        return Err(CliError::domain(format!("mini-batch size {m} too small")));
    }
    let mut q = 2usize;
    while (q + 1) * q / 2 <= m {
        q += 1;
    }
    Ok((q, q * (q - 1) / 2))
}

pub fn run_sgd_compare(cfg: &SgdCompareConfig) -> CliResult<SgdCompareOutcome> {
    if cfg.runs == 0 {
        return Err(CliError::config("runs must be >= 1"));
    }
    if cfg.eta0_grid.is_empty() {
        return Err(CliError::config("eta0_grid must not be empty"));
    }
    if cfg.eval_every == 0 {
        return Err(CliError::config("eval_every must be >= 1"));
    }
    let root = SplitRng::new(cfg.seed);
    let (train, test) = load_dataset(&cfg.data, &root)?;
    let test = test.ok_or_else(|| {
        CliError::config("sgd-compare needs test data (set data.test_n or data.test_path)")
    })?;
    if !train.has_labels() || !test.has_labels() {
        return Err(CliError::config("metric learning needs labeled data"));
    }

    let mut train_eval_rng = root.child(1);
    let train_eval = PairSet::random_from_block(&train, cfg.eval_pairs, &mut train_eval_rng)?;
    let mut test_eval_rng = root.child(2);
    let test_eval = PairSet::random_from_block(&test, cfg.eval_pairs, &mut test_eval_rng)?;

    let mut finals: Vec<SgdFinalRow> = Vec::new();
    let mut curve_rows: Vec<(String, usize, f64, u64, u64, f64)> = Vec::new();

    for (mi, &m) in cfg.m_grid.iter().enumerate() {
        let (n_prime, budget) = subsample_for_batch(m)?;
        if n_prime > train.len() {
            return Err(CliError::domain(format!(
                "mini-batch {m} needs n' = {n_prime} observations, train has {}",
                train.len()
            )));
        }
        let strategies = [
            (
                "complete",
                StepGradient::CompleteSubsample { subsample: n_prime },
            ),
            ("incomplete", StepGradient::IncompletePairs { terms: budget }),
        ];
        for (si, (name, strategy)) in strategies.iter().enumerate() {
            // η₀ by best final training risk over the grid (tuning stream).
            let mut best = (f64::INFINITY, cfg.eta0_grid[0]);
            for (ei, &eta0) in cfg.eta0_grid.iter().enumerate() {
                let rng = tuning_rng(&root, mi, si, ei);
                let (theta, _) = sgd_metric(
                    &train,
                    *strategy,
                    cfg.steps,
                    eta0,
                    cfg.threshold_b,
                    &rng,
                    |_, _| {},
                )?;
                let train_risk = train_eval.risk(&theta, cfg.threshold_b);
                if train_risk < best.0 {
                    best = (train_risk, eta0);
                }
            }
            let eta0 = best.1;

            let per_run: Vec<CliResult<(SgdFinalRow, Vec<(u64, f64)>)>> = (0..cfg.runs)
                .into_par_iter()
                .map(|run| {
                    let rng = run_rng(&root, mi, si, run);
                    let mut curve: Vec<(u64, f64)> = Vec::new();
                    // curves start at the θ₀ risk
                    curve.push((
                        0,
                        test_eval.risk(&ustat_core::linalg::Matrix::zeros(train.dim(), train.dim()), cfg.threshold_b),
                    ));
                    let t0 = Instant::now();
                    let (theta, evals) = sgd_metric(
                        &train,
                        *strategy,
                        cfg.steps,
                        eta0,
                        cfg.threshold_b,
                        &rng,
                        |t, th| {
                            if t % cfg.eval_every == 0 {
                                curve.push((t, test_eval.risk(th, cfg.threshold_b)));
                            }
                        },
                    )?;
                    let elapsed = t0.elapsed().as_secs_f64();
                    assert_eq!(evals, cfg.steps * budget as u64);
                    let row = SgdFinalRow {
                        strategy: name,
                        m,
                        n_prime,
                        budget,
                        eta0,
                        run,
                        final_test_risk: test_eval.risk(&theta, cfg.threshold_b),
                        final_train_risk: train_eval.risk(&theta, cfg.threshold_b),
                        seconds: if cfg.record_timing { elapsed } else { 0.0 },
                    };
                    Ok((row, curve))
                })
                .collect();
            for r in per_run {
                let (row, curve) = r?;
                for (t, risk) in curve {
                    curve_rows.push((name.to_string(), m, eta0, row.run, t, risk));
                }
                finals.push(row);
            }
        }
    }

    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CliError::config(format!("{}: {e}", cfg.out_dir.display())))?;
    let mut curves = Report::new(
        "sgd-compare config:",
        cfg,
        &["strategy", "m", "eta0", "run", "t", "test_risk"],
    );
    for (name, m, eta0, run, t, risk) in &curve_rows {
        curves.row(&[
            name.clone(),
            m.to_string(),
            cell_f64(*eta0),
            run.to_string(),
            t.to_string(),
            cell_f64(*risk),
        ]);
    }
    let curves_path = cfg.out_dir.join("sgd_compare_curves.csv");
    curves.write(&curves_path)?;

    let mut fin = Report::new(
        "sgd-compare config:",
        cfg,
        &[
            "strategy",
            "m",
            "n_prime",
            "budget",
            "eta0",
            "run",
            "final_test_risk",
            "final_train_risk",
            "seconds",
        ],
    );
    for r in &finals {
        fin.row(&[
            r.strategy.to_string(),
            r.m.to_string(),
            r.n_prime.to_string(),
            r.budget.to_string(),
            cell_f64(r.eta0),
            r.run.to_string(),
            cell_f64(r.final_test_risk),
            cell_f64(r.final_train_risk),
            cell_f64(r.seconds),
        ]);
    }
    let finals_path = cfg.out_dir.join("sgd_compare_final.csv");
    fin.write(&finals_path)?;

    if cfg.plot_data {
        let mut long = Report::new(
            "sgd-compare config:",
            cfg,
            &["strategy", "m", "run", "metric", "value"],
        );
        for r in &finals {
            for (metric, value) in [
                ("final_test_risk", r.final_test_risk),
                ("final_train_risk", r.final_train_risk),
                ("eta0", r.eta0),
            ] {
                long.row(&[
                    r.strategy.to_string(),
                    r.m.to_string(),
                    r.run.to_string(),
                    metric.to_string(),
                    cell_f64(value),
                ]);
            }
        }
        long.write(&cfg.out_dir.join("sgd_compare_long.csv"))?;
    }

    Ok(SgdCompareOutcome {
        finals,
        curves_path,
        finals_path,
    })
}

fn tuning_rng(root: &SplitRng, mi: usize, si: usize, ei: usize) -> SplitRng {
    root.child(3)
        .child(mi as u64)
        .child(si as u64)
        .child(ei as u64)
}

fn run_rng(root: &SplitRng, mi: usize, si: usize, run: u64) -> SplitRng {
    root.child(4).child(mi as u64).child(si as u64).child(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangular_batch_sizes_map_to_expected_subsamples() {
        // the paper's grid is exactly triangular
        for (m, q) in [(10, 5), (28, 8), (55, 11), (105, 15), (253, 23)] {
            let (n_prime, budget) = subsample_for_batch(m).unwrap();
            assert_eq!(n_prime, q);
            assert_eq!(budget, m);
        }
        // non-triangular m falls back to the largest fitting budget
        let (n_prime, budget) = subsample_for_batch(12).unwrap();
        assert_eq!(n_prime, 5);
        assert_eq!(budget, 10);
    }
}
