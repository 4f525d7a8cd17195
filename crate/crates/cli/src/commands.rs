//! Implementations behind the non-experiment subcommands: `gen-data`,
//! `estimate`, `bounds`, `select-model` and `sgd`. Each returns the CSV
//! text it printed, which keeps them directly testable.

use std::path::{Path, PathBuf};

use crate::data::{
    generate_gaussian_mixture, load_partitions_csv, read_metric_model, write_metric_model,
    PairSet,
};
use crate::error::{CliError, CliResult};
use crate::report::cell_f64;
use ustat_core::bounds::{
    complete_deviation_bound, ht_deviation_bound, incomplete_total_bound,
    incomplete_variance, incomplete_vs_complete_bound, penalty, select_model, BoundInputs,
    ModelSpec,
};
use ustat_core::estimators::{complete_u_capped, horvitz_thompson, incomplete_u};
use ustat_core::kernel::Kernel;
use ustat_core::learning::cluster::{clustering_kernel, squared_euclidean};
use ustat_core::learning::{
    metric_hinge_kernel, ranking_kernel, vus_kernel, MetricHingeObjective, MetricModel,
    ThresholdRule,
};
use ustat_core::learning::sgd::{sgd, GradientMode, ProjectionPolicy, SgdConfig};
use ustat_core::sampling::{
    sample_bernoulli, sample_with_replacement, sample_without_replacement,
};
use ustat_core::{IndexSpace, SampleBlock, SampleSet, Scheme, SplitRng};

pub struct GenDataArgs {
    pub out: PathBuf,
    pub dim: usize,
    pub classes: usize,
    pub subspace_dim: usize,
    pub variance: f64,
    pub mean_scale: f64,
    pub n: usize,
    pub seed: u64,
}

pub fn gen_data(args: &GenDataArgs) -> CliResult<String> {
    let mut rng = SplitRng::new(args.seed);
    let block = generate_gaussian_mixture(
        args.dim,
        args.classes,
        args.subspace_dim,
        args.variance,
        args.mean_scale,
        args.n,
        &mut rng,
    )?;
    block.write_csv(&args.out)?;
    Ok(format!(
        "wrote,{},n,{},dim,{},classes,{},seed,{}\n",
        args.out.display(),
        args.n,
        args.dim,
        args.classes,
        args.seed
    ))
}

/// Kernel specification grammar for `estimate`:
/// `pair-sqdist` | `pair-absdiff` | `clustering:<partitions.csv>:<m>` |
/// `metric-hinge:<model.csv>` | `vus:<score-feature>` |
/// `ranking-threshold:<feature>:<threshold>[:<tie-feature>]`.
pub fn parse_kernel(spec: &str, samples: &SampleSet) -> CliResult<Box<dyn Kernel>> {
    let blocks = samples.block_count();
    let dim = samples.block(0).dim();
    let check_feature = |f: usize| -> CliResult<usize> {
        if f >= dim {
            Err(CliError::config(format!(
                "feature index {f} out of range for dimension {dim}"
            )))
        } else {
            Ok(f)
        }
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts[0] {
        "pair-sqdist" => Ok(Box::new(ustat_core::kernel::pairwise(squared_euclidean))),
        "pair-absdiff" => Ok(Box::new(ustat_core::kernel::pairwise(
            |a: &[f64], b: &[f64]| {
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| (x - y).abs())
                    .sum::<f64>()
            },
        ))),
        "clustering" => {
            if parts.len() != 3 {
                return Err(CliError::config(
                    "clustering kernel spec: clustering:<partitions.csv>:<m>",
                ));
            }
            let partitions = load_partitions_csv(Path::new(parts[1]))?;
            let m: usize = parts[2]
                .parse()
                .map_err(|_| CliError::config(format!("bad model index {:?}", parts[2])))?;
            if m == 0 || m > partitions.len() {
                return Err(CliError::config(format!(
                    "model index {m} outside 1..={}",
                    partitions.len()
                )));
            }
            Ok(Box::new(clustering_kernel(
                squared_euclidean,
                partitions[m - 1].clone(),
            )))
        }
        "metric-hinge" => {
            if parts.len() != 2 {
                return Err(CliError::config(
                    "metric kernel spec: metric-hinge:<model.csv>",
                ));
            }
            let (matrix, threshold) = read_metric_model(Path::new(parts[1]))?;
            let model = MetricModel::new(matrix, threshold)?;
            Ok(Box::new(metric_hinge_kernel(model)))
        }
        "vus" => {
            if parts.len() != 2 {
                return Err(CliError::config("vus kernel spec: vus:<score-feature>"));
            }
            let feature = check_feature(parts[1].parse().map_err(|_| {
                CliError::config(format!("bad feature index {:?}", parts[1]))
            })?)?;
            Ok(Box::new(vus_kernel(blocks, move |x: &[f64]| x[feature])))
        }
        "ranking-threshold" => {
            if parts.len() < 3 || parts.len() > 4 {
                return Err(CliError::config(
                    "ranking kernel spec: ranking-threshold:<feature>:<threshold>[:<tie-feature>]",
                ));
            }
            let feature = check_feature(parts[1].parse().map_err(|_| {
                CliError::config(format!("bad feature index {:?}", parts[1]))
            })?)?;
            let threshold: f64 = parts[2]
                .parse()
                .map_err(|_| CliError::config(format!("bad threshold {:?}", parts[2])))?;
            let tie_feature: usize = if parts.len() == 4 {
                check_feature(parts[3].parse().map_err(|_| {
                    CliError::config(format!("bad tie feature {:?}", parts[3]))
                })?)?
            } else {
                feature
            };
            Ok(Box::new(ranking_kernel(ThresholdRule {
                feature,
                threshold,
                tie_feature,
            })))
        }
        other => Err(CliError::config(format!("unknown kernel spec {other:?}"))),
    }
}

pub struct EstimateArgs {
    pub data: Vec<PathBuf>,
    pub kernel: String,
    pub estimator: String,
    pub degrees: Vec<usize>,
    pub scheme: Option<String>,
    pub terms: Option<u64>,
    pub seed: u64,
    pub cap: Option<u128>,
}

pub fn estimate(args: &EstimateArgs) -> CliResult<String> {
    if args.data.is_empty() {
        return Err(CliError::config("estimate needs at least one --data file"));
    }
    let samples = SampleSet::from_csv_files(&args.data)?;
    let kernel = parse_kernel(&args.kernel, &samples)?;
    if kernel.degrees() != args.degrees.as_slice() {
        return Err(CliError::config(format!(
            "kernel {} has degrees {:?}, --degrees says {:?}",
            args.kernel,
            kernel.degrees(),
            args.degrees
        )));
    }
    let space = IndexSpace::build(&samples.sizes(), &args.degrees)?;
    let cap = args.cap.unwrap_or(ustat_core::index::DEFAULT_ENUMERATION_CAP);
    let result = match args.estimator.as_str() {
        "complete" => complete_u_capped(&kernel, &samples, &space, cap)?,
        "incomplete" | "ht" => {
            let scheme = Scheme::parse(
                args.scheme
                    .as_deref()
                    .ok_or_else(|| CliError::config("incomplete/ht estimators need --scheme"))?,
            )?;
            let terms = args
                .terms
                .ok_or_else(|| CliError::config("incomplete/ht estimators need --terms"))?;
            let mut rng = SplitRng::new(args.seed);
            let termset = match scheme {
                Scheme::WithReplacement => sample_with_replacement(&space, terms, &mut rng)?,
                Scheme::WithoutReplacement => {
                    sample_without_replacement(&space, terms, &mut rng)?
                }
                Scheme::Bernoulli => sample_bernoulli(&space, terms as f64, &mut rng)?,
            };
            match args.estimator.as_str() {
                "incomplete" => incomplete_u(&kernel, &samples, &termset)?,
                _ => horvitz_thompson(&kernel, &samples, &termset, &space)?,
            }
        }
        other => {
            return Err(CliError::config(format!(
                "unknown estimator {other:?} (complete | incomplete | ht)"
            )))
        }
    };
    let mut out = String::from("estimator,scheme,terms_used,seed,value\n");
    out.push_str(&format!(
        "{},{},{},{},{}\n",
        args.estimator,
        result.scheme,
        result.terms_used,
        result.seed.map(|s| s.to_string()).unwrap_or_default(),
        cell_f64(result.value),
    ));
    Ok(out)
}

pub struct BoundsArgs {
    pub bound: String,
    pub kernel_bound: f64,
    pub vc: f64,
    pub blocks: Option<u64>,
    pub log_lambda: Option<f64>,
    pub sizes: Option<Vec<usize>>,
    pub degrees: Option<Vec<usize>>,
    pub terms: u64,
    pub delta: f64,
    pub pooled_n: Option<u64>,
    pub model_index: usize,
    pub envelope: Option<f64>,
    pub var_complete: Option<f64>,
    pub var_kernel: Option<f64>,
}

pub fn bounds(args: &BoundsArgs) -> CliResult<String> {
    // log(1 + #Lambda) and N either given directly or derived from a space
    let (log_lambda, blocks, pooled) = match (&args.sizes, &args.degrees) {
        (Some(sizes), Some(degrees)) => {
            let space = IndexSpace::build(sizes, degrees)?;
            (
                space.log1p_cardinality(),
                space.effective_block_count() as u64,
                sizes.iter().sum::<usize>() as u64,
            )
        }
        _ => {
            let ll = args.log_lambda.unwrap_or(f64::NAN);
            let bl = args.blocks.unwrap_or(0);
            (ll, bl, args.pooled_n.unwrap_or(0))
        }
    };
    let pooled_n = args.pooled_n.unwrap_or(pooled);
    let inputs = BoundInputs {
        kernel_bound: args.kernel_bound,
        vc_dimension: args.vc,
        block_count: blocks,
        log_lambda,
        terms: args.terms,
        delta: args.delta,
        pooled_n,
    };
    let value = match args.bound.as_str() {
        "complete-deviation" => complete_deviation_bound(&inputs)?,
        "incomplete-vs-complete" => incomplete_vs_complete_bound(&inputs)?,
        "incomplete-total" => incomplete_total_bound(&inputs)?,
        "ht-bernoulli" => ht_deviation_bound(&inputs, Scheme::Bernoulli)?,
        "ht-without-replacement" => ht_deviation_bound(&inputs, Scheme::WithoutReplacement)?,
        "penalty" => {
            let model = ModelSpec {
                index: args.model_index,
                vc_dimension: args.vc,
                kernel_bound: args.kernel_bound,
                risk: 0.0,
            };
            penalty(
                args.terms,
                pooled_n,
                blocks,
                log_lambda,
                &model,
                args.envelope.unwrap_or(args.kernel_bound),
            )?
        }
        "incomplete-variance" => {
            let vc = args
                .var_complete
                .ok_or_else(|| CliError::config("incomplete-variance needs --var-complete"))?;
            let vk = args
                .var_kernel
                .ok_or_else(|| CliError::config("incomplete-variance needs --var-kernel"))?;
            incomplete_variance(vc, vk, args.terms)?
        }
        other => {
            return Err(CliError::config(format!(
                "unknown bound {other:?} (complete-deviation | incomplete-vs-complete | \
                 incomplete-total | ht-bernoulli | ht-without-replacement | penalty | \
                 incomplete-variance)"
            )))
        }
    };
    let mut out = String::from(
        "bound,kernel_bound,vc,blocks,log_lambda,terms,delta,pooled_n,model_index,value\n",
    );
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{}\n",
        args.bound,
        cell_f64(args.kernel_bound),
        cell_f64(args.vc),
        blocks,
        cell_f64(log_lambda),
        args.terms,
        cell_f64(args.delta),
        pooled_n,
        args.model_index,
        cell_f64(value),
    ));
    Ok(out)
}

pub struct SelectModelArgs {
    pub models: PathBuf,
    pub terms: u64,
    pub pooled_n: u64,
    pub blocks: Option<u64>,
    pub log_lambda: Option<f64>,
    pub sizes: Option<Vec<usize>>,
    pub degrees: Option<Vec<usize>>,
    pub envelope: Option<f64>,
}

/// Models file: header `m,vc,kernel_bound,risk`, one model per row.
pub fn select_model_cmd(args: &SelectModelArgs) -> CliResult<String> {
    let text = std::fs::read_to_string(&args.models)
        .map_err(|e| CliError::config(format!("{}: {e}", args.models.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "m,vc,kernel_bound,risk" => {}
        other => {
            return Err(CliError::config(format!(
                "models file must start with `m,vc,kernel_bound,risk`, got {other:?}"
            )))
        }
    }
    let mut models = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 4 {
            return Err(CliError::config(format!(
                "{}:{}: expected 4 cells",
                args.models.display(),
                i + 2
            )));
        }
        let parse_f =
            |c: &str| -> CliResult<f64> {
                c.trim().parse().map_err(|_| {
                    CliError::config(format!("{}:{}: bad number {c:?}", args.models.display(), i + 2))
                })
            };
        models.push(ModelSpec {
            index: cells[0].trim().parse().map_err(|_| {
                CliError::config(format!(
                    "{}:{}: bad model index {:?}",
                    args.models.display(),
                    i + 2,
                    cells[0]
                ))
            })?,
            vc_dimension: parse_f(cells[1])?,
            kernel_bound: parse_f(cells[2])?,
            risk: parse_f(cells[3])?,
        });
    }
    let (log_lambda, blocks) = match (&args.sizes, &args.degrees) {
        (Some(sizes), Some(degrees)) => {
            let space = IndexSpace::build(sizes, degrees)?;
            (
                space.log1p_cardinality(),
                space.effective_block_count() as u64,
            )
        }
        _ => (
            args.log_lambda
                .ok_or_else(|| CliError::config("need --log-lambda or --sizes/--degrees"))?,
            args.blocks
                .ok_or_else(|| CliError::config("need --blocks or --sizes/--degrees"))?,
        ),
    };
    let envelope = args.envelope.unwrap_or_else(|| {
        models
            .iter()
            .map(|m| m.kernel_bound)
            .fold(f64::MIN, f64::max)
    });
    let selected = select_model(
        &models,
        args.terms,
        args.pooled_n,
        blocks,
        log_lambda,
        envelope,
    )?;
    let mut out = String::from("m,vc,kernel_bound,risk,penalty,criterion,selected\n");
    for m in &models {
        let pen = penalty(args.terms, args.pooled_n, blocks, log_lambda, m, envelope)?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            m.index,
            cell_f64(m.vc_dimension),
            cell_f64(m.kernel_bound),
            cell_f64(m.risk),
            cell_f64(pen),
            cell_f64(m.risk + pen),
            if m.index == selected { 1 } else { 0 },
        ));
    }
    Ok(out)
}

pub struct SgdArgs {
    pub data: PathBuf,
    pub mode: String,
    pub terms: Option<u64>,
    pub subsample: Option<usize>,
    pub steps: u64,
    pub eta0: f64,
    pub threshold: f64,
    pub projection: String,
    pub seed: u64,
    pub eval_data: Option<PathBuf>,
    pub eval_pairs: usize,
    pub eval_every: u64,
    pub out_prefix: Option<PathBuf>,
}

/// Metric-learning SGD over a CSV dataset through the generic SGD driver;
/// emits a `(t, risk, grad_norm)` trajectory and a model checkpoint.
pub fn sgd_cmd(args: &SgdArgs) -> CliResult<String> {
    let block = SampleBlock::read_csv(&args.data)?;
    if !block.has_labels() {
        return Err(CliError::config("sgd needs labeled data"));
    }
    let dim = block.dim();
    let n = block.len();
    let gradient_mode = match args.mode.as_str() {
        "incomplete" => GradientMode::Incomplete {
            terms: args
                .terms
                .ok_or_else(|| CliError::config("incomplete mode needs --terms"))?,
        },
        "complete-subsample" => GradientMode::CompleteSubsample {
            sizes: vec![args
                .subsample
                .ok_or_else(|| CliError::config("complete-subsample mode needs --subsample"))?],
        },
        "full" => GradientMode::Full,
        other => {
            return Err(CliError::config(format!(
                "unknown mode {other:?} (incomplete | complete-subsample | full)"
            )))
        }
    };
    let projection_policy = match args.projection.as_str() {
        "every-step" => ProjectionPolicy::EveryStep,
        "final" => ProjectionPolicy::FinalOnly,
        other => {
            return Err(CliError::config(format!(
                "unknown projection policy {other:?} (every-step | final)"
            )))
        }
    };
    let eval_block = match &args.eval_data {
        Some(p) => Some(SampleBlock::read_csv(p)?),
        None => None,
    };
    let eval_pairs = {
        let source = eval_block.as_ref().unwrap_or(&block);
        let mut rng = SplitRng::new(args.seed).child(u64::MAX);
        PairSet::random_from_block(source, args.eval_pairs, &mut rng)?
    };

    let samples = SampleSet::single(block);
    let space = IndexSpace::build(&[n], &[2])?;
    let objective = MetricHingeObjective {
        threshold: args.threshold,
    };
    let config = SgdConfig {
        steps: args.steps,
        eta0: args.eta0,
        gradient_mode,
        projection_policy,
        seed: args.seed,
    };
    let mut out = String::from("t,risk,grad_norm\n");
    let theta0 = ustat_core::linalg::Matrix::zeros(dim, dim);
    let eval_every = args.eval_every.max(1);
    let threshold = args.threshold;
    let eval_ref = &eval_pairs;
    let rows = std::cell::RefCell::new(Vec::<(u64, f64, f64)>::new());
    let theta = sgd(
        &objective,
        &samples,
        &space,
        &config,
        theta0,
        |t, th, gnorm| {
            if t % eval_every == 0 {
                rows.borrow_mut().push((t, eval_ref.risk(th, threshold), gnorm));
            }
        },
    )?;
    for (t, risk, gnorm) in rows.into_inner() {
        out.push_str(&format!("{t},{},{}\n", cell_f64(risk), cell_f64(gnorm)));
    }
    let final_risk = eval_pairs.risk(&theta, threshold);
    out.push_str(&format!(
        "final,{},{}\n",
        cell_f64(final_risk),
        cell_f64(0.0)
    ));
    if let Some(prefix) = &args.out_prefix {
        let model_path = prefix.with_extension("model.csv");
        write_metric_model(&theta, threshold, &model_path)?;
        let traj_path = prefix.with_extension("trajectory.csv");
        std::fs::write(&traj_path, &out)
            .map_err(|e| CliError::config(format!("{}: {e}", traj_path.display())))?;
    }
    Ok(out)
}
