//! Complete vs incomplete estimation cost at growing sample sizes: the
//! computational story the incomplete estimators exist for.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ustat_bench::mixture_samples;
use ustat_core::estimators::{complete_u, horvitz_thompson, incomplete_u};
use ustat_core::learning::{metric_hinge_kernel, MetricModel};
use ustat_core::sampling::{sample_bernoulli, sample_with_replacement};
use ustat_core::{IndexSpace, SplitRng};

fn bench_complete_vs_incomplete(c: &mut Criterion) {
    let mut group = c.benchmark_group("pair_risk");
    for &n in &[200usize, 400, 800] {
        let samples = mixture_samples(n, 10);
        let space = IndexSpace::build(&[n], &[2]).unwrap();
        let kernel = metric_hinge_kernel(MetricModel::identity(10, 2.0));
        group.bench_with_input(BenchmarkId::new("complete", n), &n, |b, _| {
            b.iter(|| black_box(complete_u(&kernel, &samples, &space).unwrap().value))
        });
        // budget B = n keeps the linear-cost promise visible
        group.bench_with_input(BenchmarkId::new("incomplete_b_eq_n", n), &n, |b, _| {
            let mut rng = SplitRng::new(7);
            let terms = sample_with_replacement(&space, n as u64, &mut rng).unwrap();
            b.iter(|| black_box(incomplete_u(&kernel, &samples, &terms).unwrap().value))
        });
        group.bench_with_input(BenchmarkId::new("horvitz_thompson_b_eq_n", n), &n, |b, _| {
            let mut rng = SplitRng::new(7);
            let terms = sample_bernoulli(&space, n as f64, &mut rng).unwrap();
            b.iter(|| {
                black_box(
                    horvitz_thompson(&kernel, &samples, &terms, &space)
                        .unwrap()
                        .value,
                )
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_complete_vs_incomplete);
criterion_main!(benches);
