//! Sampler throughput: the three designs over a large two-block index
//! space, plus raw rank/unrank cost.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use ustat_core::sampling::{
    sample_bernoulli, sample_with_replacement, sample_without_replacement,
};
use ustat_core::{IndexSpace, SplitRng};

fn bench_samplers(c: &mut Criterion) {
    // ~2.6e12 tuples: far beyond enumeration, routine for rank sampling
    let space = IndexSpace::build(&[5000, 300], &[2, 2]).unwrap();
    let b = 4096u64;
    let mut group = c.benchmark_group("samplers_b4096");
    group.bench_function("with_replacement", |bench| {
        let mut seed = 0u64;
        bench.iter(|| {
            seed += 1;
            let mut rng = SplitRng::new(seed);
            black_box(sample_with_replacement(&space, b, &mut rng).unwrap().len())
        })
    });
    group.bench_function("without_replacement", |bench| {
        let mut seed = 0u64;
        bench.iter(|| {
            seed += 1;
            let mut rng = SplitRng::new(seed);
            black_box(
                sample_without_replacement(&space, b, &mut rng)
                    .unwrap()
                    .len(),
            )
        })
    });
    group.bench_function("bernoulli", |bench| {
        let mut seed = 0u64;
        bench.iter(|| {
            seed += 1;
            let mut rng = SplitRng::new(seed);
            black_box(sample_bernoulli(&space, b as f64, &mut rng).unwrap().len())
        })
    });
    group.finish();

    let mut group = c.benchmark_group("rank_roundtrip");
    group.bench_function("unrank_then_rank", |bench| {
        let mut rng = SplitRng::new(3);
        bench.iter(|| {
            let r = space.random_rank(&mut rng);
            let t = space.unrank(&r).unwrap();
            black_box(space.rank(&t).unwrap())
        })
    });
    group.finish();
}

criterion_group!(benches, bench_samplers);
criterion_main!(benches);
