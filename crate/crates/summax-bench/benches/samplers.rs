use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use summax_core::measures::MixingMeasure;
use summax_core::sampler::{PairSampler, RandomStream, StableSampler, SumMaxSampler};
use summax_core::special::gamma_fn;
use summax_core::SumMaxStableParams;

fn k_for(beta: f64) -> f64 {
    1.0 / gamma_fn(1.0 - beta).unwrap()
}

fn bench_stable(c: &mut Criterion) {
    let mut group = c.benchmark_group("stable_draw");
    group.throughput(Throughput::Elements(1));
    for beta in [0.3, 0.5, 0.8] {
        let sampler = StableSampler::new(beta, k_for(beta));
        group.bench_with_input(BenchmarkId::from_parameter(beta), &beta, |b, _| {
            let mut stream = RandomStream::new(1, 0);
            b.iter(|| black_box(sampler.sample(&mut stream)));
        });
    }
    group.finish();
}

fn bench_pairs(c: &mut Criterion) {
    let mut group = c.benchmark_group("pair_draw");
    group.throughput(Throughput::Elements(1));
    let cases = [
        (
            "complete_dependence",
            SumMaxStableParams::new(
                0.5,
                0.5,
                0.0,
                k_for(0.5),
                MixingMeasure::point_mass(1.0).unwrap(),
            )
            .unwrap(),
        ),
        (
            "normal_mixing",
            SumMaxStableParams::new(0.5, 1.0, 0.0, k_for(0.5), MixingMeasure::std_normal())
                .unwrap(),
        ),
        (
            "frechet_mixing",
            SumMaxStableParams::new(
                0.5,
                0.75,
                0.0,
                k_for(0.5),
                MixingMeasure::frechet(1.5, 1.0).unwrap(),
            )
            .unwrap(),
        ),
    ];
    for (tag, params) in &cases {
        let sampler = PairSampler::new(params);
        group.bench_function(*tag, |b| {
            let mut stream = RandomStream::new(2, 0);
            b.iter(|| black_box(sampler.sample(&mut stream)));
        });
    }
    group.finish();
}

fn bench_sum_max(c: &mut Criterion) {
    let params = SumMaxStableParams::new(
        0.5,
        1.0,
        0.0,
        k_for(0.5),
        MixingMeasure::frechet(2.0, 1.0).unwrap(),
    )
    .unwrap();
    let mut group = c.benchmark_group("sum_max_aggregate");
    for n in [64u64, 1024, 4096] {
        group.throughput(Throughput::Elements(n));
        let sampler = SumMaxSampler::new(&params, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            let mut stream = RandomStream::new(3, 0);
            b.iter(|| black_box(sampler.sample(&mut stream)));
        });
    }
    group.finish();
}

criterion_group!(benches, bench_stable, bench_pairs, bench_sum_max);
criterion_main!(benches);
