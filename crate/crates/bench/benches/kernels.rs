use std::hint::black_box;

use conclab_bench::{gaussian_empirical, gaussian_wigner, step_grid};
use conclab_core::distributions::AnalyticDistribution;
use conclab_core::hopf_lax::inf_convolution;
use conclab_core::random_matrix::spectrum_stream;
use conclab_core::{kolmogorov_distance, w1_empirical, w1_general};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn transport(c: &mut Criterion) {
    let g = AnalyticDistribution::standard_gaussian();
    let mut group = c.benchmark_group("w1");
    for n in [1_000, 100_000] {
        let a = gaussian_empirical(n, 1, 0);
        let b = gaussian_empirical(n, 1, 1);
        group.bench_with_input(BenchmarkId::new("empirical", n), &n, |bench, _| bench.iter(|| w1_empirical(black_box(&a), &b)));
        group.bench_with_input(BenchmarkId::new("vs_gaussian", n), &n, |bench, _| bench.iter(|| w1_general(black_box(&a), &g)));
    }
    group.finish();
}

fn kolmogorov(c: &mut Criterion) {
    let g = AnalyticDistribution::standard_gaussian();
    let mut group = c.benchmark_group("kolmogorov");
    for n in [1_000, 100_000] {
        let a = gaussian_empirical(n, 2, 0);
        group.bench_with_input(BenchmarkId::new("vs_gaussian", n), &n, |bench, _| bench.iter(|| kolmogorov_distance(black_box(&a), &g)));
    }
    group.finish();
}

fn hopf_lax(c: &mut Criterion) {
    let mut group = c.benchmark_group("inf_convolution");
    group.sample_size(20);
    for len in [100_000, 1_000_000] {
        let f = step_grid(len);
        group.bench_with_input(BenchmarkId::from_parameter(len), &len, |bench, _| bench.iter(|| inf_convolution(black_box(&f), 0.5)));
    }
    group.finish();
}

fn eigenvalues(c: &mut Criterion) {
    let cfg = gaussian_wigner(128);
    c.bench_function("wigner_spectrum_128", |bench| bench.iter(|| spectrum_stream(black_box(&cfg), 0)));
}

criterion_group!(benches, transport, kolmogorov, hopf_lax, eigenvalues);
criterion_main!(benches);
