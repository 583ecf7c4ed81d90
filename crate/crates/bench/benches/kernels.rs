use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use twomode_bench::{binomial_fixture, mixture_fixture};
use twomode_core::criteria::{covariance_matrix, Criteria};
use twomode_core::minimizer::{default_cutoff, solve_min_direct, solve_min_recurrence};
use twomode_core::sampler::sample_separable;
use twomode_core::{Family, Weighting};

fn bench_moments(c: &mut Criterion) {
    let mut group = c.benchmark_group("binomial moments");
    for total in [10usize, 50, 200] {
        let state = binomial_fixture(total);
        group.bench_with_input(BenchmarkId::from_parameter(total), &state, |b, s| {
            b.iter(|| black_box(s.moments()))
        });
    }
    group.finish();
}

fn bench_covariance(c: &mut Criterion) {
    let state = binomial_fixture(200);
    c.bench_function("covariance test N=200", |b| b.iter(|| black_box(covariance_matrix(&state).min_eig)));
}

fn bench_criteria(c: &mut Criterion) {
    let ensembles = mixture_fixture(256);
    let ws: Vec<f64> = (1..10).map(|k| k as f64 * 0.1).collect();
    let criteria = Criteria::default();
    c.bench_function("evaluate 256 mixtures", |b| {
        b.iter(|| {
            for e in &ensembles {
                let m = e.moments().unwrap();
                black_box(criteria.evaluate_moments(&m, &ws).unwrap());
            }
        })
    });
}

fn bench_sampling(c: &mut Criterion) {
    c.bench_function("sample 256 random products", |b| {
        b.iter(|| black_box(sample_separable(3, 256, 50.0, Family::RandomProduct).unwrap()))
    });
}

fn bench_minimizers(c: &mut Criterion) {
    let mut group = c.benchmark_group("minimize");
    group.sample_size(10);
    for target in [5.0, 50.0] {
        let cutoff = default_cutoff(target);
        group.bench_with_input(BenchmarkId::new("recurrence", target), &target, |b, &t| {
            b.iter(|| black_box(solve_min_recurrence(t, cutoff).unwrap().value))
        });
        group.bench_with_input(BenchmarkId::new("direct", target), &target, |b, &t| {
            b.iter(|| black_box(solve_min_direct(t, Weighting::Equal, cutoff).unwrap().value))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_moments, bench_covariance, bench_criteria, bench_sampling, bench_minimizers);
criterion_main!(benches);
