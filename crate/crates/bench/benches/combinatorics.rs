use amalgam_bench::fixed_dist;
use amalgam_core::freedist::{free_join, prod_dist, sum_dist};
use amalgam_core::nccomb::{enumerate_nc, lemma31_check, moments_to_cumulants};
use amalgam_core::Complex64;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn partitions(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_nc");
    for n in [4, 6, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| enumerate_nc(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn cumulants(c: &mut Criterion) {
    let mut group = c.benchmark_group("cumulants");
    for d in [1, 2, 3] {
        let x = fixed_dist(d, 6);
        group.bench_with_input(BenchmarkId::new("moments_to_cumulants", d), &x, |b, x| {
            b.iter(|| moments_to_cumulants(black_box(x)).unwrap())
        });
        let fam = moments_to_cumulants(&x).unwrap();
        let point: Vec<Complex64> = (0..d).map(|i| Complex64::new(0.3, 0.1 * i as f64)).collect();
        group.bench_with_input(BenchmarkId::new("lemma31_r6", d), &point, |b, p| {
            b.iter(|| lemma31_check(&fam, 6, black_box(p)).unwrap())
        });
    }
    group.finish();
}

fn joins(c: &mut Criterion) {
    let mut group = c.benchmark_group("free_join");
    for d in [1, 2] {
        let x = fixed_dist(d, 6);
        let y = fixed_dist(d, 6);
        group
            .bench_with_input(BenchmarkId::new("join", d), &d, |b, _| b.iter(|| free_join(black_box(&x), &y).unwrap()));
        let j = free_join(&x, &y).unwrap();
        group.bench_with_input(BenchmarkId::new("sum_dist", d), &d, |b, _| b.iter(|| sum_dist(black_box(&j)).unwrap()));
        group.bench_with_input(BenchmarkId::new("prod_dist", d), &d, |b, _| {
            b.iter(|| prod_dist(black_box(&j), 3).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, partitions, cumulants, joins);
criterion_main!(benches);
