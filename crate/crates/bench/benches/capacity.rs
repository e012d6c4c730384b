use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use dcopt_bench::{entangled, mixed};
use dcopt_core::linalg::{herm_eig, hermitize};
use dcopt_core::random::{ginibre, stream_rng};
use dcopt_core::weyl::SignalEnsemble;
use dcopt_core::{all_weyl, audit_optimality, chi_star, decompose, holevo_chi, GeneratorBasis};

fn bench_basis(c: &mut Criterion) {
    let mut group = c.benchmark_group("su_basis");
    for d in [2usize, 4, 6] {
        group.bench_with_input(BenchmarkId::new("generators", d), &d, |b, &d| {
            b.iter(|| GeneratorBasis::new(black_box(d)).unwrap());
        });
    }
    group.bench_function("decompose_d3", |b| {
        let rho = mixed(3, 11);
        b.iter(|| decompose(black_box(&rho)).unwrap());
    });
    group.finish();
}

fn bench_weyl(c: &mut Criterion) {
    let mut group = c.benchmark_group("weyl");
    for d in [2usize, 4, 8] {
        group.bench_with_input(BenchmarkId::new("all_weyl", d), &d, |b, &d| {
            b.iter(|| all_weyl(black_box(d)).unwrap());
        });
    }
    group.finish();
}

fn bench_eig(c: &mut Criterion) {
    let mut group = c.benchmark_group("linalg");
    for n in [16usize, 64] {
        let h = hermitize(&ginibre(n, n, &mut stream_rng(3, n as u64)));
        group.bench_with_input(BenchmarkId::new("herm_eig", n), &h, |b, h| {
            b.iter(|| herm_eig(black_box(h)).unwrap());
        });
    }
    group.finish();
}

fn bench_capacity(c: &mut Criterion) {
    let mut group = c.benchmark_group("capacity");
    group.measurement_time(Duration::from_secs(3));
    for d in [2usize, 3, 4] {
        let rho = entangled(d);
        group.bench_with_input(BenchmarkId::new("chi_star", d), &rho, |b, rho| {
            b.iter(|| chi_star(black_box(rho)).unwrap());
        });
    }
    let rho = mixed(2, 5);
    group.bench_function("holevo_chi_canonical_d2", |b| {
        let ens = SignalEnsemble::canonical(&rho).unwrap();
        b.iter(|| holevo_chi(black_box(&ens)));
    });
    group.bench_function("audit_100_trials_d2", |b| {
        b.iter(|| audit_optimality(black_box(&rho), 100, 8, 7).unwrap());
    });
    group.finish();
}

criterion_group!(benches, bench_basis, bench_weyl, bench_eig, bench_capacity);
criterion_main!(benches);
