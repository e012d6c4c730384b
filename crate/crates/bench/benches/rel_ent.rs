use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use dcopt_bench::mixed;
use dcopt_core::rel_ent::{e_r_lower, e_r_upper, ERelConfig};
use dcopt_core::states::{bell_state, werner, BellKind};

fn bench_upper(c: &mut Criterion) {
    let mut group = c.benchmark_group("e_r_upper");
    group.sample_size(10).measurement_time(Duration::from_secs(8));
    let config = ERelConfig::default();
    group.bench_function("singlet", |b| {
        let rho = bell_state(BellKind::PsiMinus);
        b.iter(|| e_r_upper(black_box(&rho), &config).unwrap());
    });
    group.bench_function("werner_0p8", |b| {
        let rho = werner(0.8).unwrap();
        b.iter(|| e_r_upper(black_box(&rho), &config).unwrap());
    });
    // Iteration-capped run on a generic mixed state, to track per-iteration
    // cost rather than convergence luck.
    let capped = ERelConfig {
        max_iterations: 40,
        ..ERelConfig::default()
    };
    group.bench_function("random_mixed_40_iterations", |b| {
        let rho = mixed(2, 3);
        b.iter(|| e_r_upper(black_box(&rho), &capped).unwrap());
    });
    group.finish();
}

fn bench_lower(c: &mut Criterion) {
    let mut group = c.benchmark_group("e_r_lower");
    group.sample_size(10).measurement_time(Duration::from_secs(8));
    let config = ERelConfig::default();
    group.bench_function("singlet", |b| {
        let rho = bell_state(BellKind::PsiMinus);
        b.iter(|| e_r_lower(black_box(&rho), &config).unwrap());
    });
    group.bench_function("werner_0p8", |b| {
        let rho = werner(0.8).unwrap();
        b.iter(|| e_r_lower(black_box(&rho), &config).unwrap());
    });
    group.finish();
}

criterion_group!(benches, bench_upper, bench_lower);
criterion_main!(benches);
