//! Compares the rayon-parallel verification sweeps against the
//! sequential fallback on the two heaviest workloads: theorem recovery
//! (one descent run per sample) and the finite-difference gradient
//! identity check.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use spd_bregman::divergences::SymmetrizationDirection;
use spd_bregman::mirror_maps::{make_map, MapKind};
use spd_bregman::variational::{
    gradient_identity_check, verify_theorem, verify_theorem_sequential, OptimizerConfig,
};

fn bench_theorem_recovery(c: &mut Criterion) {
    let mut group = c.benchmark_group("theorem_recovery_burg_reverse");
    group.sample_size(10);
    let cfg = OptimizerConfig::default();
    let map = make_map(MapKind::Burg);
    for &samples in &[8usize, 32] {
        group.bench_with_input(
            BenchmarkId::new("parallel", samples),
            &samples,
            |b, &samples| {
                b.iter(|| {
                    let report = verify_theorem(
                        map,
                        SymmetrizationDirection::Reverse,
                        4,
                        samples,
                        &cfg,
                        11,
                        1e-4,
                    )
                    .unwrap();
                    black_box(report.max_residual)
                })
            },
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", samples),
            &samples,
            |b, &samples| {
                b.iter(|| {
                    let report = verify_theorem_sequential(
                        map,
                        SymmetrizationDirection::Reverse,
                        4,
                        samples,
                        &cfg,
                        11,
                        1e-4,
                    )
                    .unwrap();
                    black_box(report.max_residual)
                })
            },
        );
    }
    group.finish();
}

fn bench_gradient_checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("gradient_identity_von_neumann");
    group.sample_size(10);
    let map = make_map(MapKind::NegVonNeumann);
    for &samples in &[16usize, 64] {
        group.bench_with_input(
            BenchmarkId::new("parallel", samples),
            &samples,
            |b, &samples| {
                b.iter(|| {
                    let report = gradient_identity_check(
                        map,
                        SymmetrizationDirection::Forward,
                        5,
                        samples,
                        22,
                    )
                    .unwrap();
                    black_box(report.max_residual)
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_theorem_recovery, bench_gradient_checks);
criterion_main!(benches);
