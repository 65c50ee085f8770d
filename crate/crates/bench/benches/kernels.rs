use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use dfock_core::basis::{displaced_distribution, transform_matrix};
use dfock_core::circuit::{apply_beam_splitter, BeamSplitter};
use dfock_core::fock::{FockVector, MultiModeState};
use dfock_core::gates::{run_cz_interferometer, InterferometerConfig};
use dfock_core::operators::displacement_operator_unchecked;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn bench_displacement_operator(criterion: &mut Criterion) {
    let mut group = criterion.benchmark_group("displacement_operator");
    for cutoff in [40usize, 100, 200] {
        group.bench_with_input(BenchmarkId::from_parameter(cutoff), &cutoff, |b, &cutoff| {
            b.iter(|| displacement_operator_unchecked(black_box(c(1.2)), black_box(cutoff)));
        });
    }
    group.finish();
}

fn bench_transform_matrix(criterion: &mut Criterion) {
    criterion.bench_function("transform_matrix_60", |b| {
        b.iter(|| transform_matrix(black_box(c(0.7)), black_box(c(-0.4)), 60).unwrap());
    });
}

fn bench_displaced_distribution(criterion: &mut Criterion) {
    let state = FockVector::basis_state(3, 4);
    criterion.bench_function("displaced_distribution_l3_n80", |b| {
        b.iter(|| displaced_distribution(black_box(&state), black_box(c(2.0)), 80));
    });
}

fn bench_beam_splitter(criterion: &mut Criterion) {
    let state = MultiModeState::from_modes(&[
        FockVector::coherent(c(1.5), 29),
        FockVector::basis_state(0, 29),
    ]);
    let bs = BeamSplitter::balanced((0, 1));
    criterion.bench_function("beam_splitter_30x30", |b| {
        b.iter(|| apply_beam_splitter(black_box(&state), black_box(&bs)).unwrap());
    });
}

fn bench_cz_gate(criterion: &mut Criterion) {
    let frac = std::f64::consts::FRAC_1_SQRT_2;
    let cfg = InterferometerConfig::new(c(frac), c(frac), 0.3, 0.2);
    let mut group = criterion.benchmark_group("cz_interferometer");
    group.sample_size(10);
    group.bench_function("defaults", |b| {
        b.iter(|| run_cz_interferometer(black_box(&cfg)).unwrap());
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_displacement_operator,
    bench_transform_matrix,
    bench_displaced_distribution,
    bench_beam_splitter,
    bench_cz_gate
);
criterion_main!(benches);
