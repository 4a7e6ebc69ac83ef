use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gg_spectra::product_spectrum::{assemble, AssembleOptions, FastPath};
use gg_spectra::schrodinger1d::{eigen_below, Operator1D, SolverOptions};
use gg_spectra::verify::circle_model;
use gg_spectra::weyl_analysis::{compute_a_beta_n, ABetaNOptions, Z1Evaluator};

fn one_d(c: &mut Criterion) {
    let bessel = Operator1D::schrodinger(0.75, 2.0, 0.0, 1.0);
    c.bench_function("bessel_five_levels_1e-7", |b| {
        b.iter(|| eigen_below(black_box(&bessel), 650.0, &SolverOptions::with_tol(1e-7)).unwrap())
    });
    let confined = Operator1D::confined(2.0, 4.0, 1.0, 2000.0);
    c.bench_function("confined_beta4_to_2000", |b| {
        b.iter(|| eigen_below(black_box(&confined), 2000.0, &SolverOptions::with_tol(1e-6)).unwrap())
    });
}

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble_beta4_1000");
    group.sample_size(10);
    let model = circle_model(4.0);
    for (name, fast_path) in [("auto", FastPath::Auto), ("direct", FastPath::Off)] {
        let opts = AssembleOptions { fast_path, ..AssembleOptions::with_tol(1e-5) };
        group.bench_function(name, |b| b.iter(|| assemble(black_box(&model), 1000.0, &opts).unwrap()));
    }
    group.finish();

    let spec = assemble(&circle_model(2.0), 2000.0, &AssembleOptions::default()).unwrap();
    c.bench_function("heat_trace_beta2_2000", |b| b.iter(|| spec.heat_trace(black_box(0.05)).unwrap()));
}

fn weyl_constant(c: &mut Criterion) {
    let z1 = Z1Evaluator::solve(1, 4.0, 2000.0, &SolverOptions::with_tol(1e-7)).unwrap();
    c.bench_function("a_beta_n_quadrature", |b| {
        b.iter(|| compute_a_beta_n(1, 4.0, black_box(&z1), &ABetaNOptions::default()).unwrap())
    });
}

criterion_group!(benches, one_d, assembly, weyl_constant);
criterion_main!(benches);
