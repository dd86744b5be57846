use criterion::{black_box, criterion_group, criterion_main, Criterion};
use needle_bench::{ball, semicircle, wave};
use needle_core::energy_eps::{nonlocal_eps_with, params_raw};
use needle_core::limit_energy::h_half_seminorm_sq;
use needle_core::limit_solvers::{flat_init, minimize_e0, solve_3d, MinimizeOptions};
use needle_core::config::QuadConfig;
use needle_core::specfun::{hilbert_transform_with, kernel_integral};
use needle_core::spectral::SpectralOptions;

fn spectral(c: &mut Criterion) {
    let p = semicircle(4096);
    c.bench_function("h_half_seminorm_sq 4096", |b| b.iter(|| h_half_seminorm_sq(black_box(&p)).unwrap()));
    let w = wave(4096);
    c.bench_function("hilbert periodic 4096", |b| {
        b.iter(|| hilbert_transform_with(black_box(&w), SpectralOptions::periodic()).unwrap())
    });
}

fn kernels(c: &mut Criterion) {
    c.bench_function("kernel_integral n=3 k=1", |b| {
        b.iter(|| kernel_integral(3, 1, black_box(0.1), black_box(2.0), black_box(5.0)).unwrap())
    });
}

fn energies(c: &mut Criterion) {
    let s = ball(256);
    let params = params_raw(3, 1.0, 1.0).unwrap();
    let cfg = QuadConfig::default();
    let mut g = c.benchmark_group("solvers");
    g.sample_size(10);
    g.bench_function("nonlocal_eps ball 256", |b| b.iter(|| nonlocal_eps_with(black_box(&s), &params, &cfg).unwrap()));
    g.bench_function("solve_3d", |b| b.iter(|| solve_3d(black_box(1e-10)).unwrap()));
    let init = flat_init(128).unwrap();
    let opts = MinimizeOptions { iters: 200, ..MinimizeOptions::default() };
    g.bench_function("minimize 2d 128x200", |b| b.iter(|| minimize_e0(2, black_box(&init), opts).unwrap()));
    g.finish();
}

criterion_group!(benches, spectral, kernels, energies);
criterion_main!(benches);
