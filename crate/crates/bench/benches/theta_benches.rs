use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use ptheta_core::*;

fn bench_eval(c: &mut Criterion) {
    let q = Complex64::new(0.3, 0.2);
    let x = Complex64::new(-5.0, 1.0);
    c.bench_function("eval_theta q=0.3+0.2i x=-5+1i tol=1e-12", |b| {
        b.iter(|| eval_theta(black_box(q), black_box(x), 1e-12).unwrap())
    });
    c.bench_function("theta_jet_dd q=0.31 x=-7.5", |b| {
        b.iter(|| ptheta_core::eval::theta_jet_dd(black_box(Dd::from_f64(0.31)), Dd::from_f64(-7.5)))
    });
}

fn bench_delta_solver(c: &mut Criterion) {
    c.bench_function("solve_delta S=5 K=9", |b| {
        b.iter(|| solve_delta(black_box(5), black_box(9)).unwrap())
    });
    c.bench_function("solve_delta S=8 K=30", |b| {
        b.iter(|| solve_delta(black_box(8), black_box(30)).unwrap())
    });
}

fn bench_certificate(c: &mut Criterion) {
    let a = parse_rational("0.108").unwrap();
    let u = parse_rational("1.7882").unwrap();
    c.bench_function("check_conditions a=0.108 u=1.7882", |b| {
        b.iter(|| check_conditions(black_box(&a), black_box(&u)))
    });
    c.bench_function("certify_disk a=0.108", |b| {
        b.iter(|| certify_disk(black_box(&a)))
    });
}

fn bench_zeros(c: &mut Criterion) {
    let table = solve_delta(5, 20).unwrap();
    let q = Complex64::new(0.05, 0.0);
    c.bench_function("zeros find q=0.05 n=5", |b| {
        b.iter(|| find_with_table(black_box(q), 5, 1e-12, &table).unwrap())
    });
}

fn bench_spectrum(c: &mut Criterion) {
    c.bench_function("count_real_zeros q=0.3 window=6", |b| {
        b.iter(|| count_real_zeros(black_box(0.3), default_window(0.3, 6), 6).unwrap())
    });
    c.bench_function("find_spectral j=1", |b| {
        b.iter(|| find_spectral(1, (0.30, 0.315), 1e-10).unwrap())
    });
}

criterion_group!(
    benches,
    bench_eval,
    bench_delta_solver,
    bench_certificate,
    bench_zeros,
    bench_spectrum
);
criterion_main!(benches);
