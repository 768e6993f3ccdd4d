use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use curvlab_core::witness::{random_plane_scan, verify_theorem, SearchBudget};
use curvlab_core::{lookup, DeformedMetric, Vector};

fn numerator(c: &mut Criterion) {
    let s = lookup("so5-so4").unwrap().build().unwrap();
    let dm = DeformedMetric::new(&s, 1.5).unwrap();
    let x = Vector::from_fn(10, |i, _| (i as f64 * 0.7).sin());
    let y = Vector::from_fn(10, |i, _| (i as f64 * 1.3).cos());
    c.bench_function("numerator so5-so4", |b| b.iter(|| dm.curvature_numerator(black_box(&x), black_box(&y))));
}

fn scan(c: &mut Criterion) {
    let s = lookup("sunk-torus").unwrap().build().unwrap();
    c.bench_function("scan sunk-torus 10k", |b| b.iter(|| random_plane_scan(&s, 1.2, 10_000, black_box(1))));
}

fn verify(c: &mut Criterion) {
    let s = lookup("so4-so3block").unwrap().build().unwrap();
    let budget = SearchBudget::default();
    c.bench_function("verify so4-so3block", |b| {
        b.iter(|| verify_theorem("so4-so3block", &s, &[1.05, 1.5, 2.0], &budget, black_box(42)))
    });
}

criterion_group!(benches, numerator, scan, verify);
criterion_main!(benches);
