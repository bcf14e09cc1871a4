use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use singres_core::catalog;
use singres_core::cycles::{fundamental_cycle, is_numerically_gorenstein};
use singres_core::lattice::smith_normal_form;
use singres_core::linalg::determinant;

fn kernels(c: &mut Criterion) {
    let cases = [
        ("e8", catalog::brieskorn(2, 3, 5).unwrap().matrix),
        ("brieskorn-3-10-20", catalog::brieskorn(3, 10, 20).unwrap().matrix),
        ("brieskorn-5-24-24", catalog::brieskorn(5, 24, 24).unwrap().matrix),
        ("e8-analogue-13", catalog::e8_analogue(13).unwrap().matrix),
    ];
    for (name, m) in &cases {
        let mut group = c.benchmark_group(*name);
        group.bench_function("determinant", |b| b.iter(|| determinant(black_box(m.entries()))));
        group.bench_function("smith", |b| b.iter(|| smith_normal_form(black_box(m))));
        group.bench_function("fundamental-cycle", |b| b.iter(|| fundamental_cycle(black_box(m))));
        group.bench_function("gorenstein", |b| b.iter(|| is_numerically_gorenstein(black_box(m))));
        group.finish();
    }
}

criterion_group!(benches, kernels);
criterion_main!(benches);
