use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use daflab_bench::{form, metric};
use daflab_core::forms::{hodge_star, lefschetz_lambda, primitive_decompose};

fn bench_wedge(c: &mut Criterion) {
    let m = metric(6, 1);
    let a = form(6, 2, 2, 2);
    let w2 = m.omega().wedge_pow(2).unwrap();
    c.bench_function("wedge_22_x_22_n6", |b| {
        b.iter(|| black_box(&a).wedge(black_box(&w2)).unwrap())
    });
}

fn bench_star(c: &mut Criterion) {
    let m = metric(6, 3);
    let a = form(6, 3, 3, 4);
    c.bench_function("hodge_star_33_n6", |b| {
        b.iter(|| hodge_star(black_box(&a), black_box(&m)).unwrap())
    });
}

fn bench_lambda(c: &mut Criterion) {
    let m = metric(6, 5);
    let a = form(6, 3, 3, 6);
    c.bench_function("lambda_33_n6", |b| {
        b.iter(|| lefschetz_lambda(black_box(&a), black_box(&m)))
    });
}

fn bench_primitive_decompose(c: &mut Criterion) {
    let m = metric(5, 7);
    let a = form(5, 3, 3, 8);
    c.bench_function("primitive_decompose_33_n5", |b| {
        b.iter(|| primitive_decompose(black_box(&a), black_box(&m)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_wedge,
    bench_star,
    bench_lambda,
    bench_primitive_decompose
);
criterion_main!(benches);
