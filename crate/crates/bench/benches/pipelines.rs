use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use szego_bench::{sample_alpha, sample_matrix};
use szego_core::asymptotics::{edge_solutions, hyperbolic_solutions};
use szego_core::checker::check_1_to_2;
use szego_core::geronimus::{direct_geronimus, inverse_geronimus};
use szego_core::jacobi::{m_at_edge, m_function};
use szego_core::{Edge, Tolerances, Variant};

fn geronimus(c: &mut Criterion) {
    let mut group = c.benchmark_group("geronimus");
    let tol = Tolerances::default();
    for len in [8, 32, 128] {
        let alpha = sample_alpha(len);
        group.bench_with_input(BenchmarkId::new("direct", len), &alpha, |b, a| {
            b.iter(|| direct_geronimus(black_box(a), Variant::Even).unwrap())
        });
        let j = direct_geronimus(&alpha, Variant::Odd).unwrap();
        let edges = (m_at_edge(&j, Edge::Minus, &tol).unwrap(), m_at_edge(&j, Edge::Plus, &tol).unwrap());
        group.bench_with_input(BenchmarkId::new("inverse", len), &j, |b, j| {
            b.iter(|| inverse_geronimus(black_box(j), Variant::Odd, (&edges.0, &edges.1)).unwrap())
        });
    }
    group.finish();
}

fn m_functions(c: &mut Criterion) {
    let j = sample_matrix();
    let tol = Tolerances::default();
    c.bench_function("m_function", |b| b.iter(|| m_function(&j, black_box(Complex64::new(0.3, 0.7))).unwrap()));
    c.bench_function("m_at_edge", |b| b.iter(|| m_at_edge(black_box(&j), Edge::Plus, &tol).unwrap()));
}

fn asymptotics(c: &mut Criterion) {
    let j = sample_matrix();
    let tol = Tolerances::default();
    c.bench_function("edge_solutions", |b| b.iter(|| edge_solutions(black_box(&j), Edge::Plus, &tol).unwrap()));
    c.bench_function("hyperbolic_solutions", |b| {
        b.iter(|| hyperbolic_solutions(black_box(&j), 3.0, &tol).unwrap())
    });
}

fn checker(c: &mut Criterion) {
    let j = direct_geronimus(&sample_alpha(8), Variant::Plus).unwrap();
    let tol = Tolerances::default();
    c.bench_function("check_1_to_2", |b| b.iter(|| check_1_to_2(black_box(&j), &tol).unwrap()));
}

criterion_group!(benches, geronimus, m_functions, asymptotics, checker);
criterion_main!(benches);
