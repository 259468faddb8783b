//! Benchmarks for the exact-arithmetic primitives and the full solver:
//! series products and composition, Riordan matrix construction and
//! multiplication, branch inversion, the order-by-order solve on both
//! backends, and the reparametrization solve of the continuity check.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fchordal::{
    bivariate_taylor, match_curves, phi_implicit, solve_problem, ChordFunction,
    PartialRiordanMatrix,
};
use fchordal_bench::{dense_series, equiproduct_problem, float_problem, probe_series, ratio};

fn series_ops(c: &mut Criterion) {
    let a = dense_series(32);
    let b = dense_series(32);
    c.bench_function("series_mul_32", |bench| {
        bench.iter(|| black_box(&a).mul(black_box(&b)).unwrap())
    });

    let inner = probe_series(32);
    c.bench_function("series_compose_32", |bench| {
        bench.iter(|| black_box(&a).compose(black_box(&inner)).unwrap())
    });

    c.bench_function("series_recip_32", |bench| {
        bench.iter(|| black_box(&a).reciprocal().unwrap())
    });
}

fn riordan_ops(c: &mut Criterion) {
    let d = dense_series(24);
    let h = probe_series(24);
    c.bench_function("riordan_build_24", |bench| {
        bench.iter(|| PartialRiordanMatrix::build(black_box(&d), black_box(&h), 24).unwrap())
    });

    let m1 = PartialRiordanMatrix::build(&d, &h, 16).unwrap();
    let m2 = PartialRiordanMatrix::build(&probe_series(16), &probe_series(16), 16).unwrap();
    c.bench_function("riordan_mul_16", |bench| {
        bench.iter(|| black_box(&m1).mul(black_box(&m2)).unwrap())
    });
}

fn branch_inversion(c: &mut Criterion) {
    let anchor_a = ratio(1, 1);
    let anchor_b = ratio(3, 1);
    let family = ChordFunction::Equiproduct;
    let taylor = bivariate_taylor(&family, &anchor_a, &anchor_b, 16).unwrap();
    let k = ratio(3, 1);
    c.bench_function("phi_implicit_16", |bench| {
        bench.iter(|| phi_implicit(black_box(&taylor), black_box(&k), 16).unwrap())
    });
}

fn solver(c: &mut Criterion) {
    let exact = equiproduct_problem(12);
    c.bench_function("solve_rational_12", |bench| {
        bench.iter(|| solve_problem(black_box(&exact)).unwrap())
    });

    let approx = float_problem(12, 256);
    c.bench_function("solve_float256_12", |bench| {
        bench.iter(|| solve_problem(black_box(&approx)).unwrap())
    });
}

fn continuity(c: &mut Criterion) {
    // Two parametrizations of one arc: the solved circle data and its
    // composition with a regular parameter change.
    let sol = solve_problem(&equiproduct_problem(16)).unwrap();
    let u = probe_series(16)
        .mul(&fchordal::TruncatedSeries::constant(ratio(2, 1), 16))
        .unwrap();
    let rx = sol.x.compose(&u).unwrap();
    let ry = sol.y.compose(&u).unwrap();
    c.bench_function("gc_match_16", |bench| {
        bench.iter(|| {
            match_curves(
                (black_box(&sol.x), black_box(&sol.y)),
                (black_box(&rx), black_box(&ry)),
                16,
            )
            .unwrap()
        })
    });
}

criterion_group!(
    benches,
    series_ops,
    riordan_ops,
    branch_inversion,
    solver,
    continuity
);
criterion_main!(benches);
