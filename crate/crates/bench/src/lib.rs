//! Shared fixtures for the benchmarks: representative exact problems and
//! dense series at realistic orders.

use std::collections::BTreeMap;

use fchordal::{
    Backend, ChordFunction, Coefficient, FChordalProblem, Gauge, Mode, Point, TruncatedSeries,
};

pub fn ratio(n: i64, d: i64) -> Coefficient {
    Coefficient::from_ratio(n, d)
}

/// A dense alternating series with growing denominators, order `n`.
pub fn dense_series(n: usize) -> TruncatedSeries {
    let coeffs = (0..=n)
        .map(|i| ratio(if i % 2 == 0 { 1 } else { -1 }, i as i64 + 1))
        .collect();
    TruncatedSeries::from_coeffs(coeffs).expect("one backend")
}

/// A dense composable series (zero constant term), order `n`.
pub fn probe_series(n: usize) -> TruncatedSeries {
    let coeffs = (0..=n)
        .map(|i| if i == 0 { ratio(0, 1) } else { ratio(1, (i * i) as i64) })
        .collect();
    TruncatedSeries::from_coeffs(coeffs).expect("one backend")
}

/// The circle benchmark problem: equiproduct chords, V2 at (−3, 0).
pub fn equiproduct_problem(order: usize) -> FChordalProblem {
    FChordalProblem {
        v1: Point::from_ints(2, 0),
        p: Point::from_ints(1, 0),
        q: Point::from_ints(-1, 0),
        v2: Point::from_ints(-3, 0),
        chord: ChordFunction::Equiproduct,
        order,
        mode: Mode::Perpendicular,
        gauge: Gauge::default(),
        backend: Backend::Rational,
        overrides: BTreeMap::new(),
    }
}

/// The same problem on the float backend at the given precision.
pub fn float_problem(order: usize, bits: usize) -> FChordalProblem {
    let backend = Backend::Float { bits };
    let int = |v: i64| Coefficient::from_int_backend(v, backend);
    let point = |x: i64, y: i64| Point::new(int(x), int(y));
    FChordalProblem {
        v1: point(2, 0),
        p: point(1, 0),
        q: point(-1, 0),
        v2: point(-3, 0),
        chord: ChordFunction::Equiproduct,
        order,
        mode: Mode::Perpendicular,
        gauge: Gauge::canonical(backend),
        backend,
        overrides: BTreeMap::new(),
    }
}
