//! Problem statement and exact normalization of the two-point interior
//! F-chordal problem.
//!
//! Four collinear points V1, P, Q, V2 (the two vertices and the two
//! interior chordal points) are carried by an orientation-preserving
//! similarity onto the normalized frame P = (1,0), Q = (−1,0),
//! V1 = (x_0, 0) with x_0 > 1 and V2 = (1 − φ_{P0}, 0).  Chord constants
//! of the built-in families are recomputed from the normalized distances,
//! so the (possibly irrational) scale factor never enters; custom chord
//! data is rescaled coefficientwise and therefore needs the scale to be
//! rational.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::{Backend, Coefficient};
use crate::implicit::{phi_from_family, phi_implicit, ChordFunction, ImplicitError, PhiPair};
use crate::riordan::RiordanError;
use crate::series::{SeriesError, TruncatedSeries};
use thiserror::Error;

/// Largest supported truncation order (rational coefficient bit-growth).
pub const MAX_ORDER: usize = 64;

/// A point of the plane with exact coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub x: Coefficient,
    pub y: Coefficient,
}

impl Point {
    pub fn new(x: Coefficient, y: Coefficient) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point { x: Coefficient::from_int(x), y: Coefficient::from_int(y) }
    }

    fn sub(&self, other: &Self) -> Self {
        Point { x: self.x.sub(&other.x), y: self.y.sub(&other.y) }
    }

    fn dot(&self, other: &Self) -> Coefficient {
        self.x.mul(&other.x).add(&self.y.mul(&other.y))
    }

    fn cross(&self, other: &Self) -> Coefficient {
        self.x.mul(&other.y).sub(&self.y.mul(&other.x))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "({}, {})", self.x, self.y)
    }
}

/// One of the two interior chordal points in the normalized frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FocusPoint {
    P,
    Q,
}

impl FocusPoint {
    /// The x-coordinate of the point in the normalized frame: +1 or −1.
    pub fn axis_coordinate(&self, backend: Backend) -> Coefficient {
        match self {
            FocusPoint::P => Coefficient::one(backend),
            FocusPoint::Q => Coefficient::one(backend).neg(),
        }
    }
}

/// The orientation-preserving similarity taking P to (1,0) and Q to
/// (−1,0), stored exactly.  In complex form it is z ↦ (z − mid)/half with
/// mid = (P+Q)/2 and half = (P−Q)/2, so forward division is carried out
/// with the conjugate over |half|² and stays inside the coefficient field.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityTransform {
    mid: Point,
    half: Point,
    norm2: Coefficient,
    inv_norm2: Coefficient,
}

impl SimilarityTransform {
    pub fn new(p: &Point, q: &Point) -> Result<Self, FChordalError> {
        let backend = p.x.backend();
        let half_divisor = Coefficient::from_int_backend(2, backend);
        let mid = Point {
            x: p.x.add(&q.x).div(&half_divisor).map_err(SeriesError::from)?,
            y: p.y.add(&q.y).div(&half_divisor).map_err(SeriesError::from)?,
        };
        let half = Point {
            x: p.x.sub(&q.x).div(&half_divisor).map_err(SeriesError::from)?,
            y: p.y.sub(&q.y).div(&half_divisor).map_err(SeriesError::from)?,
        };
        let norm2 = half.dot(&half);
        if norm2.is_negligible() {
            return Err(FChordalError::BadOrdering("P and Q coincide".into()));
        }
        let inv_norm2 = norm2.recip().map_err(SeriesError::from)?;
        Ok(SimilarityTransform { mid, half, norm2, inv_norm2 })
    }

    /// Maps original coordinates into the normalized frame.
    pub fn forward(&self, pt: &Point) -> Point {
        let d = pt.sub(&self.mid);
        Point {
            x: d.dot(&self.half).mul(&self.inv_norm2),
            y: d.cross(&self.half).neg().mul(&self.inv_norm2),
        }
    }

    /// Maps normalized coordinates back to the original frame.
    pub fn inverse(&self, pt: &Point) -> Point {
        Point {
            x: self.mid.x.add(&self.half.x.mul(&pt.x)).sub(&self.half.y.mul(&pt.y)),
            y: self.mid.y.add(&self.half.y.mul(&pt.x)).add(&self.half.x.mul(&pt.y)),
        }
    }

    /// s² where s = 2/‖P−Q‖ is the distance scale of `forward`.
    pub fn scale_squared(&self) -> &Coefficient {
        &self.inv_norm2
    }

    /// The distance scale s itself; errors when it is irrational on the
    /// rational backend (rescaling custom chord data then has no exact
    /// representation).
    pub fn scale(&self) -> Result<Coefficient, FChordalError> {
        self.inv_norm2.sqrt().map_err(|_| FChordalError::IrrationalScale)
    }
}

/// How the sought curve meets the axis at the vertex V1.
#[derive(Clone, Debug, PartialEq)]
pub enum Mode {
    /// Tangent perpendicular to the axis (x_1 = 0, y_1 ≠ 0).
    Perpendicular,
    /// Tangent along the axis (y_1 = 0, x_1 ≠ 0); the candidate is the
    /// axis segment itself.
    Parallel,
    /// Tangent with both components nonzero; admissible only under an
    /// exact first-order resonance between the two branch slopes.
    Oblique { x1: Coefficient, y1: Coefficient },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Perpendicular => "perpendicular",
            Mode::Parallel => "parallel",
            Mode::Oblique { .. } => "oblique",
        }
    }
}

/// The free coefficient tail of the local solution.  The first-order
/// coefficient `y1` scales the transversal coordinate in perpendicular
/// mode (canonically 1); `tail` supplies the free coordinate's
/// coefficients from order 2 on (y in perpendicular and oblique modes, x
/// in parallel mode), defaulting to all zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauge {
    pub y1: Coefficient,
    pub tail: Vec<Coefficient>,
}

impl Gauge {
    /// The canonical gauge y(t) = t.
    pub fn canonical(backend: Backend) -> Self {
        Gauge { y1: Coefficient::one(backend), tail: Vec::new() }
    }
}

impl Default for Gauge {
    fn default() -> Self {
        Gauge::canonical(Backend::Rational)
    }
}

/// Coefficient injections for degenerate orders, keyed by order.
pub type Overrides = BTreeMap<usize, Coefficient>;

/// A two-point interior F-chordal problem as stated: four points, a chord
/// relation, and the solve configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct FChordalProblem {
    pub v1: Point,
    pub p: Point,
    pub q: Point,
    pub v2: Point,
    pub chord: ChordFunction,
    pub order: usize,
    pub mode: Mode,
    pub gauge: Gauge,
    pub backend: Backend,
    pub overrides: Overrides,
}

/// The problem in the normalized frame, with both chord branches expanded
/// at the vertex anchors.
#[derive(Clone, Debug)]
pub struct NormalizedProblem {
    /// V1 = (x_0, 0), x_0 > 1.
    pub x0: Coefficient,
    /// V2 = (v2x, 0) = (1 − φ_{P0}, 0), v2x < −1.
    pub v2x: Coefficient,
    pub phi: PhiPair,
    /// The chord relation with custom payloads rescaled to the normalized
    /// frame; built-in families pass through unchanged (their constants
    /// are recomputed from normalized distances).
    pub chord: ChordFunction,
    pub transform: SimilarityTransform,
    pub backend: Backend,
    pub warnings: Vec<String>,
}

/// Which unknown a degenerate order leaves free.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unknown {
    U,
    X,
    Y,
}

impl fmt::Display for Unknown {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(match self {
            Unknown::U => "u",
            Unknown::X => "x",
            Unknown::Y => "y",
        })
    }
}

/// Errors from normalization and the order-by-order solver.
#[derive(Debug, Clone, Error)]
pub enum FChordalError {
    #[error("the four points are not collinear")]
    NonCollinear,
    #[error("points are not ordered V1, P, Q, V2 along the axis: {0}")]
    BadOrdering(String),
    #[error("order-0 inconsistency: {detail}")]
    Order0Inconsistent { detail: String },
    #[error("custom chord data anchored at {got}, expected the normalized distance {expected}")]
    AnchorMismatch { expected: String, got: String },
    #[error(
        "the normalization scale 2/|P-Q| is irrational; custom chord data \
         cannot be rescaled exactly on this backend"
    )]
    IrrationalScale,
    #[error(
        "no oblique tangent: needs the slope ratio {ratio} to equal the \
         vertex-distance constant {c} exactly"
    )]
    NoObliqueTangent { c: String, ratio: String },
    #[error("order {order} admits no solution: zero {unknown}-pivot against residual {residual}")]
    Inconsistent { order: usize, unknown: Unknown, residual: Coefficient },
    #[error(
        "order {order} is degenerate: {unknown}-pivot {pivot} with residual {residual}; \
         the coefficient is free — supply an override for this order"
    )]
    DegenerateOrder { order: usize, unknown: Unknown, pivot: Coefficient, residual: Coefficient },
    #[error("the first-order reparametrization coefficient u_1 = {got} vanishes; no regular local reparametrization exists")]
    ZeroU1 { got: String },
    #[error("branch slope φ_P1 vanishes at the anchor; the mode's first-order pivot is undefined")]
    ZeroPhi1,
    #[error("invalid gauge: {0}")]
    InvalidGauge(String),
    #[error("override supplied at order {order}, which is not a degenerate order")]
    OverrideAtRegularOrder { order: usize },
    #[error("order {got} out of range (1..={MAX_ORDER})")]
    InvalidOrder { got: usize },
    #[error(transparent)]
    Implicit(#[from] ImplicitError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Riordan(#[from] RiordanError),
}

fn exceeds(value: &Coefficient, bound: i64) -> bool {
    let diff = value.sub(&Coefficient::from_int_backend(bound, value.backend()));
    diff.is_positive() && !diff.is_negligible()
}

/// Rescales a branch series under a → s·a: the coefficient of h^i picks up
/// s^(1−i) because the value scales by s and the offset variable by 1/s.
fn rescale_phi(phi: &TruncatedSeries, s: &Coefficient, n: usize) -> Result<TruncatedSeries, FChordalError> {
    if phi.order() < n {
        return Err(SeriesError::LengthMismatch { expected: n + 1, got: phi.order() + 1 }.into());
    }
    let inv_s = s.recip().map_err(SeriesError::from)?;
    let mut out = Vec::with_capacity(n + 1);
    let mut factor = s.clone();
    for i in 0..=n {
        out.push(phi.coeff(i).mul(&factor));
        factor = factor.mul(&inv_s);
    }
    Ok(TruncatedSeries::from_coeffs(out)?)
}

/// Rescales bivariate Taylor data under (a, b) → (s·a, s·b): values are
/// unchanged, both offset variables shrink by s, so c_ij picks up s^−(i+j).
fn rescale_bivariate(
    f: &crate::bivariate::BivariateTaylor,
    s: &Coefficient,
) -> Result<crate::bivariate::BivariateTaylor, FChordalError> {
    let inv_s = s.recip().map_err(SeriesError::from)?;
    let n = f.order();
    let mut out = crate::bivariate::BivariateTaylor::zero(
        f.anchor_a().mul(s),
        f.anchor_b().mul(s),
        n,
    );
    for i in 0..=n {
        for j in 0..=(n - i) {
            out.set_coeff(i, j, f.coeff(i, j).mul(&inv_s.pow_usize(i + j)));
        }
    }
    Ok(out)
}

fn builtin_phi(
    family: &ChordFunction,
    a: &Coefficient,
    b: &Coefficient,
    n: usize,
) -> Result<(TruncatedSeries, Coefficient), FChordalError> {
    let k = family
        .eval_builtin(a, b)
        .expect("builtin families evaluate directly")?;
    let phi = phi_from_family(family, &k, a, n)?;
    Ok((phi, k))
}

/// Carries the problem into the normalized frame and expands both chord
/// branches at the vertex anchors.
pub fn normalize(p: &FChordalProblem) -> Result<NormalizedProblem, FChordalError> {
    let backend = p.backend;
    for pt in [&p.v1, &p.p, &p.q, &p.v2] {
        if pt.x.backend() != backend || pt.y.backend() != backend {
            return Err(SeriesError::MixedBackends.into());
        }
    }
    if p.order > MAX_ORDER {
        return Err(FChordalError::InvalidOrder { got: p.order });
    }
    let n = p.order;
    let transform = SimilarityTransform::new(&p.p, &p.q)?;

    let axis = p.q.sub(&p.p);
    for vertex in [&p.v1, &p.v2] {
        if !axis.cross(&vertex.sub(&p.p)).is_negligible() {
            return Err(FChordalError::NonCollinear);
        }
    }

    let nv1 = transform.forward(&p.v1);
    let nv2 = transform.forward(&p.v2);
    let x0 = nv1.x;
    let v2x = nv2.x;
    if !exceeds(&x0, 1) {
        return Err(FChordalError::BadOrdering(format!(
            "V1 maps to axis coordinate {x0}, expected > 1 (beyond P)"
        )));
    }
    if !exceeds(&v2x.neg(), 1) {
        return Err(FChordalError::BadOrdering(format!(
            "V2 maps to axis coordinate {v2x}, expected < -1 (beyond Q)"
        )));
    }

    let one = Coefficient::one(backend);
    // Normalized distances from each interior point to the two vertices;
    // the first argument of F is always the distance to the near vertex V1.
    let a_p = x0.sub(&one);
    let b_p = one.sub(&v2x);
    let a_q = x0.add(&one);
    let b_q = one.neg().sub(&v2x);

    let mut warnings = Vec::new();
    if p.chord.is_antisymmetric() {
        warnings.push(format!(
            "{} is antisymmetric: constants use F(near, far) with the \
             distance to V1 first; swapping the roles negates them",
            p.chord.kind_name()
        ));
    }

    let (phi, chord) = match &p.chord {
        ChordFunction::CustomPhi { phi_p, anchor_p, phi_q, anchor_q } => {
            let s = transform.scale()?;
            let scaled_anchor_p = anchor_p.mul(&s);
            if !scaled_anchor_p.agrees_with(&a_p) {
                return Err(FChordalError::AnchorMismatch {
                    expected: a_p.to_string(),
                    got: scaled_anchor_p.to_string(),
                });
            }
            let scaled_anchor_q = anchor_q.mul(&s);
            if !scaled_anchor_q.agrees_with(&a_q) {
                return Err(FChordalError::AnchorMismatch {
                    expected: a_q.to_string(),
                    got: scaled_anchor_q.to_string(),
                });
            }
            let phi_p = rescale_phi(phi_p, &s, n)?;
            let phi_q = rescale_phi(phi_q, &s, n)?;
            if !phi_p.coeff(0).agrees_with(&b_p) {
                return Err(FChordalError::Order0Inconsistent {
                    detail: format!(
                        "φ_P at its anchor is {}, but V2 sits at distance {} from P",
                        phi_p.coeff(0),
                        b_p
                    ),
                });
            }
            if !phi_q.coeff(0).agrees_with(&b_q) {
                return Err(FChordalError::Order0Inconsistent {
                    detail: format!(
                        "φ_Q at its anchor is {}, but V2 sits at distance {} from Q",
                        phi_q.coeff(0),
                        b_q
                    ),
                });
            }
            let chord = ChordFunction::CustomPhi {
                phi_p: phi_p.clone(),
                anchor_p: a_p.clone(),
                phi_q: phi_q.clone(),
                anchor_q: a_q.clone(),
            };
            (
                PhiPair {
                    phi_p,
                    phi_q,
                    anchor_p: a_p,
                    anchor_q: a_q,
                    k_p: None,
                    k_q: None,
                },
                chord,
            )
        }
        ChordFunction::CustomF { f_p, f_q } => {
            let s = transform.scale()?;
            let f_p = rescale_bivariate(f_p, &s)?;
            let f_q = rescale_bivariate(f_q, &s)?;
            for (f, a, b) in [(&f_p, &a_p, &b_p), (&f_q, &a_q, &b_q)] {
                if !f.anchor_a().agrees_with(a) {
                    return Err(FChordalError::AnchorMismatch {
                        expected: a.to_string(),
                        got: f.anchor_a().to_string(),
                    });
                }
                if !f.anchor_b().agrees_with(b) {
                    return Err(FChordalError::Order0Inconsistent {
                        detail: format!(
                            "Taylor data anchored at far-distance {}, but V2 sits at distance {b}",
                            f.anchor_b()
                        ),
                    });
                }
            }
            let k_p = f_p.value_at_anchor().clone();
            let k_q = f_q.value_at_anchor().clone();
            let phi_p = phi_implicit(&f_p, &k_p, n)?;
            let phi_q = phi_implicit(&f_q, &k_q, n)?;
            let chord = ChordFunction::CustomF { f_p, f_q };
            (
                PhiPair {
                    phi_p,
                    phi_q,
                    anchor_p: a_p,
                    anchor_q: a_q,
                    k_p: Some(k_p),
                    k_q: Some(k_q),
                },
                chord,
            )
        }
        family => {
            let (phi_p, k_p) = builtin_phi(family, &a_p, &b_p, n)?;
            let (phi_q, k_q) = builtin_phi(family, &a_q, &b_q, n)?;
            (
                PhiPair {
                    phi_p,
                    phi_q,
                    anchor_p: a_p,
                    anchor_q: a_q,
                    k_p: Some(k_p),
                    k_q: Some(k_q),
                },
                family.clone(),
            )
        }
    };

    // 2 − φ_P0 = −φ_Q0: both express the axis coordinate of V2.
    let lhs = Coefficient::from_int_backend(2, backend).sub(phi.phi_p.coeff(0));
    let rhs = phi.phi_q.coeff(0).neg();
    if !lhs.agrees_with(&rhs) {
        return Err(FChordalError::Order0Inconsistent {
            detail: format!("2 − φ_P0 = {lhs} but −φ_Q0 = {rhs}"),
        });
    }

    Ok(NormalizedProblem { x0, v2x, phi, chord, transform, backend, warnings })
}
