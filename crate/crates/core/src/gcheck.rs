//! Geometric continuity of curve joins via Riordan matrices.
//!
//! Two parametrized arcs meeting at a vertex join with continuity G^k when
//! a regular local reparametrization `u` (with `u(0) = 0`, `u'(0) != 0`)
//! carries the left Taylor data onto the right Taylor data:
//! `R_k(1, u)·[left] = [right]` for both coordinates.  By the First
//! Fundamental Theorem that is just `left ∘ u = right` through order k, so
//! the system is triangular in `u_1, ..., u_k` and can be solved by forward
//! elimination — no Riordan-group inverse is needed.

use crate::coeff::Coefficient;
use crate::series::{SeriesError, TruncatedSeries};
use thiserror::Error;

/// Hard errors: the join data never admits a well-posed question.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GCheckError {
    #[error("left parametrization is singular at the vertex: x'(0) = y'(0) = 0")]
    NonRegularLeft,
    #[error("the arcs do not share the vertex: left ({lx}, {ly}) vs right ({rx}, {ry})")]
    VertexMismatch { lx: String, ly: String, rx: String, ry: String },
    #[error("the solved reparametrization has u_1 = 0 and is not regular")]
    ZeroU1,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Taylor data of the two arcs at a shared vertex, through order k.
#[derive(Clone, Debug, PartialEq)]
pub struct JoinData {
    left_x: TruncatedSeries,
    left_y: TruncatedSeries,
    right_x: TruncatedSeries,
    right_y: TruncatedSeries,
}

/// Which coordinate a failure was detected in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinate {
    X,
    Y,
}

impl std::fmt::Display for Coordinate {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        out.write_str(match self {
            Coordinate::X => "x",
            Coordinate::Y => "y",
        })
    }
}

/// Outcome of a join check.
#[derive(Clone, Debug, PartialEq)]
pub enum GCReport {
    /// A regular reparametrization carries left onto right through order k.
    Success {
        u: TruncatedSeries,
        /// True when u_1 < 0: the join reverses orientation.
        orientation_reversing: bool,
    },
    /// No reparametrization works at `order`; lower orders all match.
    Failure {
        order: usize,
        coordinate: Coordinate,
        /// right coefficient minus the composed left coefficient at `order`.
        residual: Coefficient,
        /// The join is geometrically continuous through this order.
        max_verified: usize,
    },
}

impl JoinData {
    /// Validates shapes only: all four series share one order k >= 1 and one
    /// backend.  Vertex agreement and regularity are checked by `solve_join`.
    pub fn new(
        left_x: TruncatedSeries,
        left_y: TruncatedSeries,
        right_x: TruncatedSeries,
        right_y: TruncatedSeries,
    ) -> Result<Self, GCheckError> {
        let k = left_x.order();
        for s in [&left_y, &right_x, &right_y] {
            if s.order() != k {
                return Err(SeriesError::LengthMismatch { expected: k + 1, got: s.order() + 1 }.into());
            }
            if s.backend() != left_x.backend() {
                return Err(SeriesError::MixedBackends.into());
            }
        }
        if k < 1 {
            return Err(SeriesError::LengthMismatch { expected: 2, got: 1 }.into());
        }
        Ok(JoinData { left_x, left_y, right_x, right_y })
    }

    pub fn order(&self) -> usize {
        self.left_x.order()
    }

    pub fn left(&self) -> (&TruncatedSeries, &TruncatedSeries) {
        (&self.left_x, &self.left_y)
    }

    pub fn right(&self) -> (&TruncatedSeries, &TruncatedSeries) {
        (&self.right_x, &self.right_y)
    }
}

/// Finds the unique regular reparametrization u with
/// `(left_x ∘ u, left_y ∘ u) = (right_x, right_y)` through order k, or
/// reports the first order where none exists.
///
/// u_1 is pivoted on the first nonzero left linear coefficient (x
/// preferred, deterministically); each later order m is linear in u_m with
/// the same pivot.  The non-pivot coordinate is cross-checked at every
/// order; the first mismatch aborts with its order, coordinate, and
/// residual.
pub fn solve_join(j: &JoinData) -> Result<GCReport, GCheckError> {
    let k = j.order();
    let (lx, ly) = j.left();
    let (rx, ry) = j.right();
    if !lx.coeff(0).agrees_with(rx.coeff(0)) || !ly.coeff(0).agrees_with(ry.coeff(0)) {
        return Err(GCheckError::VertexMismatch {
            lx: lx.coeff(0).to_string(),
            ly: ly.coeff(0).to_string(),
            rx: rx.coeff(0).to_string(),
            ry: ry.coeff(0).to_string(),
        });
    }
    // Pivot on x when regular there, else on y.
    let x_pivots = !lx.coeff(1).is_negligible();
    if !x_pivots && ly.coeff(1).is_negligible() {
        return Err(GCheckError::NonRegularLeft);
    }
    let (pivot_left, pivot_right, cross_left, cross_right, cross_coord) = if x_pivots {
        (lx, rx, ly, ry, Coordinate::Y)
    } else {
        (ly, ry, lx, rx, Coordinate::X)
    };
    let backend = lx.backend();
    let pivot_inv = pivot_left.coeff(1).recip().map_err(SeriesError::from)?;

    let mut u = TruncatedSeries::zero(k, backend);
    let u1 = pivot_right.coeff(1).mul(&pivot_inv);
    if u1.is_negligible() {
        return Err(GCheckError::ZeroU1);
    }
    u = u.with_coeff(1, u1.clone());
    for m in 1..=k {
        if m >= 2 {
            // (pivot_left ∘ u)_m = pivot_left_1 · u_m + (terms in u_1..u_{m-1})
            let partial = pivot_left.truncate(m).compose(&u.truncate(m))?;
            let u_m = pivot_right.coeff(m).sub(partial.coeff(m)).mul(&pivot_inv);
            u = u.with_coeff(m, u_m);
        }
        let cross = cross_left.truncate(m).compose(&u.truncate(m))?;
        let residual = cross_right.coeff(m).sub(cross.coeff(m));
        if !residual.is_negligible() {
            return Ok(GCReport::Failure {
                order: m,
                coordinate: cross_coord,
                residual,
                max_verified: m - 1,
            });
        }
    }
    let orientation_reversing = u1.signum() < 0;
    Ok(GCReport::Success { u, orientation_reversing })
}

/// Composes a coordinate pair with a reparametrization: `(x ∘ u, y ∘ u)`.
pub fn apply_reparam(
    xs: &TruncatedSeries,
    ys: &TruncatedSeries,
    u: &TruncatedSeries,
) -> Result<(TruncatedSeries, TruncatedSeries), GCheckError> {
    Ok((xs.compose(u)?, ys.compose(u)?))
}

/// Checks whether two coordinate pairs describe the same arc up to a
/// regular reparametrization through order n, delegating to `solve_join`
/// with `p1` as the left data.
pub fn match_curves(
    p1: (&TruncatedSeries, &TruncatedSeries),
    p2: (&TruncatedSeries, &TruncatedSeries),
    n: usize,
) -> Result<GCReport, GCheckError> {
    let j = JoinData::new(
        p1.0.truncate(n),
        p1.1.truncate(n),
        p2.0.truncate(n),
        p2.1.truncate(n),
    )?;
    solve_join(&j)
}
