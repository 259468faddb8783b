//! Residual verification of local solutions.
//!
//! A claimed solution (x, y, u) is checked against everything it must
//! satisfy: all entries of both matricial equations, and the coordinate
//! series of γ_P(u(t)) − γ_Q(t) built from the two induced
//! parametrizations of the far arc.  The verified order is the largest m
//! through which every one of those coefficients vanishes.

use crate::coeff::Coefficient;
use crate::problem::{FChordalError, FocusPoint, NormalizedProblem};
use crate::series::TruncatedSeries;
use crate::solver::{branch_vectors, system_residuals, LocalSolution};

/// The parametrization of the far arc induced by chords through the given
/// interior point: `point + φ(s)·(point − γ(t))/s` with `s = ‖point − γ(t)‖`.
/// `φ` must be anchored at s(0), the distance from the point to the vertex.
pub fn induced_parametrization(
    x: &TruncatedSeries,
    y: &TruncatedSeries,
    point: FocusPoint,
    phi: &TruncatedSeries,
) -> Result<(TruncatedSeries, TruncatedSeries), FChordalError> {
    let n = x.order().min(y.order()).min(phi.order());
    let backend = x.backend();
    let px = point.axis_coordinate(backend);
    let xt = x.truncate(n);
    let yt = y.truncate(n);
    let dx = TruncatedSeries::constant(px.clone(), n).sub(&xt)?;
    let s = dx.mul(&dx)?.add(&yt.mul(&yt)?)?.sqrt_series()?;
    let sigma = s.with_coeff(0, Coefficient::zero(backend));
    let w = phi.truncate(n).compose(&sigma)?.mul(&s.reciprocal()?)?;
    let bx = w.mul(&dx)?.add_constant(&px)?;
    let by = w.mul(&yt)?.neg();
    Ok((bx, by))
}

/// Largest order m ≤ n through which the full residual system of the
/// solution vanishes (backend-aware zero test).  Data that cannot be
/// evaluated at all — a non-composable u, a vertex collapse — verifies
/// nothing and reports 0.
pub fn verify_residual(sol: &LocalSolution, np: &NormalizedProblem, n: usize) -> usize {
    match first_failure(sol, np, n) {
        Ok(None) => n,
        Ok(Some(first)) => first.saturating_sub(1).min(n),
        Err(_) => 0,
    }
}

fn first_failure(
    sol: &LocalSolution,
    np: &NormalizedProblem,
    n: usize,
) -> Result<Option<usize>, FChordalError> {
    let n = n.min(sol.x.order()).min(sol.y.order()).min(sol.u.order());
    let mut first: Option<usize> = None;
    let mut note = |idx: Option<usize>| {
        if let Some(i) = idx {
            first = Some(first.map_or(i, |f| f.min(i)));
        }
    };

    let (a, b) = branch_vectors(np, n)?;
    let (ex, ey) = system_residuals(&sol.x, &sol.y, &sol.u, &a, &b, n)?;
    note(ex.iter().position(|c| !c.is_negligible()));
    note(ey.iter().position(|c| !c.is_negligible()));

    let (px, py) = induced_parametrization(&sol.x, &sol.y, FocusPoint::P, &np.phi.phi_p)?;
    let (qx, qy) = induced_parametrization(&sol.x, &sol.y, FocusPoint::Q, &np.phi.phi_q)?;
    let u = sol.u.truncate(n);
    note(px.compose(&u)?.sub(&qx)?.first_nonnegligible());
    note(py.compose(&u)?.sub(&qy)?.first_nonnegligible());
    Ok(first)
}
