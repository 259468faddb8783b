//! Closed-form oracles and numeric chord-condition residuals.
//!
//! The circle and ellipse constructors give exact series for configurations
//! whose solutions are known in closed form.  The numeric residual evaluates
//! the defining chord condition itself at a concrete parameter value, in
//! floating point, independently of the series algebra that produced the
//! solution.

use crate::coeff::{Backend, Coefficient};
use crate::implicit::ChordFunction;
use crate::problem::{FChordalError, FocusPoint, NormalizedProblem};
use crate::series::{SeriesError, TruncatedSeries};
use crate::solver::LocalSolution;
use crate::verify::induced_parametrization;
use thiserror::Error;

/// Mantissa precision used for numeric residuals of rational solutions.
pub const RESIDUAL_BITS: usize = 256;

/// Errors from the closed-form oracle constructors.
#[derive(Debug, Clone, Error)]
pub enum OracleError {
    #[error("circle radius must be positive")]
    InvalidRadius,
    #[error("ellipse semi-major axis must exceed 1")]
    InvalidAxis,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Upper branch of the circle (x − center_x)² + t² = radius² as a series in
/// t through order n: x(t) = center_x + sqrt(radius² − t²).
pub fn circle_series(
    center_x: &Coefficient,
    radius: &Coefficient,
    n: usize,
) -> Result<TruncatedSeries, OracleError> {
    if !radius.is_positive() || radius.is_negligible() {
        return Err(OracleError::InvalidRadius);
    }
    let backend = radius.backend();
    let mut inner = TruncatedSeries::zero(n, backend).with_coeff(0, radius.mul(radius));
    if n >= 2 {
        inner = inner.with_coeff(2, Coefficient::one(backend).neg());
    }
    Ok(inner.sqrt_series()?.add_constant(center_x)?)
}

/// Right branch of the ellipse x²/a² + t²/(a² − 1) = 1 with foci (±1, 0) as
/// a series in t through order n: x(t) = a·sqrt(1 − t²/(a² − 1)).
pub fn ellipse_series(a: &Coefficient, n: usize) -> Result<TruncatedSeries, OracleError> {
    let backend = a.backend();
    let one = Coefficient::one(backend);
    let margin = a.sub(&one);
    if !margin.is_positive() || margin.is_negligible() {
        return Err(OracleError::InvalidAxis);
    }
    let b2 = a.mul(a).sub(&one);
    let mut inner = TruncatedSeries::zero(n, backend).with_coeff(0, one);
    if n >= 2 {
        let minus_inv = b2.recip().map_err(SeriesError::from)?.neg();
        inner = inner.with_coeff(2, minus_inv);
    }
    Ok(inner.sqrt_series()?.scale(a)?)
}

fn distance_to_axis_point(
    x: &Coefficient,
    y: &Coefficient,
    px: &Coefficient,
) -> Result<Coefficient, SeriesError> {
    let dx = x.sub(px);
    Ok(dx.mul(&dx).add(&y.mul(y)).sqrt().map_err(SeriesError::from)?)
}

/// Evaluates the defining chord condition at the parameter value t, in
/// floating point: the chord through `point` meets the solved arc at γ(t)
/// and the far arc at the point the reparametrization pairs with it, and
/// the residual is F applied to the two distances minus the chord constant.
///
/// The pairing couples the two branches: chords through Q use the P-induced
/// far arc at u(t), chords through P the Q-induced far arc at u⁻¹(t), so a
/// wrong coefficient at order m shows up as a residual of order t^m instead
/// of cancelling identically.
pub fn chord_residual_numeric(
    sol: &LocalSolution,
    np: &NormalizedProblem,
    point: FocusPoint,
    t: &Coefficient,
) -> Result<Coefficient, FChordalError> {
    let bits = np.backend.precision().unwrap_or(RESIDUAL_BITS);
    let x = sol.x.to_float(bits)?;
    let y = sol.y.to_float(bits)?;
    let u = sol.u.to_float(bits)?;
    let tf = t.to_float(bits).map_err(SeriesError::from)?;

    let ax = x.eval(&tf)?;
    let ay = y.eval(&tf)?;

    let (far_point, far_phi, far_t) = match point {
        FocusPoint::Q => (FocusPoint::P, &np.phi.phi_p, u.eval(&tf)?),
        FocusPoint::P => {
            (FocusPoint::Q, &np.phi.phi_q, u.compositional_inverse()?.eval(&tf)?)
        }
    };
    let (gx, gy) = induced_parametrization(&x, &y, far_point, &far_phi.to_float(bits)?)?;
    let bx = gx.eval(&far_t)?;
    let by = gy.eval(&far_t)?;

    let px = point.axis_coordinate(Backend::Float { bits });
    let da = distance_to_axis_point(&ax, &ay, &px)?;
    let db = distance_to_axis_point(&bx, &by, &px)?;

    match &np.chord {
        ChordFunction::CustomPhi { .. } => {
            let (phi, anchor) = match point {
                FocusPoint::P => (&np.phi.phi_p, &np.phi.anchor_p),
                FocusPoint::Q => (&np.phi.phi_q, &np.phi.anchor_q),
            };
            let anchor = anchor.to_float(bits).map_err(SeriesError::from)?;
            let predicted = phi.to_float(bits)?.eval(&da.sub(&anchor))?;
            Ok(db.sub(&predicted))
        }
        ChordFunction::CustomF { f_p, f_q } => {
            let f = match point {
                FocusPoint::P => f_p,
                FocusPoint::Q => f_q,
            }
            .to_float(bits)?;
            let value = f.eval_at(&da.sub(f.anchor_a()), &db.sub(f.anchor_b()))?;
            Ok(value.sub(f.value_at_anchor()))
        }
        family => {
            let family = match family {
                ChordFunction::PowerSum { alpha } => ChordFunction::PowerSum {
                    alpha: alpha.to_float(bits).map_err(SeriesError::from)?,
                },
                other => other.clone(),
            };
            let k = match point {
                FocusPoint::P => &np.phi.k_p,
                FocusPoint::Q => &np.phi.k_q,
            }
            .as_ref()
            .expect("built-in families always carry chord constants");
            let value = family.eval_builtin(&da, &db).expect("family is built-in")?;
            Ok(value.sub(&k.to_float(bits).map_err(SeriesError::from)?))
        }
    }
}
