//! Order-by-order local solver for the normalized two-point F-chordal
//! problem.
//!
//! The unknown arc through V1 = (x_0, 0) is written x(t) = x_0 + x_1·t + …,
//! y(t) = y_1·t + …, and the chord relation at both interior points turns
//! into a pair of matricial equations over partial Riordan matrices,
//!
//! ```text
//!   [2,0,…] + R(1,u)·R(1−x, σ)·A = R(−1−x, τ)·B      (x-equation)
//!             R(1,u)·R(y,   σ)·A = R(y,    τ)·B      (y-equation)
//! ```
//!
//! where σ = s_P − s_P(0), τ = s_Q − s_Q(0) are the centered distance
//! series to P and Q, A and B are the coefficient vectors of
//! φ_P(anchor+h)/(anchor+h) and φ_Q(anchor+h)/(anchor+h), and u is the
//! regular reparametrization aligning the two induced parametrizations of
//! the far arc.  At each order k the residual pair is affine in the new
//! coefficients — the solver probes it at three trial points and solves
//! the resulting triangular 2×2 system, recording both pivots.

use crate::coeff::{Backend, Coefficient};
use crate::problem::{
    FChordalError, Gauge, Mode, NormalizedProblem, Overrides, Point, SimilarityTransform, Unknown,
    MAX_ORDER,
};
use crate::riordan::PartialRiordanMatrix;
use crate::series::{SeriesError, TruncatedSeries};
use crate::verify::verify_residual;

/// The pivots probed at one solver order: `u_pivot` multiplies u_k in the
/// equation that determines it (the y-equation in perpendicular and
/// oblique modes, the x-equation in parallel mode), `second_pivot`
/// multiplies the remaining unknown in the other equation.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderPivots {
    pub order: usize,
    pub u_pivot: Coefficient,
    pub second_pivot: Coefficient,
}

/// A solved local expansion with its diagnostics.
#[derive(Clone, Debug)]
pub struct LocalSolution {
    pub x: TruncatedSeries,
    pub y: TruncatedSeries,
    pub u: TruncatedSeries,
    pub mode: Mode,
    pub pivots: Vec<OrderPivots>,
    /// Orders where the second pivot vanished and the free coefficient was
    /// supplied by an override.
    pub resonant_orders: Vec<usize>,
    pub overrides_used: Vec<usize>,
    /// Largest order through which the full residual system vanishes.
    pub verified_order: usize,
    /// Float-backend values treated as zero that were not bit-exact zeros.
    pub float_collapses: usize,
}

/// Mutable solver state: the three series through the current order, the
/// branch vectors A and B, and the per-order diagnostics.
#[derive(Clone, Debug)]
pub struct LocalSolverState {
    x: TruncatedSeries,
    y: TruncatedSeries,
    u: TruncatedSeries,
    a: TruncatedSeries,
    b: TruncatedSeries,
    mode: Mode,
    backend: Backend,
    n: usize,
    pivots: Vec<OrderPivots>,
    resonant_orders: Vec<usize>,
    overrides_used: Vec<usize>,
    float_collapses: usize,
}

/// Coefficient vectors of φ((anchor)+h)/((anchor)+h) for both branches,
/// the stationary data A and B of the matricial system.
pub(crate) fn branch_vectors(
    np: &NormalizedProblem,
    n: usize,
) -> Result<(TruncatedSeries, TruncatedSeries), FChordalError> {
    let make = |phi: &TruncatedSeries, anchor: &Coefficient| -> Result<TruncatedSeries, FChordalError> {
        if phi.order() < n {
            return Err(SeriesError::LengthMismatch { expected: n + 1, got: phi.order() + 1 }.into());
        }
        let mut denom = TruncatedSeries::constant(anchor.clone(), n);
        if n >= 1 {
            denom = denom.with_coeff(1, Coefficient::one(np.backend));
        }
        Ok(phi.truncate(n).mul(&denom.reciprocal()?)?)
    };
    Ok((make(&np.phi.phi_p, &np.phi.anchor_p)?, make(&np.phi.phi_q, &np.phi.anchor_q)?))
}

/// Both residual vectors (left minus right, all k+1 entries) of the
/// matricial system for the given series data truncated at order k.
pub(crate) fn system_residuals(
    x: &TruncatedSeries,
    y: &TruncatedSeries,
    u: &TruncatedSeries,
    a: &TruncatedSeries,
    b: &TruncatedSeries,
    k: usize,
) -> Result<(Vec<Coefficient>, Vec<Coefficient>), FChordalError> {
    let backend = x.backend();
    let xt = x.truncate(k);
    let yt = y.truncate(k);
    let ut = u.truncate(k);
    let one = TruncatedSeries::constant(Coefficient::one(backend), k);
    let zero = Coefficient::zero(backend);

    let one_minus_x = one.sub(&xt)?;
    let y_sq = yt.mul(&yt)?;
    // σ and τ are the distance series minus their computed constants, so
    // their zero constant term is exact on either backend.
    let s_p = one_minus_x.mul(&one_minus_x)?.add(&y_sq)?.sqrt_series()?;
    let sigma = s_p.with_coeff(0, zero.clone());
    let one_plus_x = one.add(&xt)?;
    let s_q = one_plus_x.mul(&one_plus_x)?.add(&y_sq)?.sqrt_series()?;
    let tau = s_q.with_coeff(0, zero);

    let r_u = PartialRiordanMatrix::build(&one, &ut, k)?;
    let r_xp = PartialRiordanMatrix::build(&one_minus_x, &sigma, k)?;
    let r_xq = PartialRiordanMatrix::build(&one_plus_x.neg(), &tau, k)?;
    let r_yp = PartialRiordanMatrix::build(&yt, &sigma, k)?;
    let r_yq = PartialRiordanMatrix::build(&yt, &tau, k)?;

    let av = a.truncate(k);
    let bv = b.truncate(k);
    let lhs_x = r_u.apply(&r_xp.apply(av.coeffs())?)?;
    let rhs_x = r_xq.apply(bv.coeffs())?;
    let lhs_y = r_u.apply(&r_yp.apply(av.coeffs())?)?;
    let rhs_y = r_yq.apply(bv.coeffs())?;

    let two = Coefficient::from_int_backend(2, backend);
    let ex: Vec<Coefficient> = (0..=k)
        .map(|m| {
            let constant = if m == 0 { two.clone() } else { Coefficient::zero(backend) };
            constant.add(&lhs_x[m]).sub(&rhs_x[m])
        })
        .collect();
    let ey: Vec<Coefficient> = (0..=k).map(|m| lhs_y[m].sub(&rhs_y[m])).collect();
    Ok((ex, ey))
}

impl LocalSolverState {
    /// Sets up the state through order 1: gauge-fixed coordinates, the
    /// mode's first-order coefficients, and the branch vectors.
    pub fn new(
        np: &NormalizedProblem,
        mode: &Mode,
        gauge: &Gauge,
        n: usize,
    ) -> Result<Self, FChordalError> {
        if n < 1 || n > MAX_ORDER {
            return Err(FChordalError::InvalidOrder { got: n });
        }
        let backend = np.backend;
        if gauge.y1.backend() != backend || gauge.tail.iter().any(|c| c.backend() != backend) {
            return Err(FChordalError::InvalidGauge(
                "gauge coefficients must use the problem backend".into(),
            ));
        }
        if gauge.tail.len() > n.saturating_sub(1) {
            return Err(FChordalError::InvalidGauge(format!(
                "gauge tail supplies orders 2..={}, but the solve order is {n}",
                gauge.tail.len() + 1
            )));
        }
        let (a, b) = branch_vectors(np, n)?;
        let one = Coefficient::one(backend);
        let phi_p0 = np.phi.phi_p.coeff(0);
        let phi_q0 = np.phi.phi_q.coeff(0);
        let c = phi_q0
            .div(phi_p0)
            .and_then(|r| r.mul(&np.x0.sub(&one)).div(&np.x0.add(&one)))
            .map_err(SeriesError::from)?;

        let slope_ratio = || -> Result<Coefficient, FChordalError> {
            let phi_p1 = np.phi.phi_p.coeff(1);
            if phi_p1.is_negligible() {
                return Err(FChordalError::ZeroPhi1);
            }
            Ok(np.phi.phi_q.coeff(1).div(phi_p1).map_err(SeriesError::from)?)
        };

        let base_x = TruncatedSeries::constant(np.x0.clone(), n);
        let zero_series = TruncatedSeries::zero(n, backend);
        let with_tail = |mut s: TruncatedSeries| {
            for (i, c) in gauge.tail.iter().enumerate() {
                s = s.with_coeff(i + 2, c.clone());
            }
            s
        };

        let (x, y, u1) = match mode {
            Mode::Perpendicular => {
                if gauge.y1.is_negligible() {
                    return Err(FChordalError::InvalidGauge("y_1 must be nonzero".into()));
                }
                let y = with_tail(zero_series.with_coeff(1, gauge.y1.clone()));
                (base_x, y, c)
            }
            Mode::Parallel => {
                let u1 = slope_ratio()?;
                if u1.is_negligible() {
                    return Err(FChordalError::ZeroU1 { got: u1.to_string() });
                }
                let x = with_tail(base_x.with_coeff(1, one));
                (x, zero_series, u1)
            }
            Mode::Oblique { x1, y1 } => {
                if x1.is_negligible() || y1.is_negligible() {
                    return Err(FChordalError::InvalidGauge(
                        "an oblique tangent needs both components nonzero".into(),
                    ));
                }
                let ratio = slope_ratio()?;
                if !ratio.agrees_with(&c) {
                    return Err(FChordalError::NoObliqueTangent {
                        c: c.to_string(),
                        ratio: ratio.to_string(),
                    });
                }
                let x = base_x.with_coeff(1, x1.clone());
                let y = with_tail(zero_series.with_coeff(1, y1.clone()));
                (x, y, c)
            }
        };
        let u = TruncatedSeries::zero(n, backend).with_coeff(1, u1);

        let st = LocalSolverState {
            x,
            y,
            u,
            a,
            b,
            mode: mode.clone(),
            backend,
            n,
            pivots: Vec::new(),
            resonant_orders: Vec::new(),
            overrides_used: Vec::new(),
            float_collapses: 0,
        };
        debug_assert!(
            !backend.is_rational() || {
                let (ex, ey) = system_residuals(&st.x, &st.y, &st.u, &st.a, &st.b, 1.min(n))
                    .expect("order-1 residuals");
                ex.iter().chain(ey.iter()).all(Coefficient::is_zero)
            },
            "order-1 setup must satisfy both equations exactly"
        );
        Ok(st)
    }

    pub fn x(&self) -> &TruncatedSeries {
        &self.x
    }

    pub fn y(&self) -> &TruncatedSeries {
        &self.y
    }

    pub fn u(&self) -> &TruncatedSeries {
        &self.u
    }

    pub fn order(&self) -> usize {
        self.n
    }

    fn note_collapse(&mut self, v: &Coefficient) -> bool {
        let negligible = v.is_negligible();
        if negligible && !v.is_zero() {
            self.float_collapses += 1;
        }
        negligible
    }

    /// Last-entry residual pair (x-equation, y-equation) at order k with
    /// the order-k coefficients replaced by the given trials.
    fn probe(
        &self,
        k: usize,
        u_k: &Coefficient,
        x_k: &Coefficient,
        y_k: &Coefficient,
    ) -> Result<(Coefficient, Coefficient), FChordalError> {
        let x = self.x.truncate(k).with_coeff(k, x_k.clone());
        let y = self.y.truncate(k).with_coeff(k, y_k.clone());
        let u = self.u.truncate(k).with_coeff(k, u_k.clone());
        let (ex, ey) = system_residuals(&x, &y, &u, &self.a, &self.b, k)?;
        debug_assert!(
            !self.backend.is_rational()
                || ex[..k].iter().chain(ey[..k].iter()).all(Coefficient::is_zero),
            "entries below order {k} must vanish by the order-(k-1) invariant"
        );
        Ok((ex[k].clone(), ey[k].clone()))
    }

    /// Solves order k.  The residual pair is affine in (u_k, second),
    /// where the second unknown is x_k (perpendicular/oblique, y_k fixed
    /// by the gauge) or y_k (parallel, x_k fixed by the gauge); u_k's
    /// equation never involves the second unknown, so the system is
    /// triangular.  A vanishing second pivot needs the override to
    /// resolve the free coefficient.
    fn step(
        &mut self,
        k: usize,
        override_value: Option<&Coefficient>,
    ) -> Result<(Coefficient, Coefficient), FChordalError> {
        let zero = Coefficient::zero(self.backend);
        let one = Coefficient::one(self.backend);
        let parallel = matches!(self.mode, Mode::Parallel);

        let gauge_x = self.x.coeff(k).clone();
        let gauge_y = self.y.coeff(k).clone();
        let (p00, p10, p01) = if parallel {
            (
                self.probe(k, &zero, &gauge_x, &zero)?,
                self.probe(k, &one, &gauge_x, &zero)?,
                self.probe(k, &zero, &gauge_x, &one)?,
            )
        } else {
            (
                self.probe(k, &zero, &zero, &gauge_y)?,
                self.probe(k, &one, &zero, &gauge_y)?,
                self.probe(k, &zero, &one, &gauge_y)?,
            )
        };
        // Split each probe into the equation solving u_k and the equation
        // solving the second unknown.
        let pick = |pair: &(Coefficient, Coefficient)| -> (Coefficient, Coefficient) {
            if parallel {
                (pair.0.clone(), pair.1.clone())
            } else {
                (pair.1.clone(), pair.0.clone())
            }
        };
        let (u_r0, s_r0) = pick(&p00);
        let (u_r1, s_r1) = pick(&p10);
        let (u_rs, s_rs) = pick(&p01);

        let u_pivot = u_r1.sub(&u_r0);
        let second_pivot = s_rs.sub(&s_r0);
        debug_assert!(
            u_rs.sub(&u_r0).is_negligible(),
            "the u_k equation must not involve the second unknown"
        );

        let second_unknown = if parallel { Unknown::Y } else { Unknown::X };
        let u_k = if self.note_collapse(&u_pivot) {
            if self.note_collapse(&u_r0) {
                return Err(FChordalError::DegenerateOrder {
                    order: k,
                    unknown: Unknown::U,
                    pivot: u_pivot,
                    residual: u_r0,
                });
            }
            return Err(FChordalError::Inconsistent {
                order: k,
                unknown: Unknown::U,
                residual: u_r0,
            });
        } else {
            u_r0.neg().div(&u_pivot).map_err(SeriesError::from)?
        };

        let remainder = s_r0.add(&u_k.mul(&s_r1.sub(&s_r0)));
        let second = if self.note_collapse(&second_pivot) {
            if !self.note_collapse(&remainder) {
                return Err(FChordalError::Inconsistent {
                    order: k,
                    unknown: second_unknown,
                    residual: remainder,
                });
            }
            match override_value {
                Some(v) => {
                    self.resonant_orders.push(k);
                    self.overrides_used.push(k);
                    v.clone()
                }
                None => {
                    return Err(FChordalError::DegenerateOrder {
                        order: k,
                        unknown: second_unknown,
                        pivot: second_pivot,
                        residual: remainder,
                    })
                }
            }
        } else {
            if override_value.is_some() {
                return Err(FChordalError::OverrideAtRegularOrder { order: k });
            }
            remainder.neg().div(&second_pivot).map_err(SeriesError::from)?
        };

        self.u = self.u.with_coeff(k, u_k.clone());
        if parallel {
            self.y = self.y.with_coeff(k, second.clone());
        } else {
            self.x = self.x.with_coeff(k, second.clone());
        }
        self.pivots.push(OrderPivots { order: k, u_pivot, second_pivot });
        debug_assert!(
            !self.backend.is_rational() || {
                let (rx, ry) = self
                    .probe(k, &u_k, self.x.coeff(k), self.y.coeff(k))
                    .expect("post-step residual");
                rx.is_zero() && ry.is_zero()
            },
            "solved order {k} must zero both residuals"
        );
        Ok((u_k, second))
    }
}

/// Residual pair at order k for the trial coefficients (u_k, x_k), with
/// y_k taken from the gauge held in the state; the state must be valid
/// through order k−1.
pub fn assemble_residual(
    st: &LocalSolverState,
    k: usize,
    trial_u_k: &Coefficient,
    trial_x_k: &Coefficient,
) -> Result<(Coefficient, Coefficient), FChordalError> {
    st.probe(k, trial_u_k, trial_x_k, st.y.coeff(k))
}

/// Solves order k in place (no override), returning (u_k, x_k) in
/// perpendicular/oblique modes and (u_k, y_k) in parallel mode.
pub fn solve_order(
    st: &mut LocalSolverState,
    k: usize,
) -> Result<(Coefficient, Coefficient), FChordalError> {
    st.step(k, None)
}

/// Runs the order-by-order solve through order n and verifies the result.
pub fn solve(
    np: &NormalizedProblem,
    mode: &Mode,
    gauge: &Gauge,
    overrides: &Overrides,
    n: usize,
) -> Result<LocalSolution, FChordalError> {
    for v in overrides.values() {
        if v.backend() != np.backend {
            return Err(SeriesError::MixedBackends.into());
        }
    }
    let mut st = LocalSolverState::new(np, mode, gauge, n)?;
    for k in 2..=n {
        st.step(k, overrides.get(&k))?;
    }
    if let Some(unused) = overrides.keys().find(|k| !st.overrides_used.contains(k)) {
        return Err(FChordalError::OverrideAtRegularOrder { order: *unused });
    }
    let mut solution = LocalSolution {
        x: st.x,
        y: st.y,
        u: st.u,
        mode: mode.clone(),
        pivots: st.pivots,
        resonant_orders: st.resonant_orders,
        overrides_used: st.overrides_used,
        verified_order: 0,
        float_collapses: st.float_collapses,
    };
    solution.verified_order = verify_residual(&solution, np, n);
    Ok(solution)
}

/// Convenience entry point: normalize and solve a stated problem.
pub fn solve_problem(p: &crate::problem::FChordalProblem) -> Result<LocalSolution, FChordalError> {
    let np = crate::problem::normalize(p)?;
    solve(&np, &p.mode, &p.gauge, &p.overrides, p.order)
}

/// Evaluates the truncated solution at each sample parameter and maps the
/// points back through the inverse similarity.  Truncated evaluation: the
/// samples should stay small; no convergence statement is implied.
pub fn denormalize(
    sol: &LocalSolution,
    transform: &SimilarityTransform,
    samples: &[Coefficient],
) -> Result<Vec<Point>, FChordalError> {
    samples
        .iter()
        .map(|t| {
            let x = sol.x.eval(t)?;
            let y = sol.y.eval(t)?;
            Ok(transform.inverse(&Point::new(x, y)))
        })
        .collect()
}
