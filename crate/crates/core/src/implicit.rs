//! Chord branch series.
//!
//! A chord function `F(a, b)` relates the two distances from a chord's
//! endpoints to a fixed interior point; the *branch* at an anchor `a*` is
//! the series `φ` with `F(a, φ(a)) = k` and `φ(a*) = b*`, the distance to
//! the opposite endpoint.  Built-in families get closed forms; generic `F`
//! is accepted as bivariate Taylor data and solved by undetermined
//! coefficients.  The module also hosts the pivot diagnostics that predict
//! where the order-by-order curve solver can lose unique solvability.

use crate::bivariate::BivariateTaylor;
use crate::coeff::Coefficient;
use crate::series::{SeriesError, TruncatedSeries};
use thiserror::Error;

/// Errors from branch construction and diagnostics.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ImplicitError {
    #[error("chord-function domain violation: {0}")]
    DomainViolation(String),
    #[error("dF/db vanishes at the anchor; the branch is not locally solvable in b")]
    DegenerateFb,
    #[error("F at the anchor is {got}, expected the chord constant {expected}")]
    AnchorValueMismatch { expected: String, got: String },
    #[error("branch series has zero linear coefficient at the anchor")]
    ZeroPhi1,
    #[error("composition anchor mismatch: inner branch value {got} vs outer anchor {expected}")]
    AnchorMismatch { expected: String, got: String },
    #[error("{0} has no closed-form branch; supply Taylor data instead")]
    NotBuiltin(&'static str),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The chord relation `F(a, b)`, either a built-in family or user data.
#[derive(Clone, Debug, PartialEq)]
pub enum ChordFunction {
    /// F = a + b (constant chord length).
    Equichordal,
    /// F = a·b (constant product; the power of a point).
    Equiproduct,
    /// F = 1/a + 1/b (constant sum of reciprocals).
    Equireciprocal,
    /// F = a^alpha + b^alpha.  Non-rational exponents force the float
    /// backend via the underlying power operations.
    PowerSum { alpha: Coefficient },
    /// F = a - b (signed difference; antisymmetric).
    Difference,
    /// Branch series supplied directly, one per interior point.
    CustomPhi {
        phi_p: TruncatedSeries,
        anchor_p: Coefficient,
        phi_q: TruncatedSeries,
        anchor_q: Coefficient,
    },
    /// Taylor data of F, one expansion per interior point's anchor pair.
    CustomF { f_p: BivariateTaylor, f_q: BivariateTaylor },
}

impl ChordFunction {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ChordFunction::Equichordal => "equichordal",
            ChordFunction::Equiproduct => "equiproduct",
            ChordFunction::Equireciprocal => "equireciprocal",
            ChordFunction::PowerSum { .. } => "power-sum",
            ChordFunction::Difference => "difference",
            ChordFunction::CustomPhi { .. } => "custom-phi",
            ChordFunction::CustomF { .. } => "custom-f",
        }
    }

    /// True for the antisymmetric family, where the chord constant depends
    /// on the argument order.
    pub fn is_antisymmetric(&self) -> bool {
        matches!(self, ChordFunction::Difference)
    }

    /// F(a, b) for the built-in families; `None` for custom variants.
    pub fn eval_builtin(
        &self,
        a: &Coefficient,
        b: &Coefficient,
    ) -> Option<Result<Coefficient, ImplicitError>> {
        let out = match self {
            ChordFunction::Equichordal => Ok(a.add(b)),
            ChordFunction::Equiproduct => Ok(a.mul(b)),
            ChordFunction::Equireciprocal => a
                .recip()
                .and_then(|ra| b.recip().map(|rb| ra.add(&rb)))
                .map_err(|e| ImplicitError::Series(SeriesError::Coeff(e))),
            ChordFunction::PowerSum { alpha } => a
                .pow(alpha)
                .and_then(|pa| b.pow(alpha).map(|pb| pa.add(&pb)))
                .map_err(|e| ImplicitError::Series(SeriesError::Coeff(e))),
            ChordFunction::Difference => Ok(a.sub(b)),
            ChordFunction::CustomPhi { .. } | ChordFunction::CustomF { .. } => return None,
        };
        Some(out)
    }
}

/// The two branch series of one problem, anchored at the distances from the
/// interior points P and Q to the near vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiPair {
    pub phi_p: TruncatedSeries,
    pub phi_q: TruncatedSeries,
    pub anchor_p: Coefficient,
    pub anchor_q: Coefficient,
    /// Chord constants; absent when the relation is given as branch series
    /// only (`CustomPhi`).
    pub k_p: Option<Coefficient>,
    pub k_q: Option<Coefficient>,
}

/// Pivot diagnostics: the geometric constant `C` actually used as the
/// first-order reparametrization coefficient, the slope ratio of the two
/// branches, and the orders where either pivot condition degenerates.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    /// Both branch slopes are nonzero at their anchors.
    pub condition_iii: bool,
    /// C = (φ_Q0/φ_P0)·(x_0−1)/(x_0+1).
    pub c: Coefficient,
    /// ratio = φ_Q1/φ_P1.
    pub ratio: Coefficient,
    /// Orders n ≥ 1 with ratio^n = C (degenerate tangential pivots).
    pub paper_resonances: Vec<usize>,
    /// Orders k ≥ 2 with C^k = ratio (degenerate solver pivots).
    pub runtime_resonances: Vec<usize>,
}

fn require_positive(name: &str, v: &Coefficient) -> Result<(), ImplicitError> {
    if v.signum() > 0 && !v.is_negligible() {
        Ok(())
    } else {
        Err(ImplicitError::DomainViolation(format!("{name} must be positive, got {v}")))
    }
}

/// Closed-form branch series of a built-in family: the `φ` with
/// `F(a, φ(a)) = k` near `a = anchor`, truncated at order `n`.
pub fn phi_from_family(
    family: &ChordFunction,
    k: &Coefficient,
    anchor: &Coefficient,
    n: usize,
) -> Result<TruncatedSeries, ImplicitError> {
    require_positive("anchor", anchor)?;
    let backend = anchor.backend();
    // a as a series in the offset h: anchor + h.
    let mut a_series = TruncatedSeries::constant(anchor.clone(), n);
    if n >= 1 {
        a_series = a_series.with_coeff(1, Coefficient::one(backend));
    }
    match family {
        ChordFunction::Equichordal => {
            // b = k - a
            let phi0 = k.sub(anchor);
            require_positive("k - anchor", &phi0)?;
            Ok(TruncatedSeries::constant(k.clone(), n).sub(&a_series)?)
        }
        ChordFunction::Equiproduct => {
            // b = k / a
            require_positive("k", k)?;
            Ok(a_series.reciprocal()?.scale(k)?)
        }
        ChordFunction::Equireciprocal => {
            // b = a / (k·a - 1)
            let den0 = k.mul(anchor).sub(&Coefficient::one(backend));
            require_positive("k*anchor - 1", &den0)?;
            let den = a_series.scale(k)?.add_constant(&Coefficient::one(backend).neg())?;
            Ok(a_series.mul(&den.reciprocal()?)?)
        }
        ChordFunction::PowerSum { alpha } => {
            if alpha.is_zero() {
                return Err(ImplicitError::DomainViolation("alpha must be nonzero".into()));
            }
            // b = (k - a^alpha)^(1/alpha)
            let a0_pow = anchor.pow(alpha).map_err(SeriesError::from)?;
            let rem0 = k.sub(&a0_pow);
            require_positive("k - anchor^alpha", &rem0)?;
            let a_pow = a_series.pow_series(alpha, a0_pow)?;
            let rem = TruncatedSeries::constant(k.clone(), n).sub(&a_pow)?;
            let inv_alpha = alpha.recip().map_err(SeriesError::from)?;
            let phi0 = rem0.pow(&inv_alpha).map_err(SeriesError::from)?;
            Ok(rem.pow_series(&inv_alpha, phi0)?)
        }
        ChordFunction::Difference => {
            // b = a - k, or b = a + k on the branch with the roles swapped;
            // pick whichever keeps the anchored distance positive.
            let primary = anchor.sub(k);
            let offset = if primary.signum() > 0 && !primary.is_negligible() {
                k.neg()
            } else {
                let second = anchor.add(k);
                require_positive("anchor +/- k", &second)?;
                k.clone()
            };
            Ok(a_series.add_constant(&offset)?)
        }
        ChordFunction::CustomPhi { .. } | ChordFunction::CustomF { .. } => {
            Err(ImplicitError::NotBuiltin(family.kind_name()))
        }
    }
}

/// Bivariate Taylor data of a built-in family around `(a_star, b_star)`,
/// for cross-checks and generic-path evaluation.
pub fn bivariate_taylor(
    family: &ChordFunction,
    a_star: &Coefficient,
    b_star: &Coefficient,
    n: usize,
) -> Result<BivariateTaylor, ImplicitError> {
    require_positive("anchor a", a_star)?;
    require_positive("anchor b", b_star)?;
    let backend = a_star.backend();
    let one = Coefficient::one(backend);
    let mut f = BivariateTaylor::zero(a_star.clone(), b_star.clone(), n);
    match family {
        ChordFunction::Equichordal => {
            f.set_coeff(0, 0, a_star.add(b_star));
            if n >= 1 {
                f.set_coeff(1, 0, one.clone());
                f.set_coeff(0, 1, one);
            }
        }
        ChordFunction::Equiproduct => {
            f.set_coeff(0, 0, a_star.mul(b_star));
            if n >= 1 {
                f.set_coeff(1, 0, b_star.clone());
                f.set_coeff(0, 1, a_star.clone());
            }
            if n >= 2 {
                f.set_coeff(1, 1, one);
            }
        }
        ChordFunction::Equireciprocal => {
            // 1/(x* + dx) = sum_i (-1)^i dx^i / x*^(i+1)
            let inv_a = a_star.recip().map_err(SeriesError::from)?;
            let inv_b = b_star.recip().map_err(SeriesError::from)?;
            f.set_coeff(0, 0, inv_a.add(&inv_b));
            let mut ca = inv_a;
            let mut cb = inv_b;
            for m in 1..=n {
                ca = ca.div(a_star).map_err(SeriesError::from)?.neg();
                cb = cb.div(b_star).map_err(SeriesError::from)?.neg();
                f.set_coeff(m, 0, ca.clone());
                f.set_coeff(0, m, cb.clone());
            }
        }
        ChordFunction::PowerSum { alpha } => {
            if alpha.is_zero() {
                return Err(ImplicitError::DomainViolation("alpha must be nonzero".into()));
            }
            // c_m = binom(alpha, m)·x*^(alpha - m) via the descending
            // recurrence c_m = c_{m-1}·(alpha - m + 1)/(m·x*).
            let mut ca = a_star.pow(alpha).map_err(SeriesError::from)?;
            let mut cb = b_star.pow(alpha).map_err(SeriesError::from)?;
            f.set_coeff(0, 0, ca.add(&cb));
            for m in 1..=n {
                let m_c = Coefficient::from_int_backend(m as i64, backend);
                let fall = alpha.sub(&m_c).add(&one);
                ca = ca.mul(&fall).div(&m_c.mul(a_star)).map_err(SeriesError::from)?;
                cb = cb.mul(&fall).div(&m_c.mul(b_star)).map_err(SeriesError::from)?;
                f.set_coeff(m, 0, ca.clone());
                f.set_coeff(0, m, cb.clone());
            }
        }
        ChordFunction::Difference => {
            f.set_coeff(0, 0, a_star.sub(b_star));
            if n >= 1 {
                f.set_coeff(1, 0, one.clone());
                f.set_coeff(0, 1, one.neg());
            }
        }
        ChordFunction::CustomPhi { .. } | ChordFunction::CustomF { .. } => {
            return Err(ImplicitError::NotBuiltin(family.kind_name()));
        }
    }
    Ok(f)
}

/// Branch series of a generic chord relation given as Taylor data `f` at
/// `(a*, b*)`: the unique `φ` with `φ(a*) = b*` and `F(a, φ(a)) = k`
/// through order `n`, solved order by order.  Each order is linear in the
/// new coefficient with pivot `dF/db(a*, b*)`.
pub fn phi_implicit(
    f: &BivariateTaylor,
    k: &Coefficient,
    n: usize,
) -> Result<TruncatedSeries, ImplicitError> {
    if !f.value_at_anchor().agrees_with(k) {
        return Err(ImplicitError::AnchorValueMismatch {
            expected: k.to_string(),
            got: f.value_at_anchor().to_string(),
        });
    }
    if f.order() < n {
        return Err(ImplicitError::Series(SeriesError::LengthMismatch {
            expected: n + 1,
            got: f.order() + 1,
        }));
    }
    let backend = f.backend();
    let c01 = match f.db_at_anchor() {
        Some(c) if !c.is_negligible() => c.clone(),
        _ => return Err(ImplicitError::DegenerateFb),
    };
    let mut offset = TruncatedSeries::zero(n, backend);
    for m in 1..=n {
        let da = TruncatedSeries::identity(m, backend);
        let err = f.eval_compose(&da, &offset.truncate(m))?;
        let fix = err.coeff(m).neg().div(&c01).map_err(SeriesError::from)?;
        offset = offset.with_coeff(m, fix);
    }
    Ok(offset.add_constant(f.anchor_b())?)
}

/// Pivot diagnostics for a branch pair in the normalized frame with the
/// near vertex at `(x_0, 0)`.
///
/// `paper_resonances` lists the orders `n ≥ 1` where `ratio^n = C` — these
/// degenerate the tangential (parallel-mode) pivot.  `runtime_resonances`
/// lists the orders `k ≥ 2` where `C^k = ratio` — these degenerate the
/// transversal solver pivot `φ_Q1 − C^k·φ_P1`.  The two conditions differ
/// and are reported separately.
pub fn condition_check(
    phi_p: &TruncatedSeries,
    phi_q: &TruncatedSeries,
    x0: &Coefficient,
    n: usize,
) -> Result<ConditionReport, ImplicitError> {
    if phi_p.order() < 1 || phi_q.order() < 1 {
        return Err(ImplicitError::DomainViolation(
            "branch series must carry at least order 1".into(),
        ));
    }
    let backend = x0.backend();
    let one = Coefficient::one(backend);
    let phi_p1 = phi_p.coeff(1);
    let phi_q1 = phi_q.coeff(1);
    if phi_p1.is_negligible() {
        return Err(ImplicitError::ZeroPhi1);
    }
    let condition_iii = !phi_q1.is_negligible();
    let c = phi_q
        .coeff(0)
        .div(phi_p.coeff(0))
        .and_then(|r| r.mul(&x0.sub(&one)).div(&x0.add(&one)))
        .map_err(SeriesError::from)?;
    let ratio = phi_q1.div(phi_p1).map_err(SeriesError::from)?;
    let mut paper_resonances = Vec::new();
    let mut pow = ratio.clone();
    for m in 1..=n {
        if pow.agrees_with(&c) {
            paper_resonances.push(m);
        }
        pow = pow.mul(&ratio);
    }
    let mut runtime_resonances = Vec::new();
    let mut pow = c.mul(&c);
    for m in 2..=n {
        if pow.agrees_with(&ratio) {
            runtime_resonances.push(m);
        }
        pow = pow.mul(&c);
    }
    Ok(ConditionReport { condition_iii, c, ratio, paper_resonances, runtime_resonances })
}

/// Residual of the involution property: composing the branch at `a*` with
/// the branch at `b* = φ_a(a*)` must give back the identity,
/// `φ_b(φ_a(a* + h)) = a* + h`, when both come from one chord relation.
/// Returns the series `φ_b(φ_a(a* + h)) − (a* + h)`; any nonzero
/// coefficient pinpoints an inconsistency between the two branches.
pub fn phi_involution_check(
    phi_at_a: &TruncatedSeries,
    anchor_a: &Coefficient,
    phi_at_b: &TruncatedSeries,
    anchor_b: &Coefficient,
    n: usize,
) -> Result<TruncatedSeries, ImplicitError> {
    let n = n.min(phi_at_a.order()).min(phi_at_b.order());
    let inner0 = phi_at_a.coeff(0);
    if !inner0.agrees_with(anchor_b) {
        return Err(ImplicitError::AnchorMismatch {
            expected: anchor_b.to_string(),
            got: inner0.to_string(),
        });
    }
    let backend = anchor_a.backend();
    let offset = phi_at_a.truncate(n).with_coeff(0, Coefficient::zero(backend));
    let composed = phi_at_b.truncate(n).compose(&offset)?;
    let mut ident = TruncatedSeries::constant(anchor_a.clone(), n);
    if n >= 1 {
        ident = ident.with_coeff(1, Coefficient::one(backend));
    }
    Ok(composed.sub(&ident)?)
}
