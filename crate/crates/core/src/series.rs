//! Truncated univariate formal power series over the coefficient field.
//!
//! A `TruncatedSeries` holds the coefficients c_0..c_N of a series anchored
//! at parameter 0.  The truncation order N is explicit state: binary
//! operations truncate to the smaller order, and coefficients beyond N are
//! undefined rather than assumed zero.

use std::fmt;

use thiserror::Error;

use crate::coeff::{require_same_backend, Backend, CoeffError, Coefficient};

/// Errors from series construction and arithmetic.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SeriesError {
    #[error("series must have at least one coefficient")]
    Empty,
    #[error("all coefficients of one series must share a backend")]
    MixedBackends,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("composition requires a zero constant term, got {0}")]
    NonZeroConstant(String),
    #[error("reciprocal requires a nonzero constant term")]
    ZeroConstantTerm,
    #[error("compositional inverse requires a nonzero linear term")]
    ZeroLinearTerm,
    #[error("square root requires a positive constant term, got {0}")]
    NonPositiveConstant(String),
    #[error("constant term {0} has no exact rational square root; use the float backend")]
    IrrationalRoot(String),
    #[error("expected a vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Coefficients c_0..c_N of a formal power series truncated at order N.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Coefficient>,
}

impl TruncatedSeries {
    /// Builds a series from its coefficients (length = order + 1).
    pub fn from_coeffs(coeffs: Vec<Coefficient>) -> Result<Self, SeriesError> {
        let first = coeffs.first().ok_or(SeriesError::Empty)?;
        let backend = first.backend();
        if coeffs.iter().any(|c| c.backend() != backend) {
            return Err(SeriesError::MixedBackends);
        }
        Ok(TruncatedSeries { coeffs })
    }

    /// Convenience constructor from small integers on the rational backend.
    pub fn from_ints(values: &[i64]) -> Self {
        TruncatedSeries {
            coeffs: values.iter().map(|&v| Coefficient::from_int(v)).collect(),
        }
    }

    /// The zero series of the given order.
    pub fn zero(order: usize, backend: Backend) -> Self {
        TruncatedSeries {
            coeffs: vec![Coefficient::zero(backend); order + 1],
        }
    }

    /// The constant series c + 0·t + ... of the given order.
    pub fn constant(c: Coefficient, order: usize) -> Self {
        let backend = c.backend();
        let mut coeffs = vec![Coefficient::zero(backend); order + 1];
        coeffs[0] = c;
        TruncatedSeries { coeffs }
    }

    /// The identity series t (order >= 1).
    pub fn identity(order: usize, backend: Backend) -> Self {
        assert!(order >= 1, "identity series needs order >= 1");
        let mut coeffs = vec![Coefficient::zero(backend); order + 1];
        coeffs[1] = Coefficient::one(backend);
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn backend(&self) -> Backend {
        self.coeffs[0].backend()
    }

    /// The i-th coefficient; panics if i exceeds the truncation order.
    pub fn coeff(&self, i: usize) -> &Coefficient {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[Coefficient] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Coefficient> {
        self.coeffs
    }

    /// Replaces one coefficient (used by solvers injecting trial values).
    pub fn with_coeff(&self, i: usize, c: Coefficient) -> Self {
        let mut out = self.clone();
        out.coeffs[i] = c;
        out
    }

    /// Truncates to order `min(m, self.order())`.
    pub fn truncate(&self, m: usize) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs[..=m.min(self.order())].to_vec(),
        }
    }

    /// Extends with explicit higher-order coefficients.
    pub fn extended(&self, extra: Coefficient) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.push(extra);
        TruncatedSeries { coeffs }
    }

    fn check_pair(&self, other: &Self) -> Result<usize, SeriesError> {
        require_same_backend(&self.coeffs[0], &other.coeffs[0])?;
        Ok(self.order().min(other.order()))
    }

    /// Coefficientwise sum, truncated to the smaller order.
    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.check_pair(other)?;
        Ok(TruncatedSeries {
            coeffs: (0..=n).map(|i| self.coeffs[i].add(&other.coeffs[i])).collect(),
        })
    }

    /// Coefficientwise difference, truncated to the smaller order.
    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.check_pair(other)?;
        Ok(TruncatedSeries {
            coeffs: (0..=n).map(|i| self.coeffs[i].sub(&other.coeffs[i])).collect(),
        })
    }

    /// Cauchy product, truncated to the smaller order.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.check_pair(other)?;
        let backend = self.backend();
        let mut coeffs = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = Coefficient::zero(backend);
            for i in 0..=k {
                acc = acc.add(&self.coeffs[i].mul(&other.coeffs[k - i]));
            }
            coeffs.push(acc);
        }
        Ok(TruncatedSeries { coeffs })
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    /// Multiplies every coefficient by a scalar of the same backend.
    pub fn scale(&self, s: &Coefficient) -> Result<Self, SeriesError> {
        require_same_backend(&self.coeffs[0], s)?;
        Ok(TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect(),
        })
    }

    /// Adds a constant to the constant term only.
    pub fn add_constant(&self, c: &Coefficient) -> Result<Self, SeriesError> {
        require_same_backend(&self.coeffs[0], c)?;
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].add(c);
        Ok(out)
    }

    /// Composition f(g(t)) through the common order, by Horner accumulation
    /// over truncated powers of g.  Requires g_0 = 0.
    pub fn compose(&self, g: &Self) -> Result<Self, SeriesError> {
        let n = self.check_pair(g)?;
        if !g.coeffs[0].is_zero() {
            return Err(SeriesError::NonZeroConstant(g.coeffs[0].to_string()));
        }
        let g = g.truncate(n);
        let mut acc = TruncatedSeries::constant(self.coeffs[n].clone(), n);
        for i in (0..n).rev() {
            acc = acc.mul(&g)?;
            acc.coeffs[0] = acc.coeffs[0].add(&self.coeffs[i]);
        }
        Ok(acc)
    }

    /// Compositional inverse through order N: the series v with
    /// (f ∘ v)(t) = t.  Requires f_0 = 0 and f_1 != 0.
    pub fn compositional_inverse(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonZeroConstant(self.coeffs[0].to_string()));
        }
        let n = self.order();
        if n == 0 || self.coeffs[1].is_zero() {
            return Err(SeriesError::ZeroLinearTerm);
        }
        let backend = self.backend();
        let inv1 = self.coeffs[1].recip()?;
        let mut v = TruncatedSeries::zero(n, backend);
        v.coeffs[1] = inv1.clone();
        // (f ∘ v)_m is linear in v_m with pivot f_1; solve order by order.
        for m in 2..=n {
            let err = self.truncate(m).compose(&v.truncate(m))?;
            v.coeffs[m] = err.coeffs[m].neg().mul(&inv1);
        }
        Ok(v)
    }

    /// Multiplicative inverse through order N.  Requires f_0 != 0.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0].is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let n = self.order();
        let inv0 = self.coeffs[0].recip()?;
        let mut out = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            // f_0 c_k + sum_{i=1..k} f_i c_{k-i} = 0
            let mut acc = Coefficient::zero(self.backend());
            for i in 1..=k {
                acc = acc.add(&self.coeffs[i].mul(&out[k - i]));
            }
            out.push(acc.neg().mul(&inv0));
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// Positive-branch square root through order N: g with g·g = f and
    /// g_0 = +sqrt(f_0).
    ///
    /// Requires f_0 > 0 — strictly on the rational backend (where f_0 must in
    /// addition be a perfect rational square), above the precision-scaled
    /// collapse threshold on the float backend.
    pub fn sqrt_series(&self) -> Result<Self, SeriesError> {
        let f0 = &self.coeffs[0];
        if f0.signum() <= 0 || f0.is_negligible() {
            return Err(SeriesError::NonPositiveConstant(f0.to_string()));
        }
        let g0 = f0.sqrt().map_err(|e| match e {
            CoeffError::IrrationalRoot(v) => SeriesError::IrrationalRoot(v),
            other => SeriesError::Coeff(other),
        })?;
        let n = self.order();
        let two_g0_inv = g0.add(&g0).recip()?;
        let mut out = Vec::with_capacity(n + 1);
        out.push(g0);
        for k in 1..=n {
            // f_k = 2 g_0 g_k + sum_{i=1..k-1} g_i g_{k-i}
            let mut acc = self.coeffs[k].clone();
            for i in 1..k {
                acc = acc.sub(&out[i].mul(&out[k - i]));
            }
            out.push(acc.mul(&two_g0_inv));
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// General power f^beta through order N, given the caller-computed
    /// constant term g_0 = f_0^beta.  Requires f_0 != 0.
    ///
    /// Uses the first-order recurrence n f_0 g_n = sum_{j<n} (beta(n-j) - j)
    /// f_{n-j} g_j, which stays inside the field for any field exponent.
    pub fn pow_series(&self, beta: &Coefficient, g0: Coefficient) -> Result<Self, SeriesError> {
        require_same_backend(&self.coeffs[0], beta)?;
        require_same_backend(&self.coeffs[0], &g0)?;
        if self.coeffs[0].is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let backend = self.backend();
        let n = self.order();
        let mut out = Vec::with_capacity(n + 1);
        out.push(g0);
        for m in 1..=n {
            let mut acc = Coefficient::zero(backend);
            for j in 0..m {
                let w = beta
                    .mul(&Coefficient::from_int_backend((m - j) as i64, backend))
                    .sub(&Coefficient::from_int_backend(j as i64, backend));
                acc = acc.add(&w.mul(&self.coeffs[m - j]).mul(&out[j]));
            }
            let denom = Coefficient::from_int_backend(m as i64, backend).mul(&self.coeffs[0]);
            out.push(acc.div(&denom)?);
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// Formal derivative, order N-1 (the derivative of an order-0 series is
    /// the order-0 zero series).
    pub fn derivative(&self) -> Self {
        let backend = self.backend();
        if self.order() == 0 {
            return TruncatedSeries::zero(0, backend);
        }
        let coeffs = (1..=self.order())
            .map(|i| {
                self.coeffs[i].mul(&Coefficient::from_int_backend(i as i64, backend))
            })
            .collect();
        TruncatedSeries { coeffs }
    }

    /// Evaluates the truncation polynomial at a point of the same backend.
    pub fn eval(&self, t: &Coefficient) -> Result<Coefficient, SeriesError> {
        require_same_backend(&self.coeffs[0], t)?;
        let mut acc = self.coeffs[self.order()].clone();
        for i in (0..self.order()).rev() {
            acc = acc.mul(t).add(&self.coeffs[i]);
        }
        Ok(acc)
    }

    /// True when every coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first coefficient that fails the backend-aware zero
    /// test, or `None` if all pass.
    pub fn first_nonnegligible(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_negligible())
    }

    /// Converts every coefficient to the float backend at `bits`.
    pub fn to_float(&self, bits: usize) -> Result<Self, SeriesError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.to_float(bits))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TruncatedSeries { coeffs })
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, "]")
    }
}
