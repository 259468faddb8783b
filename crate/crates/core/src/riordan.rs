//! Partial generalized Riordan matrices.
//!
//! `R_n(d, h)` is the (n+1)×(n+1) lower-triangular matrix whose column `j`
//! has generating function `d·h^j`: entry `a_{ij} = [t^i](d·h^j)`.  The
//! "generalized" qualifier drops the classical invertibility conditions — a
//! matrix is flagged *ordinary* only when `d_0 != 0` and `h_1 != 0`.
//!
//! The First Fundamental Theorem of Riordan Matrices drives everything here:
//! applying `R(d, h)` to the coefficient vector of a polynomial `V` yields
//! the coefficients of `d·(V∘h)`, and products satisfy
//! `R(d, h)·R(f, g) = R(d·(f∘h), g∘h)`.
//!
//! A partial matrix depends only on the order-n truncations of `d` and `h`;
//! growing it by one row ("extending") consumes exactly one new coefficient
//! of each.

use crate::coeff::{require_same_backend, Backend, Coefficient};
use crate::series::{SeriesError, TruncatedSeries};
use thiserror::Error;

/// Errors from building or combining partial Riordan matrices.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum RiordanError {
    #[error("h must vanish at 0 to give a lower-triangular matrix, got h_0 = {0}")]
    NonZeroH0(String),
    #[error("series of order >= {expected} required, got order {got}")]
    OrderTooLow { expected: usize, got: usize },
    #[error("expected a vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("size mismatch: {left}x{left} vs {right}x{right}")]
    SizeMismatch { left: usize, right: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The (n+1)×(n+1) lower-triangular matrix `R_n(d, h)` with
/// `a_{ij} = [t^i](d·h^j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialRiordanMatrix {
    d: TruncatedSeries,
    h: TruncatedSeries,
    /// Row i holds a_{i0}..a_{ii}; entries with j > i are implicitly zero.
    rows: Vec<Vec<Coefficient>>,
    ordinary: bool,
}

impl PartialRiordanMatrix {
    /// Builds `R_n(d, h)` from series of order at least `n`.  Requires
    /// `h_0 = 0` (lower triangularity).
    pub fn build(d: &TruncatedSeries, h: &TruncatedSeries, n: usize) -> Result<Self, RiordanError> {
        require_same_backend(d.coeff(0), h.coeff(0)).map_err(SeriesError::from)?;
        if d.order() < n {
            return Err(RiordanError::OrderTooLow { expected: n, got: d.order() });
        }
        if h.order() < n {
            return Err(RiordanError::OrderTooLow { expected: n, got: h.order() });
        }
        if !h.coeff(0).is_zero() {
            return Err(RiordanError::NonZeroH0(h.coeff(0).to_string()));
        }
        let d = d.truncate(n);
        let h = h.truncate(n);
        let mut rows: Vec<Vec<Coefficient>> =
            (0..=n).map(|i| Vec::with_capacity(i + 1)).collect();
        // Column j has generating function d·h^j.
        let mut col = d.clone();
        for j in 0..=n {
            for (i, row) in rows.iter_mut().enumerate().skip(j) {
                row.push(col.coeff(i).clone());
            }
            if j < n {
                col = col.mul(&h)?;
            }
        }
        let ordinary = !d.coeff(0).is_zero() && n >= 1 && !h.coeff(1).is_zero();
        Ok(PartialRiordanMatrix { d, h, rows, ordinary })
    }

    /// The identity `R_n(1, t)`.
    pub fn identity(n: usize, backend: Backend) -> Self {
        let one = TruncatedSeries::constant(Coefficient::one(backend), n);
        let t = if n >= 1 {
            TruncatedSeries::identity(n, backend)
        } else {
            TruncatedSeries::zero(0, backend)
        };
        PartialRiordanMatrix::build(&one, &t, n).expect("identity data is always valid")
    }

    /// Matrix size n+1.
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Truncation order n.
    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn backend(&self) -> Backend {
        self.d.backend()
    }

    /// True when d_0 != 0 and h_1 != 0 (invertible in the Riordan group).
    pub fn is_ordinary(&self) -> bool {
        self.ordinary
    }

    pub fn d_series(&self) -> &TruncatedSeries {
        &self.d
    }

    pub fn h_series(&self) -> &TruncatedSeries {
        &self.h
    }

    /// Entry a_{ij}; returns zero above the diagonal.  Panics when i
    /// exceeds the order.
    pub fn entry(&self, i: usize, j: usize) -> Coefficient {
        if j > i {
            Coefficient::zero(self.backend())
        } else {
            self.rows[i][j].clone()
        }
    }

    /// The stored lower-triangle rows (row i has length i+1).
    pub fn rows(&self) -> &[Vec<Coefficient>] {
        &self.rows
    }

    /// Matrix-vector product.  By the First Fundamental Theorem this equals
    /// the coefficient vector of `d·(V∘h)` where V is the generating
    /// polynomial of `v`.
    pub fn apply(&self, v: &[Coefficient]) -> Result<Vec<Coefficient>, RiordanError> {
        if v.len() != self.size() {
            return Err(RiordanError::LengthMismatch { expected: self.size(), got: v.len() });
        }
        let backend = self.backend();
        self.rows
            .iter()
            .map(|row| {
                let mut acc = Coefficient::zero(backend);
                for (a, x) in row.iter().zip(v) {
                    require_same_backend(a, x).map_err(SeriesError::from)?;
                    acc = acc.add(&a.mul(x));
                }
                Ok(acc)
            })
            .collect()
    }

    /// Product of two partial Riordan matrices of equal size:
    /// `R_n(d, h)·R_n(f, g) = R_n(d·(f∘h), g∘h)`.
    pub fn mul(&self, other: &Self) -> Result<Self, RiordanError> {
        if self.size() != other.size() {
            return Err(RiordanError::SizeMismatch { left: self.size(), right: other.size() });
        }
        let d = self.d.mul(&other.d.compose(&self.h)?)?;
        let h = other.h.compose(&self.h)?;
        PartialRiordanMatrix::build(&d, &h, self.order())
    }

    /// Grows the matrix by one row using the next coefficients of d and h.
    /// The principal (n+1)×(n+1) submatrix of the result equals `self`.
    pub fn extend(&self, d_next: Coefficient, h_next: Coefficient) -> Result<Self, RiordanError> {
        PartialRiordanMatrix::build(
            &self.d.extended(d_next),
            &self.h.extended(h_next),
            self.order() + 1,
        )
    }

    /// The principal m×m submatrix (m <= n+1) as a partial Riordan matrix.
    pub fn principal_submatrix(&self, m: usize) -> Result<Self, RiordanError> {
        if m == 0 || m > self.size() {
            return Err(RiordanError::SizeMismatch { left: self.size(), right: m });
        }
        PartialRiordanMatrix::build(&self.d.truncate(m - 1), &self.h.truncate(m - 1), m - 1)
    }
}
