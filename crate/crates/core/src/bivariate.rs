//! Bivariate Taylor data for a two-argument function F(a, b) around an
//! anchor (a*, b*): coefficients c_{ij} for i + j <= N representing
//! sum c_{ij} (a - a*)^i (b - b*)^j.
//!
//! Symmetry of F is never assumed structurally: c_{ij} = c_{ji} only holds
//! when the two anchors coincide.

use crate::coeff::{require_same_backend, Backend, Coefficient};
use crate::series::{SeriesError, TruncatedSeries};

/// Triangular Taylor coefficients of F around (a*, b*).
#[derive(Clone, Debug, PartialEq)]
pub struct BivariateTaylor {
    anchor_a: Coefficient,
    anchor_b: Coefficient,
    /// Row i holds c_{i0}..c_{i,N-i}.
    rows: Vec<Vec<Coefficient>>,
}

impl BivariateTaylor {
    /// Builds from the anchor pair and triangular rows (row i has N+1-i
    /// entries, outer length N+1).
    pub fn new(
        anchor_a: Coefficient,
        anchor_b: Coefficient,
        rows: Vec<Vec<Coefficient>>,
    ) -> Result<Self, SeriesError> {
        require_same_backend(&anchor_a, &anchor_b)?;
        if rows.is_empty() {
            return Err(SeriesError::Empty);
        }
        let n = rows.len() - 1;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n + 1 - i {
                return Err(SeriesError::LengthMismatch {
                    expected: n + 1 - i,
                    got: row.len(),
                });
            }
            for c in row {
                require_same_backend(&anchor_a, c)?;
            }
        }
        Ok(BivariateTaylor { anchor_a, anchor_b, rows })
    }

    /// Zero data of the given total order.
    pub fn zero(anchor_a: Coefficient, anchor_b: Coefficient, order: usize) -> Self {
        let backend = anchor_a.backend();
        let rows = (0..=order)
            .map(|i| vec![Coefficient::zero(backend); order + 1 - i])
            .collect();
        BivariateTaylor { anchor_a, anchor_b, rows }
    }

    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn backend(&self) -> Backend {
        self.anchor_a.backend()
    }

    pub fn anchor_a(&self) -> &Coefficient {
        &self.anchor_a
    }

    pub fn anchor_b(&self) -> &Coefficient {
        &self.anchor_b
    }

    /// The coefficient c_{ij}; panics when i + j exceeds the order.
    pub fn coeff(&self, i: usize, j: usize) -> &Coefficient {
        &self.rows[i][j]
    }

    /// Sets c_{ij} (builder-style helper).
    pub fn set_coeff(&mut self, i: usize, j: usize, c: Coefficient) {
        self.rows[i][j] = c;
    }

    /// The function value at the anchor, c_{00}.
    pub fn value_at_anchor(&self) -> &Coefficient {
        &self.rows[0][0]
    }

    /// dF/db at the anchor, c_{01} (zero data of order 0 has none).
    pub fn db_at_anchor(&self) -> Option<&Coefficient> {
        self.rows.first().and_then(|r| r.get(1))
    }

    /// Series of F(a* + f(t), b* + g(t)) through the common order of f, g
    /// and the Taylor data.  The offsets f, g must vanish at t = 0.
    pub fn eval_compose(
        &self,
        f: &TruncatedSeries,
        g: &TruncatedSeries,
    ) -> Result<TruncatedSeries, SeriesError> {
        require_same_backend(&self.anchor_a, f.coeff(0))?;
        require_same_backend(&self.anchor_a, g.coeff(0))?;
        if !f.coeff(0).is_zero() {
            return Err(SeriesError::NonZeroConstant(f.coeff(0).to_string()));
        }
        if !g.coeff(0).is_zero() {
            return Err(SeriesError::NonZeroConstant(g.coeff(0).to_string()));
        }
        let n = self.order().min(f.order()).min(g.order());
        let backend = self.backend();
        let f = f.truncate(n);
        let g = g.truncate(n);
        // Powers of the offsets; f^i and g^j vanish below order i and j, so
        // only exponents up to n contribute.
        let mut f_pows = Vec::with_capacity(n + 1);
        let mut g_pows = Vec::with_capacity(n + 1);
        let one = TruncatedSeries::constant(Coefficient::one(backend), n);
        f_pows.push(one.clone());
        g_pows.push(one);
        for i in 1..=n {
            f_pows.push(f_pows[i - 1].mul(&f)?);
            g_pows.push(g_pows[i - 1].mul(&g)?);
        }
        // f^i g^j vanishes below order i + j, so only i + j <= n matters.
        let mut acc = TruncatedSeries::zero(n, backend);
        for i in 0..=n {
            for j in 0..=(n - i) {
                let c = self.coeff(i, j);
                if c.is_zero() {
                    continue;
                }
                let term = f_pows[i].mul(&g_pows[j])?.scale(c)?;
                acc = acc.add(&term)?;
            }
        }
        Ok(acc)
    }

    /// Converts anchors and coefficients to the float backend at the given
    /// precision.
    pub fn to_float(&self, bits: usize) -> Result<Self, SeriesError> {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|c| c.to_float(bits)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BivariateTaylor {
            anchor_a: self.anchor_a.to_float(bits)?,
            anchor_b: self.anchor_b.to_float(bits)?,
            rows,
        })
    }

    /// Numeric evaluation of the Taylor polynomial at offsets (da, db).
    pub fn eval_at(&self, da: &Coefficient, db: &Coefficient) -> Result<Coefficient, SeriesError> {
        require_same_backend(&self.anchor_a, da)?;
        require_same_backend(&self.anchor_a, db)?;
        let backend = self.backend();
        let mut acc = Coefficient::zero(backend);
        // Horner in a: acc = sum_i da^i * (sum_j c_ij db^j)
        for i in (0..=self.order()).rev() {
            let mut row_acc = Coefficient::zero(backend);
            for j in (0..self.rows[i].len()).rev() {
                row_acc = row_acc.mul(db).add(&self.rows[i][j]);
            }
            acc = acc.mul(da).add(&row_acc);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Coefficient {
        Coefficient::from_ratio(n, d)
    }

    fn c(n: i64) -> Coefficient {
        Coefficient::from_int(n)
    }

    /// F = a + b around (1, 3): c00 = 4, c10 = c01 = 1.
    fn sum_at_1_3(order: usize) -> BivariateTaylor {
        let mut f = BivariateTaylor::zero(c(1), c(3), order);
        f.set_coeff(0, 0, c(4));
        f.set_coeff(1, 0, c(1));
        f.set_coeff(0, 1, c(1));
        f
    }

    #[test]
    fn linear_cancellation() {
        let f = sum_at_1_3(1);
        let off_a = TruncatedSeries::from_ints(&[0, 1]);
        let off_b = TruncatedSeries::from_ints(&[0, -1]);
        let got = f.eval_compose(&off_a, &off_b).unwrap();
        assert_eq!(got, TruncatedSeries::from_ints(&[4, 0]));
    }

    #[test]
    fn product_with_compensating_branch() {
        // F = a*b around (1, 4): c00 = 4, c10 = 4, c01 = 1, c11 = 1.
        let mut f = BivariateTaylor::zero(c(1), c(4), 2);
        f.set_coeff(0, 0, c(4));
        f.set_coeff(1, 0, c(4));
        f.set_coeff(0, 1, c(1));
        f.set_coeff(1, 1, c(1));
        // a = 1 + t, b = 4/(1+t) ~ 4 - 4t + 4t^2: product stays 4.
        let off_a = TruncatedSeries::from_ints(&[0, 1, 0]);
        let off_b = TruncatedSeries::from_ints(&[0, -4, 4]);
        let got = f.eval_compose(&off_a, &off_b).unwrap();
        assert_eq!(got, TruncatedSeries::from_ints(&[4, 0, 0]));
    }

    #[test]
    fn zero_offsets_evaluate_the_anchor() {
        let f = sum_at_1_3(2);
        let z = TruncatedSeries::zero(2, Backend::Rational);
        let got = f.eval_compose(&z, &z).unwrap();
        assert_eq!(got, TruncatedSeries::from_ints(&[4, 0, 0]));
    }

    #[test]
    fn nonzero_offset_constant_is_rejected() {
        let f = sum_at_1_3(1);
        let bad = TruncatedSeries::from_ints(&[1, 1]);
        let ok = TruncatedSeries::from_ints(&[0, 1]);
        assert!(f.eval_compose(&bad, &ok).is_err());
        assert!(f.eval_compose(&ok, &bad).is_err());
    }

    #[test]
    fn triangular_shape_is_enforced() {
        let bad = BivariateTaylor::new(c(0), c(0), vec![vec![c(1), c(2)], vec![c(3), c(4)]]);
        assert!(matches!(bad, Err(SeriesError::LengthMismatch { .. })));
    }

    #[test]
    fn numeric_eval_matches_series_constant_term() {
        let mut f = BivariateTaylor::zero(c(2), c(5), 2);
        f.set_coeff(0, 0, c(10));
        f.set_coeff(1, 0, c(5));
        f.set_coeff(0, 1, c(2));
        f.set_coeff(1, 1, c(1));
        f.set_coeff(2, 0, q(1, 2));
        let v = f.eval_at(&q(1, 2), &q(-1, 3)).unwrap();
        // 10 + 5/2 - 2/3 - 1/6 + 1/8 = 283/24
        assert_eq!(v, q(283, 24));
    }
}
