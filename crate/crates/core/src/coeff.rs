//! Coefficient field: exact arbitrary-precision rationals (default) or
//! configurable-precision binary floats.
//!
//! Rational values are kept in lowest terms with a positive denominator and
//! all arithmetic on them is exact.  Float values carry their precision in
//! bits; two floats of different precision count as different backends, and
//! mixing backends in one computation is an error surfaced by the series
//! layer.  The low-level operators on `Coefficient` itself panic on a
//! mismatch, so callers validate once per operation and then compute freely.

use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Rounding used for every float operation.
const RM: RoundingMode = RoundingMode::ToEven;

/// Smallest float precision accepted; below this the zero-collapse threshold
/// 2^(-bits/2) would be too coarse to distinguish structure from noise.
pub const MIN_FLOAT_PRECISION: usize = 128;

thread_local! {
    // astro-float's constants cache, required by parse and pow.
    static CONSTS: std::cell::RefCell<Consts> =
        std::cell::RefCell::new(Consts::new().expect("constants cache"));
}

/// Identifies the arithmetic backend a value lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Exact arbitrary-precision rationals.
    Rational,
    /// Binary floats with the given mantissa precision in bits.
    Float { bits: usize },
}

impl Backend {
    pub fn is_rational(&self) -> bool {
        matches!(self, Backend::Rational)
    }

    /// Precision in bits for float backends, `None` for rational.
    pub fn precision(&self) -> Option<usize> {
        match self {
            Backend::Rational => None,
            Backend::Float { bits } => Some(*bits),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Rational => write!(f, "rational"),
            Backend::Float { bits } => write!(f, "float({} bits)", bits),
        }
    }
}

/// Errors produced by coefficient-level arithmetic and parsing.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CoeffError {
    #[error("backend mismatch: {0} vs {1}")]
    BackendMismatch(Backend, Backend),
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative value")]
    NegativeSqrt,
    #[error("{0} has no exact rational root; use the float backend")]
    IrrationalRoot(String),
    #[error("power with non-integer exponent needs a positive base, got {0}")]
    NegativeBase(String),
    #[error("float precision must be at least {MIN_FLOAT_PRECISION} bits, got {0}")]
    PrecisionTooLow(usize),
    #[error("cannot parse {0:?} as a {1} coefficient")]
    Parse(String, Backend),
    #[error("non-finite float result in {0}")]
    NonFinite(&'static str),
}

/// An element of the coefficient field.
#[derive(Clone, Debug)]
pub enum Coefficient {
    Rational(BigRational),
    Float { value: BigFloat, bits: usize },
}

impl Coefficient {
    // ----- constructors -----

    pub fn zero(backend: Backend) -> Self {
        Self::from_int_backend(0, backend)
    }

    pub fn one(backend: Backend) -> Self {
        Self::from_int_backend(1, backend)
    }

    /// Exact rational integer.
    pub fn from_int(n: i64) -> Self {
        Coefficient::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Integer in the requested backend.
    pub fn from_int_backend(n: i64, backend: Backend) -> Self {
        match backend {
            Backend::Rational => Self::from_int(n),
            Backend::Float { bits } => Coefficient::Float {
                value: BigFloat::from_i64(n, bits),
                bits,
            },
        }
    }

    /// Exact rational n/d.  Panics if `d == 0` (programmer error, as with
    /// integer division).
    pub fn from_ratio(n: i64, d: i64) -> Self {
        Coefficient::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_big_rational(r: BigRational) -> Self {
        Coefficient::Rational(r)
    }

    /// Parses a coefficient in the given backend.
    ///
    /// Rational accepts `p/q`, integers, finite decimals and scientific
    /// notation with integer exponent (`-3`, `4/3`, `0.25`, `2.5e-2`), all
    /// converted exactly.  Float accepts the same forms rounded to the
    /// backend precision.  Anything else is rejected, never coerced.
    pub fn parse(s: &str, backend: Backend) -> Result<Self, CoeffError> {
        let err = || CoeffError::Parse(s.to_string(), backend);
        let t = s.trim();
        if t.is_empty() {
            return Err(err());
        }
        if let Backend::Float { bits } = backend {
            if bits < MIN_FLOAT_PRECISION {
                return Err(CoeffError::PrecisionTooLow(bits));
            }
        }
        // p/q form, numerator and denominator themselves decimal forms.
        if let Some((n, d)) = t.split_once('/') {
            let num = parse_decimal(n).ok_or_else(err)?;
            let den = parse_decimal(d).ok_or_else(err)?;
            if den.is_zero() {
                return Err(CoeffError::DivisionByZero);
            }
            let r = num / den;
            return Ok(match backend {
                Backend::Rational => Coefficient::Rational(r),
                Backend::Float { bits } => rational_to_float(&r, bits),
            });
        }
        let r = parse_decimal(t).ok_or_else(err)?;
        Ok(match backend {
            Backend::Rational => Coefficient::Rational(r),
            Backend::Float { bits } => rational_to_float(&r, bits),
        })
    }

    // ----- inspectors -----

    pub fn backend(&self) -> Backend {
        match self {
            Coefficient::Rational(_) => Backend::Rational,
            Coefficient::Float { bits, .. } => Backend::Float { bits: *bits },
        }
    }

    /// Exact zero test (no tolerance on either backend).
    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_zero(),
            Coefficient::Float { value, .. } => value.is_zero(),
        }
    }

    /// Backend-aware zero test: exact for rationals; for floats, true when
    /// `|value| < 2^(-bits/2)`.  Callers that treat a nonzero float as zero
    /// based on this test should record the collapse (see the solver).
    pub fn is_negligible(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_zero(),
            Coefficient::Float { value, bits } => {
                if value.is_zero() {
                    return true;
                }
                // Mantissa is normalized into [0.5, 1), so |v| < 2^e <= 2^(-bits/2)
                // exactly when the exponent e is at most -bits/2.
                match value.exponent() {
                    Some(e) => i64::from(e) <= -((bits / 2) as i64),
                    None => false, // NaN / Inf never collapse silently
                }
            }
        }
    }

    /// Backend-aware equality: exact on the rational backend, difference
    /// below the collapse threshold on the float backend.  Mismatched
    /// backends never agree.
    pub fn agrees_with(&self, other: &Self) -> bool {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => a == b,
            (Coefficient::Float { .. }, Coefficient::Float { .. }) => {
                self.sub(other).is_negligible()
            }
            _ => false,
        }
    }

    /// Sign of the value: -1, 0, or +1.  NaN reports 0.
    pub fn signum(&self) -> i32 {
        match self {
            Coefficient::Rational(r) => {
                if r.is_zero() {
                    0
                } else if r.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Coefficient::Float { value, .. } => {
                if value.is_zero() || value.is_nan() {
                    0
                } else if value.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    /// Borrows the rational payload; panics on the float backend.
    pub fn as_rational(&self) -> &BigRational {
        match self {
            Coefficient::Rational(r) => r,
            Coefficient::Float { .. } => panic!("as_rational on a float coefficient"),
        }
    }

    /// True when the value is a rational integer.
    pub fn is_integer(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_integer(),
            Coefficient::Float { .. } => false,
        }
    }

    // ----- arithmetic (panics on backend mismatch; callers validate once) -----

    fn float_bin(
        a: &BigFloat,
        b: &BigFloat,
        bits: usize,
        f: impl Fn(&BigFloat, &BigFloat, usize, RoundingMode) -> BigFloat,
    ) -> BigFloat {
        f(a, b, bits, RM)
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => Coefficient::Rational(a + b),
            (Coefficient::Float { value: a, bits }, Coefficient::Float { value: b, bits: b2 }) => {
                assert_eq!(bits, b2, "float precision mismatch");
                Coefficient::Float {
                    value: Self::float_bin(a, b, *bits, BigFloat::add),
                    bits: *bits,
                }
            }
            _ => panic!("backend mismatch in add"),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => Coefficient::Rational(a - b),
            (Coefficient::Float { value: a, bits }, Coefficient::Float { value: b, bits: b2 }) => {
                assert_eq!(bits, b2, "float precision mismatch");
                Coefficient::Float {
                    value: Self::float_bin(a, b, *bits, BigFloat::sub),
                    bits: *bits,
                }
            }
            _ => panic!("backend mismatch in sub"),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => Coefficient::Rational(a * b),
            (Coefficient::Float { value: a, bits }, Coefficient::Float { value: b, bits: b2 }) => {
                assert_eq!(bits, b2, "float precision mismatch");
                Coefficient::Float {
                    value: Self::float_bin(a, b, *bits, BigFloat::mul),
                    bits: *bits,
                }
            }
            _ => panic!("backend mismatch in mul"),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Coefficient::Rational(a) => Coefficient::Rational(-a),
            Coefficient::Float { value, bits } => Coefficient::Float {
                value: value.neg(),
                bits: *bits,
            },
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Exact (rational) or correctly rounded (float) division.
    pub fn div(&self, other: &Self) -> Result<Self, CoeffError> {
        if other.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => Ok(Coefficient::Rational(a / b)),
            (Coefficient::Float { value: a, bits }, Coefficient::Float { value: b, bits: b2 }) => {
                assert_eq!(bits, b2, "float precision mismatch");
                Ok(Coefficient::Float {
                    value: a.div(b, *bits, RM),
                    bits: *bits,
                })
            }
            _ => Err(CoeffError::BackendMismatch(self.backend(), other.backend())),
        }
    }

    pub fn recip(&self) -> Result<Self, CoeffError> {
        Coefficient::one(self.backend()).div(self)
    }

    /// Nonnegative integer power.
    pub fn pow_usize(&self, e: usize) -> Self {
        match self {
            Coefficient::Rational(a) => Coefficient::Rational(num_traits::pow(a.clone(), e)),
            Coefficient::Float { value, bits } => {
                let mut acc = BigFloat::from_i64(1, *bits);
                let mut base = value.clone();
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc.mul(&base, *bits, RM);
                    }
                    base = base.mul(&base, *bits, RM);
                    e >>= 1;
                }
                Coefficient::Float { value: acc, bits: *bits }
            }
        }
    }

    /// Positive square root.  Rational backend requires an exact perfect
    /// square (of the reduced numerator and denominator) and otherwise
    /// reports `IrrationalRoot` instead of silently switching backends.
    pub fn sqrt(&self) -> Result<Self, CoeffError> {
        if self.signum() < 0 {
            return Err(CoeffError::NegativeSqrt);
        }
        match self {
            Coefficient::Rational(r) => {
                let n = exact_int_sqrt(r.numer())?;
                let d = exact_int_sqrt(r.denom())?;
                Ok(Coefficient::Rational(BigRational::new(n, d)))
            }
            Coefficient::Float { value, bits } => Ok(Coefficient::Float {
                value: value.sqrt(*bits, RM),
                bits: *bits,
            }),
        }
    }

    /// `self^exp` for a general exponent of the same backend.
    ///
    /// Rational backend: the exponent must be rational p/q and the exact
    /// q-th root of the (positive) base must exist, else `IrrationalRoot`.
    /// Float backend: computed by the float `pow` kernel; non-integer
    /// exponents require a positive base.
    pub fn pow(&self, exp: &Self) -> Result<Self, CoeffError> {
        match (self, exp) {
            (Coefficient::Rational(base), Coefficient::Rational(e)) => {
                let p = e.numer();
                let q = e.denom(); // > 0 in lowest terms
                // Integer root first: base^(1/q), exact or error.
                let root = if q.is_one() {
                    base.clone()
                } else {
                    if !base.is_positive() {
                        return Err(CoeffError::NegativeBase(base.to_string()));
                    }
                    let q32 = q
                        .to_u32()
                        .ok_or_else(|| CoeffError::IrrationalRoot(base.to_string()))?;
                    BigRational::new(
                        exact_nth_root(base.numer(), q32)?,
                        exact_nth_root(base.denom(), q32)?,
                    )
                };
                // Then the integer power p, with sign handling.
                let p_abs = p
                    .abs()
                    .to_usize()
                    .ok_or_else(|| CoeffError::IrrationalRoot(base.to_string()))?;
                let powed = num_traits::pow(root, p_abs);
                if p.is_negative() {
                    if powed.is_zero() {
                        return Err(CoeffError::DivisionByZero);
                    }
                    Ok(Coefficient::Rational(powed.recip()))
                } else {
                    Ok(Coefficient::Rational(powed))
                }
            }
            (Coefficient::Float { value, bits }, Coefficient::Float { value: e, bits: b2 }) => {
                assert_eq!(bits, b2, "float precision mismatch");
                let out = CONSTS.with(|cc| value.pow(e, *bits, RM, &mut cc.borrow_mut()));
                if out.is_nan() || out.is_inf() {
                    return Err(CoeffError::NonFinite("pow"));
                }
                Ok(Coefficient::Float { value: out, bits: *bits })
            }
            _ => Err(CoeffError::BackendMismatch(self.backend(), exp.backend())),
        }
    }

    /// Converts to the float backend at the given precision.  Exact rational
    /// inputs are converted by one correctly rounded division.
    pub fn to_float(&self, bits: usize) -> Result<Self, CoeffError> {
        if bits < MIN_FLOAT_PRECISION {
            return Err(CoeffError::PrecisionTooLow(bits));
        }
        match self {
            Coefficient::Rational(r) => Ok(rational_to_float(r, bits)),
            Coefficient::Float { value, bits: b } => {
                if *b == bits {
                    Ok(self.clone())
                } else {
                    // Re-round to the target precision via an exact-by-value add.
                    Ok(Coefficient::Float {
                        value: value.add(&BigFloat::from_i64(0, bits), bits, RM),
                        bits,
                    })
                }
            }
        }
    }

    /// Total order within one backend; `None` across backends or when a
    /// float NaN is involved.
    pub fn partial_cmp_same(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => Some(a.cmp(b)),
            (Coefficient::Float { value: a, .. }, Coefficient::Float { value: b, .. }) => {
                a.cmp(b).map(|s| s.cmp(&0))
            }
            _ => None,
        }
    }
}

impl PartialEq for Coefficient {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => a == b,
            (Coefficient::Float { value: a, .. }, Coefficient::Float { value: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Coefficient {
    /// Rationals print as `p/q` (or bare integer when q = 1); floats print
    /// in decimal scientific notation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Rational(r) => write!(f, "{}", r),
            Coefficient::Float { value, .. } => write!(f, "{}", value),
        }
    }
}

/// Requires two coefficients to share a backend, as a typed error.
pub fn require_same_backend(a: &Coefficient, b: &Coefficient) -> Result<(), CoeffError> {
    if a.backend() == b.backend() {
        Ok(())
    } else {
        Err(CoeffError::BackendMismatch(a.backend(), b.backend()))
    }
}

// ----- helpers -----

/// Parses an optionally signed decimal with optional fraction digits and
/// optional integer exponent into an exact rational.  Returns `None` on any
/// malformed input.
fn parse_decimal(s: &str) -> Option<BigRational> {
    let t = s.trim();
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{}{}", int_part, frac_part);
    let numer: BigInt = joined.parse().ok()?;
    let scale = frac_part.len() as i32;
    let ten = BigInt::from(10);
    let total_exp = exp - scale;
    let r = if total_exp >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, total_exp as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-total_exp) as usize))
    };
    Some(if sign < 0 { -r } else { r })
}

/// Exact integer square root, or `IrrationalRoot`.
fn exact_int_sqrt(n: &BigInt) -> Result<BigInt, CoeffError> {
    let s = n.sqrt();
    if &s.clone() * &s == *n {
        Ok(s)
    } else {
        Err(CoeffError::IrrationalRoot(n.to_string()))
    }
}

/// Exact integer q-th root, or `IrrationalRoot`.
fn exact_nth_root(n: &BigInt, q: u32) -> Result<BigInt, CoeffError> {
    let s = n.nth_root(q);
    if num_traits::pow(s.clone(), q as usize) == *n {
        Ok(s)
    } else {
        Err(CoeffError::IrrationalRoot(n.to_string()))
    }
}

/// Converts a `BigInt` to a `BigFloat` exactly (working precision covers the
/// full bit length), then callers round via a final operation at target
/// precision.
fn bigint_to_bigfloat(n: &BigInt, bits: usize) -> BigFloat {
    let (sign, mag) = (n.sign(), n.magnitude());
    if mag.is_zero() {
        return BigFloat::from_i64(0, bits);
    }
    let work = mag.bits() as usize + 64;
    let two64 = BigFloat::from_f64(18446744073709551616.0, work); // 2^64, exact
    let mut acc = BigFloat::from_i64(0, work);
    for limb in mag.to_u64_digits().iter().rev() {
        acc = acc.mul(&two64, work, RM);
        acc = acc.add(&BigFloat::from_u64(*limb, work), work, RM);
    }
    if sign == num_bigint::Sign::Minus {
        acc = acc.neg();
    }
    acc
}

/// Rational -> float conversion with one correctly rounded division.
fn rational_to_float(r: &BigRational, bits: usize) -> Coefficient {
    let n = bigint_to_bigfloat(r.numer(), bits);
    let d = bigint_to_bigfloat(r.denom(), bits);
    Coefficient::Float {
        value: n.div(&d, bits, RM),
        bits,
    }
}

/// Parses a float-backend coefficient directly via the decimal parser of the
/// float library (used for inputs that are not simple fractions).
pub fn parse_float_decimal(s: &str, bits: usize) -> Result<Coefficient, CoeffError> {
    if bits < MIN_FLOAT_PRECISION {
        return Err(CoeffError::PrecisionTooLow(bits));
    }
    let v = CONSTS.with(|cc| BigFloat::parse(s, Radix::Dec, bits, RM, &mut cc.borrow_mut()));
    if v.is_nan() {
        return Err(CoeffError::Parse(s.to_string(), Backend::Float { bits }));
    }
    Ok(Coefficient::Float { value: v, bits })
}
