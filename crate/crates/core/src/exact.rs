//! Exact comparisons against square roots of rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type Rational = BigRational;

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: u64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `x <= sqrt(r)` for `r >= 0`, decided without rounding.
pub fn le_sqrt(x: &Rational, r: &Rational) -> bool {
    debug_assert!(!r.is_negative());
    !x.is_positive() || x * x <= *r
}

/// `x <= c + sqrt(r)`.
pub fn le_plus_sqrt(x: &Rational, c: &Rational, r: &Rational) -> bool {
    le_sqrt(&(x - c), r)
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| crate::magnitude::Magnitude::from_ratio(r).to_f64())
}

pub fn is_zero_or_positive(r: &Rational) -> bool {
    r.is_zero() || r.is_positive()
}
