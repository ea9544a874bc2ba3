//! Positive reals with an unbounded binary exponent.
//!
//! Planner quantities such as `sqrt(q/2)` for `q = 2^340` exceed the `f64`
//! range in intermediate steps. A [`Magnitude`] keeps `mantissa * 2^exp2`
//! with a normalized mantissa in `[1, 2)`, so products of powers of two stay
//! exact and half-integer exponents arise only from square roots.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Magnitude {
    mantissa: f64,
    exp2: f64,
}

impl Magnitude {
    pub const ZERO: Magnitude = Magnitude { mantissa: 0.0, exp2: 0.0 };
    pub const ONE: Magnitude = Magnitude { mantissa: 1.0, exp2: 0.0 };

    /// `mantissa * 2^exp2` for any non-negative finite mantissa.
    pub fn new(mantissa: f64, exp2: f64) -> Self {
        assert!(mantissa >= 0.0 && mantissa.is_finite(), "magnitude must be finite and non-negative");
        if mantissa == 0.0 {
            return Self::ZERO;
        }
        // Exact renormalization into [1, 2).
        let bits = mantissa.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let (m, e) = if raw_exp == 0 {
            // subnormal: scale up by 2^64 first
            let scaled = mantissa * f64::from_bits(0x43f0_0000_0000_0000);
            let b = scaled.to_bits();
            let re = ((b >> 52) & 0x7ff) as i64;
            (f64::from_bits((b & !(0x7ff << 52)) | (1023 << 52)), re - 1023 - 64)
        } else {
            (f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52)), raw_exp - 1023)
        };
        Self { mantissa: m, exp2: exp2 + e as f64 }
    }

    pub fn from_f64(x: f64) -> Self {
        Self::new(x, 0.0)
    }

    /// `2^e`.
    pub fn pow2(e: f64) -> Self {
        Self { mantissa: 1.0, exp2: e }
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        let bits = n.bits();
        if bits <= 64 {
            return Self::from_f64(n.to_f64().unwrap_or(0.0));
        }
        let shift = bits - 64;
        let top = (n >> shift).to_u64().expect("64 leading bits");
        Self::new(top as f64, shift as f64)
    }

    /// Magnitude of a non-negative rational.
    pub fn from_ratio(r: &BigRational) -> Self {
        assert!(!r.is_negative(), "magnitude of a negative rational");
        if r.is_zero() {
            return Self::ZERO;
        }
        let num = Self::from_biguint(&r.numer().magnitude().clone());
        let den = Self::from_biguint(&r.denom().magnitude().clone());
        num / den
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exp2(&self) -> f64 {
        self.exp2
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn sqrt(self) -> Self {
        if self.is_zero() {
            return self;
        }
        // Halving the exponent keeps exact powers of two exact.
        Self::new(self.mantissa.sqrt(), self.exp2 / 2.0)
    }

    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp2 >= other.exp2 { (self, other) } else { (other, self) };
        let shifted = lo.mantissa * (lo.exp2 - hi.exp2).exp2();
        Self::new(hi.mantissa + shifted, hi.exp2)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.mantissa * k, self.exp2)
    }

    pub fn log2(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.log2() + self.exp2
        }
    }

    pub fn log10(&self) -> f64 {
        self.log2() * std::f64::consts::LOG10_2
    }

    /// Nearest `f64`; saturates to `0` or `inf` outside the double range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let whole = self.exp2.floor();
        let frac = self.exp2 - whole;
        let mut v = self.mantissa * frac.exp2();
        // apply 2^whole in range-safe steps
        let mut rest = whole;
        while rest != 0.0 {
            let step = rest.clamp(-1000.0, 1000.0);
            v *= step.exp2();
            rest -= step;
            if v == 0.0 || v.is_infinite() {
                break;
            }
        }
        v
    }
}

impl Mul for Magnitude {
    type Output = Magnitude;
    fn mul(self, rhs: Magnitude) -> Magnitude {
        Magnitude::new(self.mantissa * rhs.mantissa, self.exp2 + rhs.exp2)
    }
}

impl Div for Magnitude {
    type Output = Magnitude;
    fn div(self, rhs: Magnitude) -> Magnitude {
        assert!(!rhs.is_zero(), "division by a zero magnitude");
        Magnitude::new(self.mantissa / rhs.mantissa, self.exp2 - rhs.exp2)
    }
}

impl PartialOrd for Magnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            _ => self.log2().partial_cmp(&other.log2()),
        }
    }
}

impl fmt::Display for Magnitude {
    /// Scientific notation with three significant digits, e.g. `3.11e12`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let l = self.log10();
        let mut e = l.floor();
        let mut m = 10f64.powf(l - e);
        if (m * 100.0).round() >= 1000.0 {
            m /= 10.0;
            e += 1.0;
        }
        write!(f, "{:.2}e{}", m, e as i64)
    }
}
