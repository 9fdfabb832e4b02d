//! Coefficient domains for [`MultiPoly`](super::MultiPoly).
//!
//! Two domains exist: exact rationals (big integers, never overflow) and
//! double-precision complex floats. Conversion goes one way only, exact to
//! floating, through [`Coeff::to_c64`].

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational coefficient.
pub type Rational = num_rational::BigRational;

/// Which coefficient domain a polynomial lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    ExactRational,
    ComplexFloating,
}

pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const DOMAIN: Domain;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact for rationals (binary expansion); panics on non-finite input.
    fn from_f64(v: f64) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn to_c64(&self) -> Complex64;

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Coeff for Rational {
    const DOMAIN: Domain = Domain::ExactRational;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).expect("finite float")
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
}

impl Coeff for Complex64 {
    const DOMAIN: Domain = Domain::ComplexFloating;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "finite float");
        Complex64::new(v, 0.0)
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

/// Correctly handles numerators and denominators far outside the f64 range
/// as long as their quotient is representable.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let shift = r.numer().bits() as i64 - r.denom().bits() as i64;
    // scale into a range where both parts fit, then undo the scaling
    let scaled = if shift > 0 {
        r / Rational::from_integer(BigInt::one() << (shift as usize))
    } else {
        r * Rational::from_integer(BigInt::one() << ((-shift) as usize))
    };
    let n = scaled.numer().to_f64().unwrap_or(f64::NAN);
    let d = scaled.denom().to_f64().unwrap_or(f64::NAN);
    (n / d) * 2f64.powi(shift as i32)
}

/// Exact rational from a finite f64 (binary expansion, no rounding).
pub fn rational_from_f64(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_rational_converts() {
        let big = Rational::new(BigInt::from(3) << 2000usize, BigInt::from(2) << 2000usize);
        assert_eq!(rational_to_f64(&big), 1.5);
    }

    #[test]
    fn pow_by_squaring() {
        assert_eq!(Rational::from_i64(3).pow(5), Rational::from_i64(243));
        assert_eq!(Complex64::new(0.0, 1.0).pow(2), Complex64::new(-1.0, 0.0));
    }
}
