//! Numeric scalars that symbolic expressions can be evaluated over.

use std::fmt::Debug;
use std::ops::{Div, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};

use crate::dd::DoubleDouble;
use crate::{Exponent, Rational};

/// Working-precision number type for [`crate::expr::eval_numeric`].
///
/// Implemented for `f32`, `f64`, [`DoubleDouble`] and `Complex<f64>`.
pub trait Scalar:
    Copy + Debug + Zero + One + Neg<Output = Self> + Sub<Output = Self> + Div<Output = Self> + Send + Sync + 'static
{
    const NAME: &'static str;

    fn from_rational(c: &Rational) -> Self;
    fn from_f64(x: f64) -> Self;
    /// `Some(i)` for complex scalars.
    fn imag_unit() -> Option<Self>;
    fn powi(self, n: i32) -> Self;
    /// Rational power; negative real radicands take the real root for odd
    /// denominators and are a domain error for even ones.
    fn pow_rational(self, e: Exponent) -> Result<Self, String>;
    fn tanh(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn exp(self) -> Self;
    fn sech(self) -> Self {
        Self::one() / self.cosh()
    }
    /// Absolute value (modulus for complex).
    fn magnitude(self) -> f64;
    /// Real part as `f64`.
    fn real_f64(self) -> f64;
    fn is_finite(self) -> bool {
        self.magnitude().is_finite()
    }
}

fn real_pow<T: num_traits::Float>(x: T, e: Exponent) -> Result<T, String> {
    let p = *e.numer();
    let q = *e.denom();
    if q == 1 {
        return Ok(x.powi(p as i32));
    }
    if x < T::zero() {
        if q % 2 == 0 {
            return Err(format!("even root of negative number {:?}", x.to_f64()));
        }
        let mag = (-x).powf(T::from(p).unwrap() / T::from(q).unwrap());
        return Ok(if p % 2 == 0 { mag } else { -mag });
    }
    if x.is_zero() && p < 0 {
        return Err("zero to a negative power".into());
    }
    if q == 2 {
        return Ok(x.sqrt().powi(p as i32));
    }
    if q == 3 {
        return Ok(x.cbrt().powi(p as i32));
    }
    Ok(x.powf(T::from(p).unwrap() / T::from(q).unwrap()))
}

macro_rules! float_scalar {
    ($t:ty, $name:expr) => {
        impl Scalar for $t {
            const NAME: &'static str = $name;
            fn from_rational(c: &Rational) -> Self {
                c.to_f64().unwrap_or(f64::NAN) as $t
            }
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            fn imag_unit() -> Option<Self> {
                None
            }
            fn powi(self, n: i32) -> Self {
                <$t>::powi(self, n)
            }
            fn pow_rational(self, e: Exponent) -> Result<Self, String> {
                real_pow(self, e)
            }
            fn tanh(self) -> Self {
                <$t>::tanh(self)
            }
            fn sinh(self) -> Self {
                <$t>::sinh(self)
            }
            fn cosh(self) -> Self {
                <$t>::cosh(self)
            }
            fn exp(self) -> Self {
                <$t>::exp(self)
            }
            fn magnitude(self) -> f64 {
                <$t>::abs(self) as f64
            }
            fn real_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

float_scalar!(f32, "f32");
float_scalar!(f64, "f64");

impl Scalar for DoubleDouble {
    const NAME: &'static str = "double-double";
    fn from_rational(c: &Rational) -> Self {
        DoubleDouble::from_rational(c)
    }
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    fn imag_unit() -> Option<Self> {
        None
    }
    fn powi(self, n: i32) -> Self {
        DoubleDouble::powi(self, n)
    }
    fn pow_rational(self, e: Exponent) -> Result<Self, String> {
        let p = *e.numer();
        let q = *e.denom();
        if q == 1 {
            return Ok(self.powi(p as i32));
        }
        let neg = self.hi < 0.0;
        if neg && q % 2 == 0 {
            return Err(format!("even root of negative number {}", self.to_f64()));
        }
        if self.is_zero() {
            return if p > 0 { Ok(Self::zero()) } else { Err("zero to a negative power".into()) };
        }
        let a = self.abs();
        let mag = if q == 2 {
            a.sqrt().powi(p as i32)
        } else {
            (a.ln() * DoubleDouble::from_f64(p as f64) / DoubleDouble::from_f64(q as f64)).exp()
        };
        Ok(if neg && p % 2 != 0 { -mag } else { mag })
    }
    fn tanh(self) -> Self {
        DoubleDouble::tanh(self)
    }
    fn sinh(self) -> Self {
        DoubleDouble::sinh(self)
    }
    fn cosh(self) -> Self {
        DoubleDouble::cosh(self)
    }
    fn exp(self) -> Self {
        DoubleDouble::exp(self)
    }
    fn magnitude(self) -> f64 {
        self.abs().to_f64()
    }
    fn real_f64(self) -> f64 {
        self.to_f64()
    }
}

impl Scalar for Complex<f64> {
    const NAME: &'static str = "complex";
    fn from_rational(c: &Rational) -> Self {
        Complex::new(c.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex::new(x, 0.0)
    }
    fn imag_unit() -> Option<Self> {
        Some(Complex::i())
    }
    fn powi(self, n: i32) -> Self {
        Complex::powi(&self, n)
    }
    fn pow_rational(self, e: Exponent) -> Result<Self, String> {
        let p = *e.numer();
        let q = *e.denom();
        if q == 1 {
            return Ok(self.powi(p as i32));
        }
        if self.im == 0.0 && (self.re >= 0.0 || q % 2 == 1) {
            return real_pow(self.re, e).map(Complex::from);
        }
        Ok(self.powf(p as f64 / q as f64))
    }
    fn tanh(self) -> Self {
        Complex::tanh(self)
    }
    fn sinh(self) -> Self {
        Complex::sinh(self)
    }
    fn cosh(self) -> Self {
        Complex::cosh(self)
    }
    fn exp(self) -> Self {
        Complex::exp(self)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn real_f64(self) -> f64 {
        self.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_cube_root_of_negative() {
        let r = (-8.0f64).pow_rational(Exponent::new(1, 3)).unwrap();
        assert!((r + 2.0).abs() < 1e-15);
        let r = (-8.0f64).pow_rational(Exponent::new(-1, 3)).unwrap();
        assert!((r + 0.5).abs() < 1e-15);
        let r = DoubleDouble::from_f64(-8.0).pow_rational(Exponent::new(2, 3)).unwrap();
        assert!((r.to_f64() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn even_root_of_negative_is_domain_error() {
        assert!((-1.0f64).pow_rational(Exponent::new(1, 2)).is_err());
        assert!(DoubleDouble::from_f64(-1.0).pow_rational(Exponent::new(1, 2)).is_err());
    }

    #[test]
    fn complex_square_root_of_negative() {
        let r = Complex::new(-4.0, 0.0).pow_rational(Exponent::new(1, 2)).unwrap();
        assert!((r - Complex::new(0.0, 2.0)).norm() < 1e-15);
    }
}
