//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! giving roughly 106 bits of significand.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

use crate::Rational;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const LN2: DoubleDouble = DoubleDouble { hi: 6.931471805599452862e-01, lo: 2.319046813846299558e-17 };

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn from_rational(c: &Rational) -> Self {
        let hi = c.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return Self::from_f64(hi);
        }
        let rem = c - Rational::from_float(hi).unwrap_or_else(Rational::zero);
        let lo = rem.to_f64().unwrap_or(0.0);
        let (h, l) = quick_two_sum(hi, lo);
        DoubleDouble { hi: h, lo: l }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (h, l) = quick_two_sum(p, e);
        DoubleDouble { hi: h, lo: l }
    }

    fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        DoubleDouble { hi: self.hi * f, lo: self.lo * f }
    }

    pub fn recip(self) -> Self {
        DoubleDouble::one() / self
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Self::zero() } else { Self::from_f64(f64::NAN) };
        }
        let y = Self::from_f64(self.hi.sqrt());
        // one Newton step doubles the precision
        y + (self - y * y) / y.mul_f64(2.0)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::zero();
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2.mul_f64(k);
        // r in [-ln2/2, ln2/2]; scale down further and square back up
        let r = r.ldexp(-10);
        // expm1 by Taylor, then s -> 2s + s^2 undoes the scaling without
        // losing the low word to the leading 1
        let mut term = r;
        let mut s = r;
        for n in 2..=24 {
            term = term * r / Self::from_f64(n as f64);
            s = s + term;
            if term.hi.abs() < 1e-36 * s.hi.abs() {
                break;
            }
        }
        for _ in 0..10 {
            s = s.mul_f64(2.0) + s * s;
        }
        let sum = Self::one() + s;
        sum.ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(f64::NAN);
        }
        let mut y = Self::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Self::one();
        }
        y
    }

    pub fn sinh(self) -> Self {
        if self.hi.abs() < 0.5 {
            let x2 = self * self;
            let mut term = self;
            let mut sum = self;
            for n in 1..=30 {
                let d = ((2 * n) * (2 * n + 1)) as f64;
                term = term * x2 / Self::from_f64(d);
                sum = sum + term;
                if term.hi.abs() < 1e-36 * sum.hi.abs() {
                    break;
                }
            }
            sum
        } else {
            let e = self.exp();
            (e - e.recip()).ldexp(-1)
        }
    }

    pub fn cosh(self) -> Self {
        let e = self.abs().exp();
        (e + e.recip()).ldexp(-1)
    }

    pub fn tanh(self) -> Self {
        if self.hi.abs() > 40.0 {
            let e = (-(self.abs().ldexp(1))).exp();
            let t = (Self::one() - e) / (Self::one() + e);
            return if self.hi < 0.0 { -t } else { t };
        }
        self.sinh() / self.cosh()
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (h, l) = quick_two_sum(s1, s2);
        DoubleDouble { hi: h, lo: l }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (h, l) = quick_two_sum(p, e);
        DoubleDouble { hi: h, lo: l }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (h, l) = quick_two_sum(q1, q2);
        DoubleDouble { hi: h, lo: l } + Self::from_f64(q3)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble { hi: 0.0, lo: 0.0 }
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble { hi: 1.0, lo: 0.0 }
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: DoubleDouble, b: DoubleDouble, tol: f64) -> bool {
        let d = (a - b).abs().to_f64();
        d <= tol * (1.0 + b.abs().to_f64())
    }

    #[test]
    fn third_times_three_is_one() {
        let third = DoubleDouble::one() / DoubleDouble::from_f64(3.0);
        let back = third * DoubleDouble::from_f64(3.0);
        assert!(close(back, DoubleDouble::one(), 1e-31));
    }

    #[test]
    fn sqrt_two_squared() {
        let s = DoubleDouble::from_f64(2.0).sqrt();
        assert!(close(s * s, DoubleDouble::from_f64(2.0), 1e-31));
    }

    #[test]
    fn exp_ln_round_trip() {
        for &x in &[0.1, 1.0, 2.5, -3.75, 20.0] {
            let v = DoubleDouble::from_f64(x);
            assert!(close(v.exp().ln(), v, 1e-30), "x = {x}");
        }
    }

    #[test]
    fn exp_one_matches_e() {
        // e = 2.718281828459045235360287471352662497757...
        let e = DoubleDouble::one().exp();
        let reference = DoubleDouble::new(2.718281828459045, 1.4456468917292502e-16);
        assert!(close(e, reference, 1e-31));
    }

    #[test]
    fn hyperbolic_identity() {
        for &x in &[0.01, 0.3, 0.7, 2.0, -5.0] {
            let v = DoubleDouble::from_f64(x);
            let c = v.cosh();
            let s = v.sinh();
            let scale = (c * c).to_f64();
            assert!(close(c * c - s * s, DoubleDouble::one(), 1e-30 * scale), "x = {x}");
            assert!(close(v.tanh(), s / c, 1e-31));
        }
    }

    #[test]
    fn rational_conversion_keeps_low_word() {
        let c = Rational::new(1.into(), 10.into());
        let d = DoubleDouble::from_rational(&c);
        assert!(d.lo != 0.0);
        let back = d * DoubleDouble::from_f64(10.0);
        assert!(close(back, DoubleDouble::one(), 1e-31));
    }
}
