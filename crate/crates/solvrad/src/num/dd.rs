//! Double-double arithmetic: an unevaluated sum of two `f64`s giving a
//! ~106-bit mantissa. The error-free transformations are the classic
//! Dekker/Knuth ones; `two_prod` leans on the fused multiply-add.

use super::Real;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    fn renorm(hi: f64, lo: f64) -> Self {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        let hi = r.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return Dd::new(hi, 0.0);
        }
        let rem = r - BigRational::from_float(hi).expect("finite");
        let lo = rem.to_f64().unwrap_or(0.0);
        Dd::renorm(hi, lo)
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::default();
        }
        debug_assert!(self.hi > 0.0, "sqrt of negative double-double");
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let s = Dd::from(ax);
        let e = (self - s * s).hi * (x * 0.5);
        Dd::renorm(ax, e)
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s2, e2) = quick_two_sum(s, e + t);
        Dd::renorm(s2, e2 + f)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::renorm(p, e + self.hi * o.lo + self.lo * o.hi)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from(q1);
        let q2 = r.hi / o.hi;
        let r2 = r - o * Dd::from(q2);
        let q3 = r2.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::renorm(s, e + q3)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, o: &Dd) -> Option<std::cmp::Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(std::cmp::Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            other => other,
        }
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.hi.is_finite() {
            return write!(f, "{}", self.hi);
        }
        let r = BigRational::from_float(self.hi).unwrap()
            + BigRational::from_float(self.lo).unwrap_or_else(|| BigRational::from_float(0.0).unwrap());
        write!(f, "{}", crate::exact::decimal_string(&r, 34))
    }
}

impl Real for Dd {
    const MANTISSA_BITS: u32 = 106;

    fn zero() -> Self {
        Dd::default()
    }
    fn one() -> Self {
        Dd::from(1.0)
    }
    fn from_f64(v: f64) -> Self {
        Dd::from(v)
    }
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn from_rational(r: &BigRational) -> Self {
        Dd::from_rational(r)
    }
    fn abs(self) -> Self {
        Dd::abs(self)
    }
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    fn eps() -> Self {
        Dd::from(4.93e-32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn add_keeps_extra_digits() {
        let a = Dd::from(1.0);
        let tiny = Dd::from(1e-25);
        let s = a + tiny;
        assert_eq!((s - a).to_f64(), 1e-25);
    }

    #[test]
    fn sqrt_newton() {
        let two = Dd::from(2.0);
        let s = two.sqrt();
        let err = (s * s - two).abs();
        assert!(err.to_f64() < 1e-31);
    }

    #[test]
    fn division() {
        let a = Dd::from(1.0) / Dd::from(7.0);
        let b = a * Dd::from(7.0) - Dd::from(1.0);
        assert!(b.abs().to_f64() < 1e-31);
    }

    #[test]
    fn rational_round_trip() {
        let r = BigRational::new(1.into(), 3.into());
        let d = Dd::from_rational(&r);
        let back = BigRational::from_float(d.hi).unwrap() + BigRational::from_float(d.lo).unwrap();
        let err = (&r - &back).abs();
        let bound = BigRational::new(1.into(), num_bigint::BigInt::from(10u8).pow(31));
        assert!(err < bound);
    }
}
