//! Floating substrate for the tracking pipeline.
//!
//! Everything numeric downstream of the exact layer is generic over [`Real`],
//! so the whole pipeline can run at 53-bit (`f64`) or ~106-bit ([`Dd`])
//! precision without duplicated code. Complex arithmetic lives in [`Cx`].

mod dd;

pub use dd::Dd;

use num_rational::BigRational;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A real scalar the tracking pipeline can run on.
pub trait Real:
    Copy
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Mantissa width, used to label reports and pick tolerances.
    const MANTISSA_BITS: u32;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    /// Best approximation of an exact rational in this precision.
    fn from_rational(r: &BigRational) -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    /// Unit roundoff of the representation.
    fn eps() -> Self;

    fn max_of(self, o: Self) -> Self {
        if self > o {
            self
        } else {
            o
        }
    }
    fn min_of(self, o: Self) -> Self {
        if self < o {
            self
        } else {
            o
        }
    }
}

impl Real for f64 {
    const MANTISSA_BITS: u32 = 53;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn from_rational(r: &BigRational) -> Self {
        num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn eps() -> Self {
        f64::EPSILON
    }
}

/// Complex number over any [`Real`].
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Cx<T> {
    pub re: T,
    pub im: T,
}

pub type Cx64 = Cx<f64>;

impl<T: Real> Cx<T> {
    pub fn new(re: T, im: T) -> Self {
        Cx { re, im }
    }
    pub fn zero() -> Self {
        Cx::new(T::zero(), T::zero())
    }
    pub fn one() -> Self {
        Cx::new(T::one(), T::zero())
    }
    pub fn i() -> Self {
        Cx::new(T::zero(), T::one())
    }
    pub fn from_f64s(re: f64, im: f64) -> Self {
        Cx::new(T::from_f64(re), T::from_f64(im))
    }
    pub fn from_c64(z: Cx64) -> Self {
        Self::from_f64s(z.re, z.im)
    }
    pub fn to_c64(self) -> Cx64 {
        Cx::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_sqr(self) -> T {
        self.re * self.re + self.im * self.im
    }
    pub fn abs(self) -> T {
        self.norm_sqr().sqrt()
    }
    pub fn conj(self) -> Self {
        Cx::new(self.re, -self.im)
    }
    pub fn scale(self, k: T) -> Self {
        Cx::new(self.re * k, self.im * k)
    }
    pub fn recip(self) -> Self {
        let n = self.norm_sqr();
        Cx::new(self.re / n, -self.im / n)
    }
    pub fn is_zero(self) -> bool {
        self.re == T::zero() && self.im == T::zero()
    }
    /// Argument computed at f64 accuracy; only used for geometry decisions.
    pub fn arg_f64(self) -> f64 {
        self.im.to_f64().atan2(self.re.to_f64())
    }
    pub fn powu(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = Cx::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
    /// Distance at f64 accuracy; used for step-size and matching decisions.
    pub fn dist_f64(self, o: Self) -> f64 {
        (self - o).to_c64().abs()
    }
}

impl Cx64 {
    pub fn from_polar(r: f64, theta: f64) -> Cx64 {
        Cx::new(r * theta.cos(), r * theta.sin())
    }
}

impl<T: Real> Add for Cx<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Cx::new(self.re + o.re, self.im + o.im)
    }
}
impl<T: Real> Sub for Cx<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Cx::new(self.re - o.re, self.im - o.im)
    }
}
impl<T: Real> Mul for Cx<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Cx::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}
impl<T: Real> Div for Cx<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}
impl<T: Real> Neg for Cx<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Cx::new(-self.re, -self.im)
    }
}

/// Principal k-th root at f64 accuracy, then polished by Newton in `T`.
///
/// `near` selects the branch: among the k roots of `c`, the one closest to
/// `near` is returned. Returns `None` when `c` is numerically zero.
pub fn kth_root_near<T: Real>(c: Cx<T>, k: u32, near: Cx<T>) -> Option<Cx<T>> {
    let c64 = c.to_c64();
    let r = c64.abs();
    if !(r > 0.0) {
        return None;
    }
    let theta = c64.arg_f64();
    let rk = r.powf(1.0 / k as f64);
    let near64 = near.to_c64();
    let mut best = Cx64::zero();
    let mut best_d = f64::INFINITY;
    for j in 0..k {
        let cand = Cx64::from_polar(rk, (theta + 2.0 * std::f64::consts::PI * j as f64) / k as f64);
        let d = cand.dist_f64(near64);
        if d < best_d {
            best_d = d;
            best = cand;
        }
    }
    let mut w = Cx::<T>::from_c64(best);
    // Newton on w^k - c doubles the correct digits per step.
    let kk = Cx::new(T::from_f64(k as f64), T::zero());
    for _ in 0..3 {
        let wk1 = w.powu(k - 1);
        let f = wk1 * w - c;
        w = w - f / (kk * wk1);
    }
    Some(w)
}

/// `exp(2*pi*i*num/den)` in precision `T`, exact on the quarter points.
pub fn root_of_unity_cx<T: Real>(num: u32, den: u32) -> Cx<T> {
    debug_assert!(den > 0 && num < den);
    let one = T::one();
    let zero = T::zero();
    match (4 * num, den) {
        (0, _) => return Cx::new(one, zero),
        (n, d) if n == d => return Cx::new(zero, one),
        (n, d) if n == 2 * d => return Cx::new(-one, zero),
        (n, d) if n == 3 * d => return Cx::new(zero, -one),
        _ => {}
    }
    let theta = 2.0 * std::f64::consts::PI * (num as f64) / (den as f64);
    let mut z = Cx::<T>::from_f64s(theta.cos(), theta.sin());
    if T::MANTISSA_BITS > 53 {
        // Polish z^den = 1 keeping the branch fixed by the f64 seed.
        let dd = Cx::new(T::from_f64(den as f64), T::zero());
        for _ in 0..3 {
            let zk1 = z.powu(den - 1);
            let f = zk1 * z - Cx::one();
            z = z - f / (dd * zk1);
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_round_trip_and_precision() {
        let a = Dd::from_f64(1.0) / Dd::from_f64(3.0);
        let b = a * Dd::from_f64(3.0) - Dd::from_f64(1.0);
        assert!(b.abs().to_f64() < 1e-31);
    }

    #[test]
    fn cx_division() {
        let a = Cx::<f64>::new(1.0, 2.0);
        let b = Cx::<f64>::new(-3.0, 0.5);
        let q = a / b;
        let back = q * b;
        assert!((back - a).abs() < 1e-14);
    }

    #[test]
    fn kth_root_picks_branch() {
        let c = Cx::<f64>::new(-1.0, 0.0);
        // cube roots of -1: -1, 1/2 ± i*sqrt(3)/2
        let w = kth_root_near(c, 3, Cx::new(-0.9, 0.1)).unwrap();
        assert!((w - Cx::new(-1.0, 0.0)).abs() < 1e-12);
        let w2 = kth_root_near(c, 3, Cx::new(0.4, 0.9)).unwrap();
        assert!((w2 - Cx::new(0.5, 0.75f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn roots_of_unity_quarter_points_exact() {
        let z = root_of_unity_cx::<f64>(1, 4);
        assert_eq!(z, Cx::new(0.0, 1.0));
        let z = root_of_unity_cx::<f64>(1, 2);
        assert_eq!(z, Cx::new(-1.0, 0.0));
    }

    #[test]
    fn roots_of_unity_dd_accuracy() {
        let z = root_of_unity_cx::<Dd>(1, 3);
        let z3 = z.powu(3);
        assert!((z3 - Cx::one()).abs().to_f64() < 1e-30);
    }
}
