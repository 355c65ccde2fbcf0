//! Exact scalars: Gaussian rationals, exact roots of unity, and the
//! continued-fraction rounding used to snap fitted coefficients back to
//! exact values.

use crate::error::{Error, Result};
use crate::num::{root_of_unity_cx, Cx, Real};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A Gaussian rational `re + im*i`, both parts in lowest terms.
///
/// `BigRational` keeps denominators positive and fractions reduced, which is
/// exactly the invariant we need.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn zero() -> Self {
        GaussRat {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }
    pub fn one() -> Self {
        GaussRat {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }
    pub fn i() -> Self {
        GaussRat {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }
    pub fn from_int(n: i64) -> Self {
        GaussRat {
            re: BigRational::from_integer(n.into()),
            im: BigRational::zero(),
        }
    }
    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussRat {
            re: BigRational::new(num.into(), den.into()),
            im: BigRational::zero(),
        }
    }
    pub fn from_parts(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }
    pub fn from_real(re: BigRational) -> Self {
        GaussRat {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn conj(&self) -> Self {
        GaussRat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "division by exact zero");
        GaussRat {
            re: &self.re / &n,
            im: -(&self.im / &n),
        }
    }

    pub fn to_cx<T: Real>(&self) -> Cx<T> {
        Cx::new(T::from_rational(&self.re), T::from_rational(&self.im))
    }

    /// Parse `a`, `a/b`, `a/b+c/d*i`, `-3i`, `2-i`, ... (no whitespace
    /// handling beyond trimming; used for slice coordinates and cache files).
    pub fn parse(s: &str) -> Result<GaussRat> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::BadInput("empty exact scalar".into()));
        }
        // Split into at most two signed parts at a '+'/'-' that is not leading.
        let bytes = s.as_bytes();
        let mut split = None;
        for (k, &b) in bytes.iter().enumerate().skip(1) {
            if (b == b'+' || b == b'-') && bytes[k - 1] != b'/' && bytes[k - 1] != b'*' {
                split = Some(k);
            }
        }
        let (first, second) = match split {
            Some(k) => (&s[..k], Some(&s[k..])),
            None => (s, None),
        };
        let mut re = BigRational::zero();
        let mut im = BigRational::zero();
        for part in std::iter::once(first).chain(second) {
            let (target_im, body) = if let Some(stripped) = part
                .strip_suffix('i')
                .map(|p| p.strip_suffix('*').unwrap_or(p))
            {
                (true, stripped)
            } else {
                (false, part)
            };
            let body = if body.is_empty() || body == "+" {
                "1"
            } else if body == "-" {
                "-1"
            } else {
                body
            };
            let rat = parse_rational(body)?;
            if target_im {
                im += rat;
            } else {
                re += rat;
            }
        }
        Ok(GaussRat { re, im })
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::BadInput(format!("bad rational literal `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n.parse().map_err(|_| bad())?;
        let den: BigInt = d.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::BadInput(format!("zero denominator in `{s}`")));
        }
        Ok(BigRational::new(num, den))
    } else {
        let num: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(num))
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}*i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}*i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}
impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}
impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}
impl Div for &GaussRat {
    type Output = GaussRat;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &GaussRat) -> GaussRat {
        self * &o.recip()
    }
}
impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

/// `exp(2*pi*i * num/den)` stored exactly as a reduced fraction of a turn.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    num: u32,
    den: u32,
}

impl RootOfUnity {
    pub fn new(num: u32, den: u32) -> Self {
        assert!(den > 0);
        let num = num % den;
        let g = num.gcd(&den);
        if num == 0 {
            RootOfUnity { num: 0, den: 1 }
        } else {
            RootOfUnity {
                num: num / g,
                den: den / g,
            }
        }
    }
    pub fn one() -> Self {
        RootOfUnity { num: 0, den: 1 }
    }
    pub fn is_one(&self) -> bool {
        self.num == 0
    }
    /// Multiplicative order (the reduced denominator).
    pub fn order(&self) -> u32 {
        self.den
    }
    pub fn numer(&self) -> u32 {
        self.num
    }
    pub fn mul(self, o: Self) -> Self {
        // num/den + num'/den' mod 1
        let den = (self.den as u64 * o.den as u64) as u32;
        let num = self.num as u64 * o.den as u64 + o.num as u64 * self.den as u64;
        RootOfUnity::new((num % den as u64) as u32, den)
    }
    pub fn inv(self) -> Self {
        if self.num == 0 {
            self
        } else {
            RootOfUnity {
                num: self.den - self.num,
                den: self.den,
            }
        }
    }
    pub fn pow(self, e: u32) -> Self {
        let num = (self.num as u64 * e as u64) % self.den as u64;
        RootOfUnity::new(num as u32, self.den)
    }
    pub fn eval<T: Real>(&self) -> Cx<T> {
        root_of_unity_cx(self.num, self.den)
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            write!(f, "1")
        } else {
            write!(f, "zeta({}/{})", self.num, self.den)
        }
    }
}

/// Exact scalar of the form `rat * zeta`: closed under multiplication, which
/// is all the resolvent construction needs.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCoef {
    pub rat: GaussRat,
    pub zeta: RootOfUnity,
}

impl ExactCoef {
    pub fn one() -> Self {
        ExactCoef {
            rat: GaussRat::one(),
            zeta: RootOfUnity::one(),
        }
    }
    pub fn from_rat(rat: GaussRat) -> Self {
        ExactCoef {
            rat,
            zeta: RootOfUnity::one(),
        }
    }
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rat(GaussRat::from_ratio(num, den))
    }
    pub fn with_zeta(rat: GaussRat, zeta: RootOfUnity) -> Self {
        ExactCoef { rat, zeta }
    }
    pub fn is_zero(&self) -> bool {
        self.rat.is_zero()
    }
    pub fn mul(&self, o: &ExactCoef) -> Self {
        ExactCoef {
            rat: &self.rat * &o.rat,
            zeta: self.zeta.mul(o.zeta),
        }
    }
    pub fn eval<T: Real>(&self) -> Cx<T> {
        let z: Cx<T> = self.zeta.eval();
        self.rat.to_cx::<T>() * z
    }
}

impl fmt::Display for ExactCoef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zeta.is_one() {
            write!(f, "{}", self.rat)
        } else if self.rat.is_one() {
            write!(f, "{}", self.zeta)
        } else {
            write!(f, "{}*{}", self.rat, self.zeta)
        }
    }
}

/// First continued-fraction convergent of `x` within `tol`, if its
/// denominator stays small enough to be credible.
pub fn cf_round(x: &BigRational, tol: &BigRational) -> Option<BigRational> {
    if x.abs() <= *tol {
        return Some(BigRational::zero());
    }
    let mut a = x.clone();
    // convergents p/q
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (a.floor().to_integer(), BigInt::one());
    for _ in 0..64 {
        let conv = BigRational::new(p1.clone(), q1.clone());
        if (x - &conv).abs() <= *tol {
            return Some(conv);
        }
        let frac = &a - a.floor();
        if frac.is_zero() {
            return None;
        }
        a = frac.recip();
        let ai = a.floor().to_integer();
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    None
}

/// Round a float (given exactly as a rational) to a Gaussian rational.
pub fn cf_round_cx(re: &BigRational, im: &BigRational, tol: &BigRational) -> Option<GaussRat> {
    Some(GaussRat {
        re: cf_round(re, tol)?,
        im: cf_round(im, tol)?,
    })
}

pub fn f64_to_rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite float")
}

pub fn real_to_rational<T: Real>(v: T) -> BigRational {
    // Exact: every Real here is a sum of at most two floats.
    let hi = v.to_f64();
    let rest = v - T::from_f64(hi);
    let lo = rest.to_f64();
    if lo == 0.0 {
        f64_to_rational(hi)
    } else {
        f64_to_rational(hi) + f64_to_rational(lo)
    }
}

/// Fixed-notation decimal with `sig` significant digits, round-to-nearest.
/// Deterministic, used for report serialization of high-precision values.
pub fn decimal_string(r: &BigRational, sig: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let neg = r.is_negative();
    let a = r.abs();
    // decimal exponent: largest e with 10^e <= a
    let mut e: i64 = 0;
    let ten = BigRational::from_integer(10.into());
    let one = BigRational::one();
    let mut scaled = a.clone();
    if scaled >= one {
        while scaled >= ten {
            scaled /= &ten;
            e += 1;
        }
    } else {
        while scaled < one {
            scaled *= &ten;
            e -= 1;
        }
    }
    // digits = round(a * 10^(sig-1-e))
    let shift = sig as i64 - 1 - e;
    let mut v = a;
    let pow = BigRational::from_integer(BigInt::from(10u8).pow(shift.unsigned_abs() as u32));
    if shift >= 0 {
        v *= &pow;
    } else {
        v /= &pow;
    }
    let half = BigRational::new(1.into(), 2.into());
    let mut digits = (v + half).floor().to_integer();
    let mut e = e;
    let limit = BigInt::from(10u8).pow(sig as u32);
    if digits >= limit {
        digits /= 10;
        e += 1;
    }
    let ds = digits.to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&ds[..1]);
    let tail = ds[1..].trim_end_matches('0');
    if !tail.is_empty() {
        out.push('.');
        out.push_str(tail);
    }
    if e != 0 {
        out.push('e');
        out.push_str(&e.to_string());
    }
    out
}

/// Parse a decimal produced by [`decimal_string`] (also accepts plain
/// integers and `1.5e-3`-style floats) into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::BadInput(format!("bad decimal literal `{s}`"));
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    let neg = int_part.starts_with('-');
    let digits: String = int_part
        .trim_start_matches(['-', '+'])
        .chars()
        .chain(frac_part.chars())
        .collect();
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let num = if neg { -num } else { num };
    let shift = exp - frac_part.len() as i64;
    let pow = BigInt::from(10u8).pow(shift.unsigned_abs() as u32);
    Ok(if shift >= 0 {
        BigRational::from_integer(num * pow)
    } else {
        BigRational::new(num, pow)
    })
}

pub fn sign_of(r: &BigRational) -> Sign {
    r.numer().sign()
}
