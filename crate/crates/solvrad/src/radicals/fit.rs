//! Rational-function recovery from grid samples: homogeneous interpolation
//! solved by complex Householder QR, held-out validation, and
//! continued-fraction rounding back to exact coefficients.

use crate::config::Tols;
use crate::error::{Error, Result};
use crate::exact::{cf_round_cx, real_to_rational, GaussRat};
use crate::num::{Cx, Real};
use crate::polyalg::UniPoly;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::fmt;

use super::expr::CxPair;

/// Exact rational function of the slice parameter, canonicalized with a
/// monic, gcd-reduced denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFn {
    pub num: UniPoly,
    pub den: UniPoly,
}

impl RatFn {
    pub fn from_poly(num: UniPoly) -> RatFn {
        RatFn {
            num,
            den: UniPoly::one(),
        }
    }
    pub fn zero() -> RatFn {
        RatFn::from_poly(UniPoly::zero())
    }
    pub fn parameter() -> RatFn {
        RatFn::from_poly(UniPoly::t())
    }

    pub fn canonicalize(&self) -> RatFn {
        if self.num.is_zero() {
            return RatFn::zero();
        }
        let g = self.num.gcd(&self.den);
        let (num, den) = if g.degree() > 0 {
            (self.num.div_rem(&g).0, self.den.div_rem(&g).0)
        } else {
            (self.num.clone(), self.den.clone())
        };
        let lead = den.leading().expect("nonzero denominator").clone();
        RatFn {
            num: num.scale(&lead.recip()),
            den: den.scale(&lead.recip()),
        }
    }

    pub fn eval<T: Real>(&self, t: Cx<T>) -> Cx<T> {
        let n = eval_unipoly(&self.num, t);
        let d = eval_unipoly(&self.den, t);
        n / d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

fn eval_unipoly<T: Real>(p: &UniPoly, t: Cx<T>) -> Cx<T> {
    let mut acc = Cx::<T>::zero();
    for c in p.coeffs().iter().rev() {
        acc = acc * t + c.to_cx::<T>();
    }
    acc
}

fn fmt_poly_t(p: &UniPoly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    let mut first = true;
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "t".into(),
            _ => format!("t^{k}"),
        };
        let cs = if c.is_one() && k > 0 {
            String::new()
        } else {
            format!("({c})")
        };
        let sep = if cs.is_empty() || mono.is_empty() { "" } else { "*" };
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "{cs}{sep}{mono}")?;
        first = false;
    }
    Ok(())
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den_is_one = self.den.degree() == 0
            && self.den.coeffs().first().map(|c| c.is_one()) == Some(true);
        if den_is_one {
            fmt_poly_t(&self.num, f)
        } else {
            write!(f, "(")?;
            fmt_poly_t(&self.num, f)?;
            write!(f, ") / (")?;
            fmt_poly_t(&self.den, f)?;
            write!(f, ")")
        }
    }
}

/// Rational function as recovered by the fit: exact when coefficient
/// rounding succeeded and validated, floating (and flagged) otherwise.
#[derive(Clone, Debug)]
pub enum RatRep {
    Exact(RatFn),
    /// Ascending coefficients in `t`, kept at working precision.
    Float { num: Vec<CxPair>, den: Vec<CxPair> },
}

impl RatRep {
    pub fn eval<T: Real>(&self, t: Cx<T>) -> Cx<T> {
        match self {
            RatRep::Exact(r) => r.eval(t),
            RatRep::Float { num, den } => {
                let ev = |coeffs: &[CxPair]| {
                    let mut acc = Cx::<T>::zero();
                    for c in coeffs.iter().rev() {
                        acc = acc * t + c.to_cx::<T>();
                    }
                    acc
                };
                ev(num) / ev(den)
            }
        }
    }
    pub fn is_exact(&self) -> bool {
        matches!(self, RatRep::Exact(_))
    }
    pub fn degrees(&self) -> (usize, usize) {
        match self {
            RatRep::Exact(r) => (r.num.degree(), r.den.degree()),
            RatRep::Float { num, den } => {
                (num.len().saturating_sub(1), den.len().saturating_sub(1))
            }
        }
    }
}

impl fmt::Display for RatRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatRep::Exact(r) => write!(f, "{r}"),
            RatRep::Float { num, den } => {
                let fmt_coeffs = |v: &[CxPair]| -> String {
                    v.iter()
                        .map(|c| {
                            let z = c.to_c64();
                            format!("{:+.6e}{:+.6e}i", z.re, z.im)
                        })
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                write!(f, "float[num=[{}], den=[{}]]", fmt_coeffs(num), fmt_coeffs(den))
            }
        }
    }
}

/// Result of a successful rational fit.
#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub rep: RatRep,
    pub num_degree: usize,
    pub den_degree: usize,
    /// Max relative residual over the held-out samples.
    pub holdout_residual: f64,
}

/// Fit a rational function to values on the sample circle.
///
/// `ws` are the scaled coordinates `t/R` (well conditioned on the unit
/// circle), `vs` the values there. Degrees `(p, q)` are searched by
/// increasing total degree up to `cap`; each candidate is solved on a spread
/// subset and must survive validation on at least `p+q+4` held-out samples.
pub fn fit_rational<T: Real>(
    ws: &[Cx<T>],
    vs: &[Cx<T>],
    radius: i64,
    cap: usize,
    tols: &Tols,
) -> Result<FitOutcome> {
    let s = ws.len();
    assert_eq!(s, vs.len());
    for d in 0..=cap {
        if s < 2 * d + 6 {
            break; // not enough samples to both fit and validate
        }
        for q in 0..=d {
            let p = d - q;
            if let Some(out) = try_fit(ws, vs, radius, p, q, tols) {
                return Ok(out);
            }
        }
    }
    Err(Error::NoFit { cap })
}

fn try_fit<T: Real>(
    ws: &[Cx<T>],
    vs: &[Cx<T>],
    radius: i64,
    p: usize,
    q: usize,
    tols: &Tols,
) -> Option<FitOutcome> {
    let s = ws.len();
    let k = p + q + 2;
    // spread fit-sample indices over the circle
    let fit_idx: Vec<usize> = (0..k).map(|j| j * s / k).collect();
    let mut matrix = Vec::with_capacity(k);
    for &i in &fit_idx {
        let mut row = Vec::with_capacity(k);
        let mut wp = Cx::<T>::one();
        for _ in 0..=p {
            row.push(wp);
            wp = wp * ws[i];
        }
        let mut wq = Cx::<T>::one();
        for _ in 0..=q {
            row.push(-(vs[i] * wq));
            wq = wq * ws[i];
        }
        let scale = row
            .iter()
            .map(|z| z.to_c64().abs())
            .fold(f64::MIN_POSITIVE, f64::max);
        let inv = T::from_f64(1.0 / scale);
        for z in row.iter_mut() {
            *z = z.scale(inv);
        }
        matrix.push(row);
    }
    let null = qr_null_vector(matrix)?;
    let (num_w, den_w) = (&null[..=p], &null[p + 1..]);
    // validate on every sample
    let residual = |num_c: &[Cx<T>], den_c: &[Cx<T>]| -> f64 {
        let mut worst = 0.0f64;
        for (i, (&w, &v)) in ws.iter().zip(vs).enumerate() {
            let _ = i;
            let n = horner_asc(num_c, w);
            let d = horner_asc(den_c, w);
            let dmag = d.to_c64().abs();
            if dmag < 1e-3 {
                return f64::INFINITY; // pole on the sample circle: reject
            }
            let r = (n / d - v).to_c64().abs() / (1.0 + v.to_c64().abs());
            worst = worst.max(r);
        }
        worst
    };
    let worst = residual(num_w, den_w);
    if !(worst <= tols.fit_tol) {
        return None;
    }
    // held-out residual: samples that did not participate in the solve
    let holdout: Vec<usize> = (0..s).filter(|i| !fit_idx.contains(i)).collect();
    if holdout.len() < p + q + 4 {
        return None;
    }
    let holdout_residual = holdout
        .iter()
        .map(|&i| {
            let n = horner_asc(num_w, ws[i]);
            let d = horner_asc(den_w, ws[i]);
            (n / d - vs[i]).to_c64().abs() / (1.0 + vs[i].to_c64().abs())
        })
        .fold(0.0, f64::max);
    if !(holdout_residual <= tols.fit_tol) {
        return None;
    }

    // Try to snap to exact coefficients. Normalizing by the denominator's
    // largest coefficient keeps numerator denominators small for polynomial
    // targets; the global maximum is the fallback pivot. Rounding runs a
    // tolerance ladder from tight to loose; every candidate must reproduce
    // all samples exactly before it is accepted.
    let max_idx = |slice: &[Cx<T>], offset: usize| -> Option<usize> {
        slice
            .iter()
            .enumerate()
            .max_by(|a, b| {
                a.1.to_c64()
                    .abs()
                    .partial_cmp(&b.1.to_c64().abs())
                    .unwrap()
            })
            .map(|(i, _)| i + offset)
    };
    let mut pivots = vec![max_idx(den_w, p + 1)?];
    let global = max_idx(&null, 0)?;
    if !pivots.contains(&global) {
        pivots.push(global);
    }
    let ladder = if tols.round_tol < 1e-12 {
        [tols.round_tol * 1e-10, tols.round_tol * 1e-5, tols.round_tol]
    } else {
        [tols.round_tol * 1e-7, tols.round_tol * 1e-4, tols.round_tol]
    };
    let mut exact_attempt: Option<RatRep> = None;
    'search: for &piv_idx in &pivots {
        let pivot = null[piv_idx];
        if pivot.to_c64().abs() < 1e-300 {
            continue;
        }
        for &tol in &ladder {
            let tol_rat = BigRational::new(
                BigInt::from((tol * 1e30) as i128),
                BigInt::from(10u8).pow(30),
            );
            let round_all = |coeffs: &[Cx<T>]| -> Option<Vec<GaussRat>> {
                coeffs
                    .iter()
                    .map(|&c| {
                        let z = c / pivot;
                        cf_round_cx(
                            &real_to_rational(z.re),
                            &real_to_rational(z.im),
                            &tol_rat,
                        )
                    })
                    .collect()
            };
            let Some(nw) = round_all(num_w) else { continue };
            let Some(dw) = round_all(den_w) else { continue };
            // w = t/R: coefficient of t^k is the w coefficient over R^k
            let to_t = |cw: Vec<GaussRat>| -> UniPoly {
                let r = BigRational::from_integer(BigInt::from(radius));
                let mut scale = BigRational::one();
                let coeffs: Vec<GaussRat> = cw
                    .into_iter()
                    .map(|c| {
                        let v = &c * &GaussRat::from_real(scale.clone().recip());
                        scale *= &r;
                        v
                    })
                    .collect();
                UniPoly::from_coeffs(coeffs)
            };
            let cand = RatFn {
                num: to_t(nw),
                den: to_t(dw),
            };
            if cand.den.is_zero() {
                continue;
            }
            let cand = cand.canonicalize();
            let radius_t = T::from_f64(radius as f64);
            let worst = ws
                .iter()
                .zip(vs)
                .map(|(&w, &v)| {
                    let t = w.scale(radius_t);
                    (cand.eval(t) - v).to_c64().abs() / (1.0 + v.to_c64().abs())
                })
                .fold(0.0, f64::max);
            if worst <= tols.fit_tol {
                exact_attempt = Some(RatRep::Exact(cand));
                break 'search;
            }
        }
    }

    let rep = exact_attempt.unwrap_or_else(|| {
        // floating fallback, converted to the t basis (a pure rescale)
        let pivot = null[global];
        let rinv = 1.0 / radius as f64;
        let conv = |coeffs: &[Cx<T>]| -> Vec<CxPair> {
            let mut scale = Cx::<T>::one();
            let mut out = Vec::with_capacity(coeffs.len());
            for &c in coeffs {
                out.push(CxPair::from_cx((c / pivot) * scale));
                scale = scale.scale(T::from_f64(rinv));
            }
            out
        };
        RatRep::Float {
            num: conv(num_w),
            den: conv(den_w),
        }
    });
    let (num_degree, den_degree) = rep.degrees();
    Some(FitOutcome {
        rep,
        num_degree,
        den_degree,
        holdout_residual,
    })
}

fn horner_asc<T: Real>(coeffs: &[Cx<T>], z: Cx<T>) -> Cx<T> {
    let mut acc = Cx::<T>::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Null vector of a square complex matrix by Householder QR: back-substitute
/// from the smallest diagonal of R.
fn qr_null_vector<T: Real>(mut a: Vec<Vec<Cx<T>>>) -> Option<Vec<Cx<T>>> {
    let n = a.len();
    if n == 0 {
        return None;
    }
    let k = a[0].len();
    debug_assert_eq!(n, k);
    for col in 0..k.min(n.saturating_sub(1)) {
        // Householder vector for column `col` below the diagonal
        let norm = {
            let mut s = T::zero();
            for row in a.iter().skip(col) {
                s = s + row[col].norm_sqr();
            }
            s.sqrt()
        };
        if norm.to_f64() == 0.0 {
            continue;
        }
        let x0 = a[col][col];
        let x0mag = x0.abs();
        let phase = if x0mag.to_f64() == 0.0 {
            Cx::<T>::one()
        } else {
            x0.scale(T::one() / x0mag)
        };
        let alpha = -(phase.scale(norm));
        // v = x - alpha e1
        let mut v: Vec<Cx<T>> = (col..n).map(|r| a[r][col]).collect();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if vnorm2.to_f64() == 0.0 {
            continue;
        }
        let two_over = T::from_f64(2.0) / vnorm2;
        for c in col..k {
            // w = v* . a[.., c]
            let mut w = Cx::<T>::zero();
            for (j, vv) in v.iter().enumerate() {
                w = w + vv.conj() * a[col + j][c];
            }
            let w = w.scale(two_over);
            for (j, vv) in v.iter().enumerate() {
                let sub = *vv * w;
                a[col + j][c] = a[col + j][c] - sub;
            }
        }
    }
    // R = a (upper triangular); take the smallest diagonal as the free column
    let jstar = (0..k)
        .min_by(|&i, &j| {
            a[i][i]
                .to_c64()
                .abs()
                .partial_cmp(&a[j][j].to_c64().abs())
                .unwrap()
        })?;
    let mut x = vec![Cx::<T>::zero(); k];
    x[jstar] = Cx::one();
    for i in (0..jstar).rev() {
        let mut acc = Cx::<T>::zero();
        for l in i + 1..=jstar {
            acc = acc + a[i][l] * x[l];
        }
        let diag = a[i][i];
        if diag.to_c64().abs() < 1e-300 {
            return None;
        }
        x[i] = -(acc / diag);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TOLS_F64;
    use crate::num::Cx64;

    fn circle_samples(n: usize) -> Vec<Cx<f64>> {
        (0..n)
            .map(|k| Cx64::from_polar(1.0, 0.3 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect()
    }

    #[test]
    fn fit_recovers_polynomial() {
        // v = 2 t with R = 4: in w coordinates v = 8 w
        let ws = circle_samples(40);
        let vs: Vec<Cx<f64>> = ws.iter().map(|&w| w.scale(8.0)).collect();
        let out = fit_rational(&ws, &vs, 4, 8, &TOLS_F64).unwrap();
        assert!(out.rep.is_exact());
        let RatRep::Exact(r) = &out.rep else { unreachable!() };
        // exact form: 2 t
        assert_eq!(r.to_string(), "(2)*t");
        assert!(out.holdout_residual < 1e-12);
    }

    #[test]
    fn fit_recovers_reciprocal() {
        // v = -1/t, R = 2: w samples, t = 2w
        let ws = circle_samples(40);
        let vs: Vec<Cx<f64>> = ws
            .iter()
            .map(|&w| Cx::<f64>::one() / w.scale(2.0))
            .map(|z| -z)
            .collect();
        let out = fit_rational(&ws, &vs, 2, 8, &TOLS_F64).unwrap();
        assert_eq!((out.num_degree, out.den_degree), (0, 1));
        let RatRep::Exact(r) = &out.rep else {
            panic!("expected exact fit")
        };
        let at = |t: Cx<f64>| r.eval(t);
        let t = Cx::new(0.7, 0.3);
        assert!((at(t) + Cx::one() / t).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_zero() {
        let ws = circle_samples(30);
        let vs: Vec<Cx<f64>> = ws.iter().map(|_| Cx::from_f64s(1e-15, -2e-16)).collect();
        let out = fit_rational(&ws, &vs, 3, 8, &TOLS_F64).unwrap();
        let RatRep::Exact(r) = &out.rep else {
            panic!("expected exact zero")
        };
        assert!(r.is_zero());
    }

    #[test]
    fn fit_recovers_rational_with_both_degrees() {
        // v = (t^2 + 1) / (t - 3), R = 5
        let ws = circle_samples(60);
        let f = |t: Cx<f64>| (t * t + Cx::one()) / (t - Cx::from_f64s(3.0, 0.0));
        let vs: Vec<Cx<f64>> = ws.iter().map(|&w| f(w.scale(5.0))).collect();
        let out = fit_rational(&ws, &vs, 5, 10, &TOLS_F64).unwrap();
        assert_eq!((out.num_degree, out.den_degree), (2, 1));
        assert!(out.rep.is_exact());
        let t = Cx::new(1.25, -0.5);
        assert!((out.rep.eval(t) - f(t)).abs() < 1e-10);
    }

    #[test]
    fn no_fit_when_not_rational() {
        // sqrt branch values on the circle are not a low-degree rational
        let ws = circle_samples(40);
        let vs: Vec<Cx<f64>> = ws
            .iter()
            .map(|&w| {
                let t = w.scale(2.0).to_c64();
                let r = t.abs().sqrt();
                Cx::from_c64(Cx64::from_polar(r, t.arg_f64() / 2.0))
            })
            .collect();
        let err = fit_rational(&ws, &vs, 2, 6, &TOLS_F64).unwrap_err();
        assert!(matches!(err, Error::NoFit { .. }));
    }

    #[test]
    fn ratfn_canonical_form() {
        // (2t^2 - 2) / (2t - 2) reduces to t + 1
        let t = UniPoly::t();
        let one = UniPoly::one();
        let num = t.mul(&t).sub(&one).scale(&GaussRat::from_int(2));
        let den = t.sub(&one).scale(&GaussRat::from_int(2));
        let r = RatFn { num, den }.canonicalize();
        assert_eq!(r.to_string(), "t + (1)");
        assert_eq!(r.den, UniPoly::one());
    }
}
