//! Exact polynomial layer: multivariate polynomials over Gaussian rationals,
//! univariate restrictions, Sylvester resultants by fraction-free
//! elimination, and the branch hypersurface `P_n * disc`.

mod parse;
mod unipoly;

pub use parse::parse_family;
pub use unipoly::UniPoly;

use crate::error::{Error, Result};
use crate::exact::{sign_of, GaussRat};
use crate::num::{Cx, Real};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Sparse multivariate polynomial with exact coefficients.
///
/// Terms are keyed by exponent tuples (one entry per variable) in a BTreeMap,
/// so iteration order — and therefore printing — is deterministic. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    pub vars: Vec<String>,
    pub terms: BTreeMap<Vec<u32>, GaussRat>,
}

impl MultiPoly {
    pub fn zero(vars: Vec<String>) -> Self {
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }
    pub fn constant(vars: Vec<String>, c: GaussRat) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            let e = vec![0; p.vars.len()];
            p.terms.insert(e, c);
        }
        p
    }
    pub fn one(vars: Vec<String>) -> Self {
        Self::constant(vars, GaussRat::one())
    }
    pub fn var(vars: Vec<String>, idx: usize) -> Self {
        assert!(idx < vars.len());
        let mut p = Self::zero(vars);
        let mut e = vec![0; p.vars.len()];
        e[idx] = 1;
        p.terms.insert(e, GaussRat::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: GaussRat) {
        debug_assert_eq!(exps.len(), self.vars.len());
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = &*o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.vars, o.vars);
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }
    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
    pub fn sub(&self, o: &MultiPoly) -> MultiPoly {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.vars, o.vars);
        let mut r = MultiPoly::zero(self.vars.clone());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }
    pub fn scale(&self, c: &GaussRat) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.vars.clone());
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }
    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.vars.clone());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Lex-leading term (largest exponent tuple).
    pub fn leading(&self) -> Option<(&Vec<u32>, &GaussRat)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Exact quotient; errors if `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Result<MultiPoly> {
        if d.is_zero() {
            return Err(Error::BadInput("division by zero polynomial".into()));
        }
        let (dl_e, dl_c) = d.leading().expect("nonzero");
        let dl_e = dl_e.clone();
        let dl_c = dl_c.clone();
        let mut rem = self.clone();
        let mut q = MultiPoly::zero(self.vars.clone());
        while let Some((re, rc)) = rem.leading().map(|(e, c)| (e.clone(), c.clone())) {
            if !dl_e.iter().zip(&re).all(|(a, b)| a <= b) {
                return Err(Error::BadInput(
                    "inexact polynomial division (internal)".into(),
                ));
            }
            let qe: Vec<u32> = re.iter().zip(&dl_e).map(|(a, b)| a - b).collect();
            let qc = &rc / &dl_c;
            let mut t = MultiPoly::zero(self.vars.clone());
            t.add_term(qe.clone(), qc.clone());
            rem = rem.sub(&t.mul(d));
            q.add_term(qe, qc);
        }
        Ok(q)
    }

    /// Numeric evaluation at a complex point (one value per variable).
    pub fn eval<T: Real>(&self, point: &[Cx<T>]) -> Cx<T> {
        debug_assert_eq!(point.len(), self.vars.len());
        let mut acc = Cx::<T>::zero();
        for (e, c) in &self.terms {
            let mut m = c.to_cx::<T>();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    m = m * x.powu(k);
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// Exact substitution `x_i = o_i + t*d_i`, producing a univariate
    /// polynomial in the slice parameter.
    pub fn restrict_affine(&self, origin: &[GaussRat], direction: &[GaussRat]) -> UniPoly {
        debug_assert_eq!(origin.len(), self.vars.len());
        let mut acc = UniPoly::zero();
        for (e, c) in &self.terms {
            let mut m = UniPoly::constant(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let lin = UniPoly::from_coeffs(vec![origin[i].clone(), direction[i].clone()]);
                    m = m.mul(&lin.pow(k));
                }
            }
            acc = acc.add(&m);
        }
        acc
    }

    /// Divide by content so coefficients are coprime integers and the
    /// lex-leading term is positive (its real part, or imaginary when the
    /// real part is zero). Gives branch polynomials a reproducible form.
    pub fn normalize_content(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.re.denom());
            den_lcm = den_lcm.lcm(c.im.denom());
        }
        let mut num_gcd = BigInt::zero();
        let scale = BigRational::from_integer(den_lcm);
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(&(&c.re * &scale).to_integer());
            num_gcd = num_gcd.gcd(&(&c.im * &scale).to_integer());
        }
        if num_gcd.is_zero() {
            num_gcd = BigInt::one();
        }
        let factor = GaussRat::from_real(scale / BigRational::from_integer(num_gcd));
        let mut out = self.scale(&factor);
        let flip = {
            let (_, lc) = out.leading().expect("nonzero");
            if !lc.re.is_zero() {
                sign_of(&lc.re) == Sign::Minus
            } else {
                sign_of(&lc.im) == Sign::Minus
            }
        };
        if flip {
            out = out.neg();
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    /// Descending lex term order, explicit `*` and `^`, non-integer or
    /// complex coefficients parenthesized so the output re-parses.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], k)
                    }
                })
                .collect();
            let coef_str = {
                let s = c.to_string();
                if c.is_real() && c.re.is_integer() && !c.re.is_negative() {
                    s
                } else {
                    format!("({s})")
                }
            };
            let term = if mono.is_empty() {
                coef_str
            } else if c.is_one() {
                mono.join("*")
            } else {
                format!("{}*{}", coef_str, mono.join("*"))
            };
            if first {
                write!(f, "{term}")?;
                first = false;
            } else {
                write!(f, " + {term}")?;
            }
        }
        Ok(())
    }
}

/// The input equation: degree `n` in the unknown `y` with exact multivariate
/// coefficients `P_n, ..., P_0` (stored in that descending order).
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicFamily {
    pub n: usize,
    /// `coeffs[0] = P_n`, ..., `coeffs[n] = P_0`.
    pub coeffs: Vec<MultiPoly>,
    pub vars: Vec<String>,
}

impl AlgebraicFamily {
    pub fn new(coeffs: Vec<MultiPoly>, vars: Vec<String>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() < 2 {
            return Err(Error::ZeroDegreeInY);
        }
        if coeffs[0].is_zero() {
            return Err(Error::BadInput("leading coefficient is zero".into()));
        }
        Ok(AlgebraicFamily {
            n: coeffs.len() - 1,
            coeffs,
            vars,
        })
    }

    /// Numeric coefficients `(P_n(point), ..., P_0(point))`.
    pub fn eval_coeffs<T: Real>(&self, point: &[Cx<T>]) -> Vec<Cx<T>> {
        self.coeffs.iter().map(|p| p.eval(point)).collect()
    }

    /// Coefficient vector of dP/dy, degree n-1, descending.
    pub fn derivative_y(&self) -> Vec<MultiPoly> {
        let n = self.n;
        (0..n)
            .map(|j| {
                let k = n - j; // power of y in coeffs[j]
                self.coeffs[j].scale(&GaussRat::from_int(k as i64))
            })
            .collect()
    }

    /// Canonical display, re-parseable by `parse_family`.
    pub fn display_equation(&self) -> String {
        let mut parts = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = self.n - j;
            let ypow = match k {
                0 => String::new(),
                1 => "y".into(),
                _ => format!("y^{k}"),
            };
            let cs = c.to_string();
            let needs_paren = c.terms.len() > 1;
            let cs = if needs_paren { format!("({cs})") } else { cs };
            let term = match (c.is_constant() && c.leading().map(|(_, v)| v.is_one()) == Some(true), ypow.is_empty()) {
                (true, false) => ypow.clone(),
                (_, true) => cs,
                _ => format!("{cs}*{ypow}"),
            };
            parts.push(term);
        }
        parts.join(" + ")
    }
}

/// Resultant in `y` of two polynomials given by descending coefficient
/// vectors (entries are polynomials in the x variables). Computed as the
/// Sylvester determinant by fraction-free (Bareiss) elimination.
pub fn resultant_y(f: &[MultiPoly], g: &[MultiPoly]) -> Result<MultiPoly> {
    let m = f.len().saturating_sub(1);
    let k = g.len().saturating_sub(1);
    if m == 0 || k == 0 {
        return Err(Error::BadInput(
            "resultant needs positive degrees in y".into(),
        ));
    }
    let vars = f[0].vars.clone();
    let size = m + k;
    let zero = MultiPoly::zero(vars.clone());
    let mut mtx = vec![vec![zero.clone(); size]; size];
    for row in 0..k {
        for (j, c) in f.iter().enumerate() {
            mtx[row][row + j] = c.clone();
        }
    }
    for row in 0..m {
        for (j, c) in g.iter().enumerate() {
            mtx[k + row][row + j] = c.clone();
        }
    }
    bareiss_det(mtx, vars)
}

/// Fraction-free determinant over the polynomial ring. Row pivoting only;
/// every division in the Bareiss recurrence is exact.
fn bareiss_det(mut m: Vec<Vec<MultiPoly>>, vars: Vec<String>) -> Result<MultiPoly> {
    let n = m.len();
    if n == 0 {
        return Ok(MultiPoly::one(vars));
    }
    let mut sign = false;
    let mut prev = MultiPoly::one(vars.clone());
    for p in 0..n {
        if m[p][p].is_zero() {
            let Some(swap) = (p + 1..n).find(|&r| !m[r][p].is_zero()) else {
                return Ok(MultiPoly::zero(vars));
            };
            m.swap(p, swap);
            sign = !sign;
        }
        let pivot = m[p][p].clone();
        for r in p + 1..n {
            for c in p + 1..n {
                let t = m[r][c].mul(&pivot).sub(&m[r][p].mul(&m[p][c]));
                m[r][c] = t.div_exact(&prev)?;
            }
            m[r][p] = MultiPoly::zero(vars.clone());
        }
        prev = pivot;
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if sign { det.neg() } else { det })
}

/// `P_n * Res_y(P, dP/dy)` up to the content normalization: an exact
/// polynomial whose zero set contains the branch locus. For n = 1 the
/// discriminant is vacuous and the result is `P_n` alone.
pub fn branch_poly(fam: &AlgebraicFamily) -> Result<MultiPoly> {
    if fam.n == 1 {
        return Ok(fam.coeffs[0].normalize_content());
    }
    let deriv = fam.derivative_y();
    let res = resultant_y(&fam.coeffs, &deriv)?;
    Ok(fam.coeffs[0].mul(&res).normalize_content())
}
