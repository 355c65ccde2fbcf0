//! Dense univariate polynomials over the Gaussian rationals: what a family
//! becomes once restricted to a slice line. Exact gcd/square-free machinery
//! lives here because branch polynomials routinely have multiple roots.

use crate::exact::GaussRat;
use crate::num::{Cx, Real};

/// Coefficients ascending; no trailing zeros; the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<GaussRat>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }
    pub fn one() -> Self {
        UniPoly::constant(GaussRat::one())
    }
    pub fn constant(c: GaussRat) -> Self {
        UniPoly { coeffs: vec![c] }.trim()
    }
    pub fn t() -> Self {
        UniPoly {
            coeffs: vec![GaussRat::zero(), GaussRat::one()],
        }
    }
    pub fn from_coeffs(coeffs: Vec<GaussRat>) -> Self {
        UniPoly { coeffs }.trim()
    }

    fn trim(mut self) -> Self {
        while self.coeffs.last().map(|c| c.is_zero()) == Some(true) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }
    pub fn leading(&self) -> Option<&GaussRat> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let len = self.coeffs.len().max(o.coeffs.len());
        let zero = GaussRat::zero();
        let coeffs = (0..len)
            .map(|k| {
                let a = self.coeffs.get(k).unwrap_or(&zero);
                let b = o.coeffs.get(k).unwrap_or(&zero);
                a + b
            })
            .collect();
        UniPoly { coeffs }.trim()
    }
    pub fn neg(&self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![GaussRat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        UniPoly { coeffs }.trim()
    }
    pub fn scale(&self, c: &GaussRat) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|k| k * c).collect(),
        }
        .trim()
    }
    pub fn pow(&self, n: u32) -> UniPoly {
        let mut acc = UniPoly::one();
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

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * &GaussRat::from_int(k as i64))
            .collect();
        UniPoly { coeffs }.trim()
    }

    pub fn eval_exact(&self, t: &GaussRat) -> GaussRat {
        let mut acc = GaussRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * t) + c;
        }
        acc
    }

    /// Numeric coefficients, ascending, in precision `T`.
    pub fn numeric_coeffs<T: Real>(&self) -> Vec<Cx<T>> {
        self.coeffs.iter().map(|c| c.to_cx::<T>()).collect()
    }

    /// Numeric coefficients, descending (root-finder convention).
    pub fn numeric_coeffs_desc<T: Real>(&self) -> Vec<Cx<T>> {
        self.coeffs.iter().rev().map(|c| c.to_cx::<T>()).collect()
    }

    pub fn make_monic(&self) -> UniPoly {
        match self.leading() {
            None => self.clone(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    /// Field division with remainder.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.degree() < d.degree() || self.is_zero() {
            return (UniPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dn = d.degree();
        let lead = d.leading().unwrap().clone();
        let mut q = vec![GaussRat::zero(); rem.len() - dn];
        for k in (dn..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let factor = &rem[k] / &lead;
            q[k - dn] = factor.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                let sub = dc * &factor;
                rem[k - dn + j] = &rem[k - dn + j] - &sub;
            }
        }
        (
            UniPoly { coeffs: q }.trim(),
            UniPoly { coeffs: rem }.trim(),
        )
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let mut a = self.make_monic();
        let mut b = o.make_monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.make_monic();
        }
        a
    }

    /// The product of distinct irreducible factors: `self / gcd(self, self')`.
    pub fn squarefree_part(&self) -> UniPoly {
        if self.degree() == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.clone();
        }
        let (q, r) = self.div_rem(&g);
        debug_assert!(r.is_zero());
        q
    }
}
