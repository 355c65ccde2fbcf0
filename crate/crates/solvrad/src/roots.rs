//! Numeric fibers: all roots of the specialized polynomial at once, with
//! residual and separation diagnostics.
//!
//! The finder is Ehrlich–Aberth simultaneous iteration from deterministic
//! perturbed-circle starting points, generic over the working precision.

use crate::config::{tols_for, Settings};
use crate::error::{Error, Result};
use crate::num::{Cx, Cx64, Real};
use crate::polyalg::AlgebraicFamily;
use crate::rng::Rng;

/// The labeled set of roots above one point, with quality bounds.
#[derive(Clone, Debug)]
pub struct Fiber<T: Real> {
    /// The x value this fiber sits over.
    pub point: Vec<Cx<T>>,
    /// Exactly `n` roots, sorted by (re, im) at creation.
    pub roots: Vec<Cx<T>>,
    /// Max backward-relative residual over the roots.
    pub residual: f64,
    /// Min pairwise distance between roots.
    pub min_sep: f64,
}

/// Horner evaluation of a descending coefficient slice, returning the value
/// and the backward-error scale `sum |a_k| |z|^(n-k)`.
fn horner_with_scale<T: Real>(coeffs: &[Cx<T>], z: Cx<T>) -> (Cx<T>, f64) {
    let mut acc = Cx::<T>::zero();
    let mut scale = 0.0f64;
    let zmag = z.to_c64().abs();
    for &c in coeffs {
        acc = acc * z + c;
        scale = scale * zmag + c.to_c64().abs();
    }
    (acc, scale.max(f64::MIN_POSITIVE))
}

fn horner<T: Real>(coeffs: &[Cx<T>], z: Cx<T>) -> Cx<T> {
    let mut acc = Cx::<T>::zero();
    for &c in coeffs {
        acc = acc * z + c;
    }
    acc
}

fn newton_polish<T: Real>(monic: &[Cx<T>], deriv: &[Cx<T>], z: &mut [Cx<T>], iters: u32) {
    for zi in z.iter_mut() {
        for _ in 0..iters {
            let p = horner(monic, *zi);
            let dp = horner(deriv, *zi);
            if dp.to_c64().abs() == 0.0 {
                break;
            }
            *zi = *zi - p / dp;
        }
    }
}

fn derivative_desc<T: Real>(coeffs: &[Cx<T>]) -> Vec<Cx<T>> {
    let n = coeffs.len() - 1;
    coeffs[..n]
        .iter()
        .enumerate()
        .map(|(k, &c)| c.scale(T::from_f64((n - k) as f64)))
        .collect()
}

/// All `n` roots of the polynomial with the given descending coefficients.
///
/// Deterministic for a fixed seed. The leading coefficient must dominate the
/// degenerate threshold; callers near the branch locus see that as
/// [`Error::NearBranchLocus`] from [`fiber_at`].
pub fn all_roots<T: Real>(coeffs_desc: &[Cx<T>], seed: u64, cfg: &Settings) -> Result<Vec<Cx<T>>> {
    let tols = tols_for::<T>();
    let max_coeff = coeffs_desc
        .iter()
        .map(|c| c.to_c64().abs())
        .fold(0.0, f64::max);
    if max_coeff == 0.0 {
        return Err(Error::DegenerateFamily("zero polynomial".into()));
    }
    let lead_mag = coeffs_desc[0].to_c64().abs();
    if lead_mag <= cfg.degenerate_tol * max_coeff {
        return Err(Error::NearBranchLocus {
            min_sep: lead_mag / max_coeff,
            sep_tol: cfg.degenerate_tol,
        });
    }
    let n = coeffs_desc.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    // Monicize numerically for stability.
    let lead = coeffs_desc[0];
    let monic: Vec<Cx<T>> = coeffs_desc.iter().map(|&c| c / lead).collect();
    if n == 1 {
        return Ok(vec![-monic[1]]);
    }
    let deriv = derivative_desc(&monic);

    // Cauchy-style inclusion radius and perturbed-circle starting points.
    let radius = 1.0
        + monic[1..]
            .iter()
            .map(|c| c.to_c64().abs())
            .fold(0.0, f64::max);
    let mut rng = Rng::new(seed ^ 0x5eed_0f00_d5aa_77c3);
    let angle0 = 0.37 + 2.0 * std::f64::consts::PI * rng.unit();
    let mut z: Vec<Cx<T>> = (0..n)
        .map(|k| {
            let theta = angle0 + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let r = radius * (0.65 + 0.1 * rng.unit());
            Cx::from_c64(Cx64::from_polar(r, theta))
        })
        .collect();

    let mut best_residual = f64::INFINITY;
    for _iter in 0..cfg.aberth_iters {
        let mut done = true;
        let mut max_res = 0.0f64;
        for i in 0..n {
            let (p, scale) = horner_with_scale(&monic, z[i]);
            let res = p.to_c64().abs() / scale;
            max_res = max_res.max(res);
            if res <= tols.root_tol {
                continue;
            }
            done = false;
            let dp = horner(&deriv, z[i]);
            let w = if dp.to_c64().abs() == 0.0 {
                Cx::from_f64s(1e-12, 1e-12)
            } else {
                p / dp
            };
            let mut s = Cx::<T>::zero();
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let d = z[i] - zj;
                    if d.to_c64().abs() > 0.0 {
                        s = s + d.recip();
                    }
                }
            }
            let denom = Cx::<T>::one() - w * s;
            let step = if denom.to_c64().abs() < 1e-300 { w } else { w / denom };
            z[i] = z[i] - step;
        }
        best_residual = best_residual.min(max_res);
        if done {
            newton_polish(&monic, &deriv, &mut z, 3);
            return Ok(z);
        }
    }
    // Last chance: Newton polish, then re-check.
    newton_polish(&monic, &deriv, &mut z, 4);
    let worst = z
        .iter()
        .map(|&zi| {
            let (p, scale) = horner_with_scale(&monic, zi);
            p.to_c64().abs() / scale
        })
        .fold(0.0, f64::max);
    if worst <= tols.root_tol {
        Ok(z)
    } else {
        Err(Error::RootsNoConverge {
            iters: cfg.aberth_iters,
            residual: worst,
            best: z
                .iter()
                .map(|v| {
                    let c = v.to_c64();
                    (c.re, c.im)
                })
                .collect(),
        })
    }
}

fn sort_roots<T: Real>(roots: &mut [Cx<T>]) {
    roots.sort_by(|a, b| {
        let (a, b) = (a.to_c64(), b.to_c64());
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

pub fn min_separation<T: Real>(roots: &[Cx<T>]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            m = m.min(roots[i].dist_f64(roots[j]));
        }
    }
    m
}

/// Build a fiber from descending numeric coefficients at a known point.
pub fn fiber_from_coeffs<T: Real>(
    point: Vec<Cx<T>>,
    coeffs: &[Cx<T>],
    seed: u64,
    cfg: &Settings,
) -> Result<Fiber<T>> {
    let mut roots = all_roots(coeffs, seed, cfg)?;
    sort_roots(&mut roots);
    let max_root = roots
        .iter()
        .map(|r| r.to_c64().abs())
        .fold(0.0, f64::max);
    let sep_tol = cfg.sep_tol_factor * (1.0 + max_root);
    let min_sep = min_separation(&roots);
    if roots.len() > 1 && min_sep <= sep_tol {
        return Err(Error::NearBranchLocus { min_sep, sep_tol });
    }
    let residual = roots
        .iter()
        .map(|&z| {
            let (p, scale) = horner_with_scale(coeffs, z);
            p.to_c64().abs() / scale
        })
        .fold(0.0, f64::max);
    Ok(Fiber {
        point,
        roots,
        residual,
        min_sep,
    })
}

/// The fiber of the family over `point`, with labels fixed by sorted order.
///
/// Errors with [`Error::NearBranchLocus`] when the leading coefficient is
/// degenerate or two roots come closer than the separation tolerance —
/// the signal to move the base point.
pub fn fiber_at<T: Real>(
    fam: &AlgebraicFamily,
    point: &[Cx<T>],
    cfg: &Settings,
) -> Result<Fiber<T>> {
    let coeffs = fam.eval_coeffs(point);
    fiber_from_coeffs(point.to_vec(), &coeffs, cfg.seed, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_family;

    fn cfg() -> Settings {
        Settings::default()
    }

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    #[test]
    fn roots_of_simple_quadratics() {
        let r = all_roots(&[c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)], 0, &cfg()).unwrap();
        let mut r = r;
        sort_roots(&mut r);
        assert!((r[0] - c(-1.0, 0.0)).abs() < 1e-12);
        assert!((r[1] - c(1.0, 0.0)).abs() < 1e-12);

        let mut r = all_roots(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 0, &cfg()).unwrap();
        sort_roots(&mut r);
        assert!((r[0] - c(0.0, -1.0)).abs() < 1e-12);
        assert!((r[1] - c(0.0, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn cube_roots_of_unity() {
        let mut r = all_roots(
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
            0,
            &cfg(),
        )
        .unwrap();
        sort_roots(&mut r);
        let s3 = 0.75f64.sqrt();
        assert!((r[0] - c(-0.5, -s3)).abs() < 1e-10);
        assert!((r[1] - c(-0.5, s3)).abs() < 1e-10);
        assert!((r[2] - c(1.0, 0.0)).abs() < 1e-10);
    }

    #[test]
    fn fiber_at_examples() {
        let fam = parse_family("y^2 - x").unwrap();
        let f = fiber_at(&fam, &[c(4.0, 0.0)], &cfg()).unwrap();
        assert!((f.roots[0] - c(-2.0, 0.0)).abs() < 1e-12);
        assert!((f.roots[1] - c(2.0, 0.0)).abs() < 1e-12);
        assert!((f.min_sep - 4.0).abs() < 1e-10);
        assert!(f.residual < 1e-10);

        let err = fiber_at(&fam, &[c(0.0, 0.0)], &cfg()).unwrap_err();
        assert!(matches!(err, Error::NearBranchLocus { .. }));
    }

    #[test]
    fn quintic_fiber_closed_form_separation() {
        // y^5 + 0*y + 1: roots are the 5th roots of -1, min_sep = 2 sin(pi/5)
        let fam = parse_family("y^5 + a*y + b").unwrap();
        let f = fiber_at(&fam, &[c(0.0, 0.0), c(1.0, 0.0)], &cfg()).unwrap();
        assert_eq!(f.roots.len(), 5);
        let expected = 2.0 * (std::f64::consts::PI / 5.0).sin();
        assert!((f.min_sep - expected).abs() < 1e-9, "min_sep {}", f.min_sep);
    }

    #[test]
    fn fiber_deterministic_and_order_stable() {
        let fam = parse_family("y^3 + x*y + 2").unwrap();
        let p = [c(0.7, -0.3)];
        let f1 = fiber_at(&fam, &p, &cfg()).unwrap();
        let f2 = fiber_at(&fam, &p, &cfg()).unwrap();
        for (a, b) in f1.roots.iter().zip(&f2.roots) {
            assert_eq!(a.re, b.re);
            assert_eq!(a.im, b.im);
        }
    }

    #[test]
    fn dd_precision_polish() {
        use crate::num::Dd;
        let one = Cx::<Dd>::one();
        let coeffs = [one, Cx::zero(), -one - one]; // y^2 - 2
        let roots = all_roots(&coeffs, 0, &cfg()).unwrap();
        for r in roots {
            let err = (r * r - (one + one)).abs();
            assert!(err.to_f64() < 1e-28, "residual {err:?}");
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]
        /// Expanding prod (y - r_i) from found roots recovers the coefficients.
        #[test]
        fn expand_recovers_coefficients(parts in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2..=9)) {
            // keep the target roots separated so the polynomial is well posed
            let mut targets: Vec<Cx<f64>> = Vec::new();
            'outer: for (re, im) in parts {
                let cand = c(re, im);
                for t in &targets {
                    if (cand - *t).abs() < 0.35 {
                        continue 'outer;
                    }
                }
                targets.push(cand);
            }
            proptest::prop_assume!(targets.len() >= 2);
            // expand monic polynomial
            let mut coeffs = vec![Cx::<f64>::one()];
            for r in &targets {
                let mut next = vec![Cx::<f64>::zero(); coeffs.len() + 1];
                for (k, &ck) in coeffs.iter().enumerate() {
                    next[k] = next[k] + ck;
                    next[k + 1] = next[k + 1] - ck * *r;
                }
                coeffs = next;
            }
            let found = all_roots(&coeffs, 1, &cfg()).unwrap();
            // re-expand from found roots and compare coefficient vectors
            let mut re_coeffs = vec![Cx::<f64>::one()];
            for r in &found {
                let mut next = vec![Cx::<f64>::zero(); re_coeffs.len() + 1];
                for (k, &ck) in re_coeffs.iter().enumerate() {
                    next[k] = next[k] + ck;
                    next[k + 1] = next[k + 1] - ck * *r;
                }
                re_coeffs = next;
            }
            let scale = coeffs.iter().map(|x| x.abs()).fold(1.0, f64::max);
            for (a, b) in coeffs.iter().zip(&re_coeffs) {
                proptest::prop_assert!((*a - *b).abs() <= 1e-8 * scale);
            }
        }
    }
}
