//! Branch points on a slice line, petal loops, root tracking along them,
//! and the permutations they induce on the base fiber — the monodromy group.
//! Local monodromy in a small ball is built from the same machinery.

use crate::config::{tols_for, Settings};
use crate::error::{Error, Result};
use crate::exact::{f64_to_rational, GaussRat};
use crate::groups::{Perm, PermGroup};
use crate::num::{Cx, Cx64, Real};
use crate::polyalg::{branch_poly, AlgebraicFamily, MultiPoly, UniPoly};
use crate::rng::Rng;
use crate::roots::{fiber_from_coeffs, min_separation};

/// Affine line `t -> origin + t * direction` in the x space, with exact
/// coordinates so restrictions stay exact.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceLine {
    pub origin: Vec<GaussRat>,
    pub direction: Vec<GaussRat>,
}

impl SliceLine {
    pub fn identity() -> SliceLine {
        SliceLine {
            origin: vec![GaussRat::zero()],
            direction: vec![GaussRat::one()],
        }
    }
    pub fn num_vars(&self) -> usize {
        self.origin.len()
    }
    /// `origin + t*direction` numerically.
    pub fn point_at<T: Real>(&self, t: Cx<T>) -> Vec<Cx<T>> {
        self.origin
            .iter()
            .zip(&self.direction)
            .map(|(o, d)| o.to_cx::<T>() + d.to_cx::<T>() * t)
            .collect()
    }
    /// Serialize as `o1,o2;d1,d2`.
    pub fn to_flag_string(&self) -> String {
        let o: Vec<String> = self.origin.iter().map(|g| g.to_string()).collect();
        let d: Vec<String> = self.direction.iter().map(|g| g.to_string()).collect();
        format!("{};{}", o.join(","), d.join(","))
    }
    pub fn parse_flag(s: &str) -> Result<SliceLine> {
        let (o, d) = s
            .split_once(';')
            .ok_or_else(|| Error::BadInput("slice must be `o1,..;d1,..`".into()))?;
        let parse_tuple = |part: &str| -> Result<Vec<GaussRat>> {
            if part.trim().is_empty() {
                return Ok(vec![]);
            }
            part.split(',').map(GaussRat::parse).collect()
        };
        let origin = parse_tuple(o)?;
        let direction = parse_tuple(d)?;
        if origin.len() != direction.len() {
            return Err(Error::BadInput("slice origin/direction lengths differ".into()));
        }
        Ok(SliceLine { origin, direction })
    }
}

/// A family restricted to a slice line: exact univariate coefficients in the
/// parameter `t` plus cached numeric forms.
#[derive(Clone, Debug)]
pub struct SlicedFamily<T: Real> {
    pub n: usize,
    pub slice: SliceLine,
    /// `coeff_polys[0]` is the restriction of `P_n`, descending in y.
    pub coeff_polys: Vec<UniPoly>,
    /// Restriction of the branch polynomial, and its square-free part whose
    /// simple roots are the branch points.
    pub branch_restricted: UniPoly,
    pub branch_squarefree: UniPoly,
    numeric: Vec<Vec<Cx<T>>>,
    branch_sf_numeric: Vec<Cx<T>>,
}

impl<T: Real> SlicedFamily<T> {
    pub fn new(fam: &AlgebraicFamily, slice: SliceLine, bp: &MultiPoly) -> Result<Self> {
        if slice.num_vars() != fam.vars.len() {
            return Err(Error::BadInput(format!(
                "slice has {} coordinates, family has {} variables",
                slice.num_vars(),
                fam.vars.len()
            )));
        }
        let coeff_polys: Vec<UniPoly> = fam
            .coeffs
            .iter()
            .map(|c| c.restrict_affine(&slice.origin, &slice.direction))
            .collect();
        if coeff_polys[0].is_zero() {
            return Err(Error::DegenerateFamily(
                "leading coefficient vanishes identically on the slice".into(),
            ));
        }
        let branch_restricted = bp.restrict_affine(&slice.origin, &slice.direction);
        if branch_restricted.is_zero() {
            return Err(Error::DegenerateFamily(
                "branch polynomial vanishes identically on the slice".into(),
            ));
        }
        let branch_squarefree = branch_restricted.squarefree_part();
        let numeric = coeff_polys.iter().map(|p| p.numeric_coeffs()).collect();
        let branch_sf_numeric = branch_squarefree.numeric_coeffs();
        Ok(SlicedFamily {
            n: fam.n,
            slice,
            coeff_polys,
            branch_restricted,
            branch_squarefree,
            numeric,
            branch_sf_numeric,
        })
    }

    /// Descending-in-y numeric coefficients of the specialized polynomial.
    pub fn coeffs_at(&self, t: Cx<T>) -> Vec<Cx<T>> {
        self.numeric
            .iter()
            .map(|c| horner_ascending(c, t))
            .collect()
    }

    pub fn branch_value_at(&self, t: Cx<T>) -> Cx<T> {
        horner_ascending(&self.branch_sf_numeric, t)
    }

    pub fn x_point(&self, t: Cx<T>) -> Vec<Cx<T>> {
        self.slice.point_at(t)
    }
}

fn horner_ascending<T: Real>(coeffs: &[Cx<T>], t: Cx<T>) -> Cx<T> {
    let mut acc = Cx::<T>::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

/// Branch points of the restricted family, clustered.
#[derive(Clone, Debug)]
pub struct BranchPoints<T: Real> {
    pub values: Vec<Cx<T>>,
    pub cluster_radius: Vec<f64>,
}

impl<T: Real> BranchPoints<T> {
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn values_c64(&self) -> Vec<Cx64> {
        self.values.iter().map(|v| v.to_c64()).collect()
    }
    pub fn max_magnitude(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.to_c64().abs())
            .fold(0.0, f64::max)
    }
}

/// All branch points on the slice: roots of the square-free part of the
/// restricted branch polynomial, then greedy clustering within tolerance.
pub fn branch_points<T: Real>(sliced: &SlicedFamily<T>, cfg: &Settings) -> Result<BranchPoints<T>> {
    if sliced.branch_squarefree.degree() == 0 {
        return Ok(BranchPoints {
            values: vec![],
            cluster_radius: vec![],
        });
    }
    let coeffs = sliced.branch_squarefree.numeric_coeffs_desc::<T>();
    let roots = crate::roots::all_roots(&coeffs, cfg.seed, cfg)?;
    let max_mag = roots.iter().map(|r| r.to_c64().abs()).fold(0.0, f64::max);
    let tol = cfg.cluster_tol_factor * (1.0 + max_mag);
    // greedy clustering, then re-merge until stable
    let mut clusters: Vec<Vec<Cx<T>>> = Vec::new();
    for r in roots {
        let mut placed = false;
        for cl in clusters.iter_mut() {
            let centroid = centroid(cl);
            if centroid.dist_f64(r) <= tol {
                cl.push(r);
                placed = true;
                break;
            }
        }
        if !placed {
            clusters.push(vec![r]);
        }
    }
    loop {
        let mut merged = false;
        'outer: for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let ci = centroid(&clusters[i]);
                let cj = centroid(&clusters[j]);
                let ri = spread(&clusters[i], ci);
                let rj = spread(&clusters[j], cj);
                if ci.dist_f64(cj) <= 2.0 * (ri.max(rj).max(tol)) {
                    let mut moved = clusters.remove(j);
                    clusters[i].append(&mut moved);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    let mut out: Vec<(Cx<T>, f64)> = clusters
        .iter()
        .map(|cl| {
            let c = centroid(cl);
            (c, spread(cl, c).max(tol))
        })
        .collect();
    out.sort_by(|a, b| {
        let (a, b) = (a.0.to_c64(), b.0.to_c64());
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(BranchPoints {
        values: out.iter().map(|(c, _)| *c).collect(),
        cluster_radius: out.iter().map(|(_, r)| *r).collect(),
    })
}

fn centroid<T: Real>(pts: &[Cx<T>]) -> Cx<T> {
    let mut acc = Cx::<T>::zero();
    for p in pts {
        acc = acc + *p;
    }
    acc.scale(T::from_f64(1.0 / pts.len() as f64))
}

fn spread<T: Real>(pts: &[Cx<T>], center: Cx<T>) -> f64 {
    pts.iter().map(|p| p.dist_f64(center)).fold(0.0, f64::max)
}

/// Pick a pseudo-random slice line (deterministic from the seed) on which the
/// family stays nondegenerate. One variable gets the identity slice.
pub fn choose_slice(fam: &AlgebraicFamily, seed: u64, cfg: &Settings) -> Result<SliceLine> {
    let bp = branch_poly(fam)?;
    choose_slice_with(fam, &bp, seed, cfg)
}

pub fn choose_slice_with(
    fam: &AlgebraicFamily,
    bp: &MultiPoly,
    seed: u64,
    cfg: &Settings,
) -> Result<SliceLine> {
    let nvars = fam.vars.len();
    if nvars == 0 {
        let slice = SliceLine {
            origin: vec![],
            direction: vec![],
        };
        return Ok(slice);
    }
    if nvars == 1 {
        let slice = SliceLine::identity();
        // still need the branch polynomial to be nonzero somewhere
        SlicedFamily::<f64>::new(fam, slice.clone(), bp)?;
        return Ok(slice);
    }
    let mut rng = Rng::new(seed ^ 0x51ce_11fe);
    for _ in 0..cfg.max_retries {
        let rand_component = |rng: &mut Rng| {
            GaussRat::from_parts(
                num_rational::BigRational::new(rng.int_in(-8, 8).into(), 4.into()),
                num_rational::BigRational::new(rng.int_in(-8, 8).into(), 8.into()),
            )
        };
        let origin: Vec<GaussRat> = (0..nvars).map(|_| rand_component(&mut rng)).collect();
        let mut direction: Vec<GaussRat> = (0..nvars).map(|_| rand_component(&mut rng)).collect();
        // keep the first direction component away from zero
        if direction[0].is_zero() {
            direction[0] = GaussRat::one();
        }
        let slice = SliceLine { origin, direction };
        if SlicedFamily::<f64>::new(fam, slice.clone(), bp).is_ok() {
            return Ok(slice);
        }
    }
    Err(Error::DegenerateFamily(
        "no usable slice line found after retries".into(),
    ))
}

/// A closed polyline in the slice parameter, starting and ending at the base.
#[derive(Clone, Debug)]
pub struct Loop {
    pub base: Cx64,
    pub waypoints: Vec<Cx64>,
    /// Index of the encircled branch point, if any.
    pub encircled: Option<usize>,
}

/// Fiber over one slice parameter value, labels inherited from tracking.
#[derive(Clone, Debug)]
pub struct SliceFiber<T: Real> {
    pub t: Cx<T>,
    pub roots: Vec<Cx<T>>,
    pub residual: f64,
    pub min_sep: f64,
}

/// Fiber of the restricted family at `t`, labels fixed by sorted order.
pub fn slice_fiber_at<T: Real>(
    sliced: &SlicedFamily<T>,
    t: Cx<T>,
    cfg: &Settings,
) -> Result<SliceFiber<T>> {
    let coeffs = sliced.coeffs_at(t);
    let f = fiber_from_coeffs(vec![t], &coeffs, cfg.seed, cfg)?;
    Ok(SliceFiber {
        t,
        roots: f.roots,
        residual: f.residual,
        min_sep: f.min_sep,
    })
}

fn dist_point_segment(p: Cx64, a: Cx64, b: Cx64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return p.dist_f64(a);
    }
    let ap = p - a;
    let s = ((ap.re * ab.re + ap.im * ab.im) / len2).clamp(0.0, 1.0);
    let proj = a + ab.scale(s);
    p.dist_f64(proj)
}

/// Straight path from `from` to `to`, detouring along an obstacle's petal
/// circle when the segment would pass inside it. The detour arc is chosen on
/// the side away from the obstacle's own stem entry so stems stay disjoint.
fn approach_with_detours(
    from: Cx64,
    to: Cx64,
    obstacles: &[(Cx64, f64)],
    t0: Cx64,
) -> Result<Vec<Cx64>> {
    let mut pts = vec![from, to];
    for _pass in 0..4 {
        let mut changed = false;
        let mut k = 0;
        while k + 1 < pts.len() {
            let (a, b) = (pts[k], pts[k + 1]);
            let mut best: Option<(f64, usize)> = None;
            for (idx, &(c, r)) in obstacles.iter().enumerate() {
                let d = dist_point_segment(c, a, b);
                if d < r * 0.98 && a.dist_f64(c) > r * 0.99 && b.dist_f64(c) > r * 0.99 {
                    let along = ((c - a).re * (b - a).re + (c - a).im * (b - a).im)
                        / (b - a).norm_sqr().max(1e-300);
                    if best.is_none() || along < best.unwrap().0 {
                        best = Some((along, idx));
                    }
                }
            }
            if let Some((_, idx)) = best {
                let (c, r) = obstacles[idx];
                let arc = detour_arc(a, b, c, r, t0)?;
                pts.splice(k + 1..k + 1, arc);
                changed = true;
            }
            k += 1;
        }
        if !changed {
            return Ok(pts);
        }
    }
    Err(Error::LoopConstruction(
        "approach segment could not clear the branch points".into(),
    ))
}

/// Arc waypoints around obstacle `c` of radius `r` for a segment `a -> b`
/// passing through its disk.
fn detour_arc(a: Cx64, b: Cx64, c: Cx64, r: f64, t0: Cx64) -> Result<Vec<Cx64>> {
    let ab = b - a;
    let len = ab.abs();
    let u = ab.scale(1.0 / len);
    // line point closest to c and half-chord
    let s0 = (c - a).re * u.re + (c - a).im * u.im;
    let d = dist_point_segment(c, a, b);
    let half = (r * r - d * d).max(0.0).sqrt();
    let s_in = (s0 - half).max(0.0);
    let s_out = (s0 + half).min(len);
    let p_in = a + u.scale(s_in);
    let p_out = a + u.scale(s_out);
    let phi_in = (p_in - c).arg_f64();
    let phi_out = (p_out - c).arg_f64();
    let entry_dir = (t0 - c).arg_f64(); // obstacle's own stem comes in here
    // candidate arcs: ccw and cw from phi_in to phi_out
    let ccw_span = {
        let mut d = phi_out - phi_in;
        while d <= 0.0 {
            d += 2.0 * std::f64::consts::PI;
        }
        d
    };
    let cw_span = 2.0 * std::f64::consts::PI - ccw_span;
    let contains = |start: f64, span: f64, ccw: bool, angle: f64| -> bool {
        let mut rel = if ccw { angle - start } else { start - angle };
        while rel < 0.0 {
            rel += 2.0 * std::f64::consts::PI;
        }
        rel <= span
    };
    let use_ccw = if contains(phi_in, ccw_span, true, entry_dir) {
        false
    } else if contains(phi_in, cw_span, false, entry_dir) {
        true
    } else {
        ccw_span <= cw_span
    };
    let (span, sign) = if use_ccw { (ccw_span, 1.0) } else { (cw_span, -1.0) };
    let steps = 12usize.max((span / 0.4) as usize);
    let mut out = Vec::with_capacity(steps + 1);
    let scale = r / (p_in - c).abs();
    out.push(c + (p_in - c).scale(scale)); // snap onto the circle
    for k in 1..steps {
        let phi = phi_in + sign * span * (k as f64 / steps as f64);
        out.push(c + Cx64::from_polar(r, phi));
    }
    let scale = r / (p_out - c).abs();
    out.push(c + (p_out - c).scale(scale));
    Ok(out)
}

/// One petal loop per branch point: straight approach (with detours) to a
/// small circle, one counterclockwise circuit, straight return. Loops come
/// back ordered by increasing argument of `branch - t0`.
pub fn petal_loops(bps: &[Cx64], radii_hint: &[f64], t0: Cx64, cfg: &Settings) -> Result<Vec<Loop>> {
    let mut loops = Vec::with_capacity(bps.len());
    let radii = petal_radii(bps, radii_hint, t0)?;
    for (j, (&b, &r)) in bps.iter().zip(&radii).enumerate() {
        let to_base = t0 - b;
        let entry = b + to_base.scale(r / to_base.abs());
        let obstacles: Vec<(Cx64, f64)> = bps
            .iter()
            .zip(&radii)
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, (&c, &rc))| (c, rc))
            .collect();
        let approach = approach_with_detours(t0, entry, &obstacles, t0)?;
        let mut waypoints = approach.clone();
        let phi0 = (entry - b).arg_f64();
        for k in 1..=cfg.k_seg {
            let phi = phi0 + 2.0 * std::f64::consts::PI * k as f64 / cfg.k_seg as f64;
            waypoints.push(b + Cx64::from_polar(r, phi));
        }
        let mut back = approach;
        back.reverse();
        waypoints.extend(back);
        dedup_consecutive(&mut waypoints);
        // the loop must keep its distance from the other branch points
        let margin = 0.6 * radii.iter().cloned().fold(f64::INFINITY, f64::min);
        for w in &waypoints {
            for (k, &c) in bps.iter().enumerate() {
                if k != j && w.dist_f64(c) < margin {
                    return Err(Error::LoopConstruction(format!(
                        "waypoint too close to branch point {k} (move the base point)"
                    )));
                }
            }
        }
        loops.push(Loop {
            base: t0,
            waypoints,
            encircled: Some(j),
        });
    }
    // order by increasing argument of (branch - t0)
    loops.sort_by(|x, y| {
        let ax = (bps[x.encircled.unwrap()] - t0).arg_f64();
        let ay = (bps[y.encircled.unwrap()] - t0).arg_f64();
        ax.partial_cmp(&ay).unwrap()
    });
    Ok(loops)
}

/// Circle radius per petal: half the nearest-neighbor gap, capped by a
/// quarter of the way back to the base point first, and never below the
/// cluster radius.
fn petal_radii(bps: &[Cx64], cluster_radius: &[f64], t0: Cx64) -> Result<Vec<f64>> {
    bps.iter()
        .enumerate()
        .map(|(j, &b)| {
            let to_base = t0.dist_f64(b);
            if to_base <= 16.0 * f64::EPSILON * (1.0 + b.abs()) {
                return Err(Error::LoopConstruction(
                    "base point coincides with a branch point".into(),
                ));
            }
            let nn = bps
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &c)| b.dist_f64(c))
                .fold(f64::INFINITY, f64::min);
            let mut r = 0.25 * to_base;
            if nn.is_finite() {
                r = r.min(0.5 * nn);
            }
            if !cluster_radius.is_empty() {
                let floor = cluster_radius[j] * 3.0;
                if floor >= r {
                    return Err(Error::LoopConstruction(
                        "branch cluster too wide for a petal circle".into(),
                    ));
                }
                r = r.max(floor);
            }
            Ok(r)
        })
        .collect()
}

fn dedup_consecutive(pts: &mut Vec<Cx64>) {
    pts.dedup_by(|a, b| a.dist_f64(*b) < 1e-15 * (1.0 + a.abs()));
}

/// A small counterclockwise loop around an arbitrary point (not necessarily a
/// branch point), with the usual approach from the base.
pub fn puncture_loop(
    center: Cx64,
    bps: &[Cx64],
    radii_hint: &[f64],
    t0: Cx64,
    cfg: &Settings,
) -> Result<Loop> {
    let nearest_bp = bps
        .iter()
        .map(|&b| center.dist_f64(b))
        .fold(f64::INFINITY, f64::min);
    let r = (0.25 * t0.dist_f64(center)).min(0.5 * nearest_bp);
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::LoopConstruction("puncture loop radius collapsed".into()));
    }
    let radii = petal_radii(bps, radii_hint, t0)?;
    let obstacles: Vec<(Cx64, f64)> = bps.iter().zip(&radii).map(|(&c, &rc)| (c, rc)).collect();
    let to_base = t0 - center;
    let entry = center + to_base.scale(r / to_base.abs());
    let approach = approach_with_detours(t0, entry, &obstacles, t0)?;
    let mut waypoints = approach.clone();
    let phi0 = (entry - center).arg_f64();
    for k in 1..=cfg.k_seg {
        let phi = phi0 + 2.0 * std::f64::consts::PI * k as f64 / cfg.k_seg as f64;
        waypoints.push(center + Cx64::from_polar(r, phi));
    }
    let mut back = approach;
    back.reverse();
    waypoints.extend(back);
    dedup_consecutive(&mut waypoints);
    Ok(Loop {
        base: t0,
        waypoints,
        encircled: None,
    })
}

/// The big counterclockwise circle through `t0` centered at the origin,
/// enclosing every branch point when `|t0|` exceeds their magnitudes.
pub fn infinity_loop(t0: Cx64, cfg: &Settings) -> Loop {
    let r = t0.abs();
    let phi0 = t0.arg_f64();
    let segs = 2 * cfg.k_seg;
    let mut waypoints = Vec::with_capacity(segs + 1);
    for k in 0..=segs {
        let phi = phi0 + 2.0 * std::f64::consts::PI * k as f64 / segs as f64;
        waypoints.push(Cx64::from_polar(r, phi));
    }
    waypoints[0] = t0;
    let last = waypoints.len() - 1;
    waypoints[last] = t0;
    Loop {
        base: t0,
        waypoints,
        encircled: None,
    }
}

/// Analytic continuation of a labeled fiber along a polyline.
///
/// Steps are predictor/corrector: the previous root predicts, Newton on the
/// specialized polynomial corrects. A step is accepted only when every root's
/// correction converges and moves less than a third of the current fiber
/// separation; otherwise the step bisects, down to a floor of the total path
/// length, then errors with [`Error::StepCollapse`].
pub fn track_fiber<T: Real>(
    sliced: &SlicedFamily<T>,
    path: &[Cx64],
    start: &SliceFiber<T>,
    cfg: &Settings,
) -> Result<SliceFiber<T>> {
    if path.len() < 2 {
        return Ok(start.clone());
    }
    let total_len: f64 = path.windows(2).map(|w| w[0].dist_f64(w[1])).sum();
    if total_len == 0.0 {
        return Ok(start.clone());
    }
    let min_step = cfg.min_step_frac * total_len;
    let tols = tols_for::<T>();
    let mut cur_t64 = path[0];
    let mut roots = start.roots.clone();
    let mut min_sep = start.min_sep;
    debug_assert!(start.t.to_c64().dist_f64(path[0]) <= 1e-9 * (1.0 + path[0].abs()));

    for &target in &path[1..] {
        let mut stack = vec![target];
        while let Some(&tgt) = stack.last() {
            match try_step(sliced, tgt, &roots, min_sep, tols.newton_tol, cfg) {
                Some(new_roots) => {
                    roots = new_roots;
                    cur_t64 = tgt;
                    min_sep = min_separation(&roots);
                    stack.pop();
                }
                None => {
                    let gap = cur_t64.dist_f64(tgt);
                    if gap < min_step {
                        return Err(Error::StepCollapse {
                            at: format!("{:+.6e}{:+.6e}i", cur_t64.re, cur_t64.im),
                        });
                    }
                    let mid = (cur_t64 + tgt).scale(0.5);
                    stack.push(mid);
                }
            }
        }
    }
    let t = Cx::<T>::from_c64(cur_t64);
    let coeffs = sliced.coeffs_at(t);
    let residual = max_backward_residual(&coeffs, &roots);
    Ok(SliceFiber {
        t,
        roots,
        residual,
        min_sep,
    })
}

fn max_backward_residual<T: Real>(coeffs_desc: &[Cx<T>], roots: &[Cx<T>]) -> f64 {
    roots
        .iter()
        .map(|&z| {
            let mut acc = Cx::<T>::zero();
            let mut scale = 0.0f64;
            let zmag = z.to_c64().abs();
            for &c in coeffs_desc {
                acc = acc * z + c;
                scale = scale * zmag + c.to_c64().abs();
            }
            acc.to_c64().abs() / scale.max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// One tentative step of the whole fiber to `tgt`; `None` requests bisection.
fn try_step<T: Real>(
    sliced: &SlicedFamily<T>,
    tgt: Cx64,
    roots: &[Cx<T>],
    min_sep: f64,
    newton_tol: f64,
    cfg: &Settings,
) -> Option<Vec<Cx<T>>> {
    let t = Cx::<T>::from_c64(tgt);
    let coeffs = sliced.coeffs_at(t);
    let n = coeffs.len() - 1;
    let deriv: Vec<Cx<T>> = coeffs[..n]
        .iter()
        .enumerate()
        .map(|(k, &c)| c.scale(T::from_f64((n - k) as f64)))
        .collect();
    let move_cap = min_sep / 3.0;
    let mut out = Vec::with_capacity(roots.len());
    for &start in roots {
        let mut z = start;
        let mut converged = false;
        for _ in 0..cfg.newton_iters {
            let p = horner_desc(&coeffs, z);
            let dp = horner_desc(&deriv, z);
            if dp.to_c64().abs() == 0.0 {
                return None;
            }
            let step = p / dp;
            z = z - step;
            if step.to_c64().abs() <= newton_tol * (1.0 + z.to_c64().abs()) {
                converged = true;
                break;
            }
            if z.dist_f64(start) > 2.0 * move_cap {
                return None; // running away: bisect early
            }
        }
        if !converged || z.dist_f64(start) >= move_cap {
            return None;
        }
        out.push(z);
    }
    Some(out)
}

fn horner_desc<T: Real>(coeffs: &[Cx<T>], z: Cx<T>) -> Cx<T> {
    let mut acc = Cx::<T>::zero();
    for &c in coeffs {
        acc = acc * z + c;
    }
    acc
}

/// The permutation a loop induces: track the fiber around the loop and match
/// the end roots to the base labels by nearest neighbor. The matching must be
/// injective with every distance under a third of the base separation.
pub fn loop_permutation<T: Real>(
    sliced: &SlicedFamily<T>,
    lp: &Loop,
    base: &SliceFiber<T>,
    cfg: &Settings,
) -> Result<Perm> {
    let end = track_fiber(sliced, &lp.waypoints, base, cfg)?;
    match_to_base(&end, base)
}

pub fn match_to_base<T: Real>(end: &SliceFiber<T>, base: &SliceFiber<T>) -> Result<Perm> {
    let n = base.roots.len();
    let thresh = base.min_sep / 3.0;
    let mut images = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for (j, &ez) in end.roots.iter().enumerate() {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, &bz) in base.roots.iter().enumerate() {
            let d = ez.dist_f64(bz);
            if d < best.1 {
                best = (i, d);
            }
        }
        if best.1 >= thresh {
            return Err(Error::AmbiguousMatching(format!(
                "tracked root {j} is {:.3e} from its nearest base root (threshold {:.3e})",
                best.1, thresh
            )));
        }
        if used[best.0] {
            return Err(Error::AmbiguousMatching(format!(
                "two tracked roots matched base root {}",
                best.0 + 1
            )));
        }
        used[best.0] = true;
        images[j] = best.0;
    }
    Perm::from_images(images)
}

/// Permutation of a concatenation of loops, given each loop's permutation in
/// traversal order (the first loop acts first).
pub fn compose_in_path_order(perms: &[Perm], degree: usize) -> Perm {
    perms
        .iter()
        .fold(Perm::identity(degree), |acc, p| p.compose(&acc))
}

/// Base fiber, petal loops, and one permutation per loop: the generators of
/// the monodromy group over the slice.
#[derive(Clone, Debug)]
pub struct MonodromyRep<T: Real> {
    pub slice: SliceLine,
    pub base: SliceFiber<T>,
    pub branch: BranchPoints<T>,
    pub loops: Vec<Loop>,
    pub perms: Vec<Perm>,
    pub group: PermGroup,
    /// Integer radius of the base circle (also used by the sample grid).
    pub radius: i64,
}

/// Compute the monodromy representation of the family over a slice.
///
/// The slice is chosen from the seed when absent. The base point sits on a
/// circle of integer radius at least `2*(1 + max branch magnitude)`, at a
/// seed-determined angle, retried while the fiber is degenerate. Loops are
/// tracked concurrently and merged in loop order.
pub fn monodromy_group<T: Real>(
    fam: &AlgebraicFamily,
    slice: Option<SliceLine>,
    cfg: &Settings,
) -> Result<MonodromyRep<T>> {
    let bp = branch_poly(fam)?;
    monodromy_group_with(fam, &bp, slice, cfg)
}

pub fn monodromy_group_with<T: Real>(
    fam: &AlgebraicFamily,
    bp: &MultiPoly,
    slice: Option<SliceLine>,
    cfg: &Settings,
) -> Result<MonodromyRep<T>> {
    let slice = match slice {
        Some(s) => s,
        None => choose_slice_with(fam, bp, cfg.seed, cfg)?,
    };
    let sliced = SlicedFamily::<T>::new(fam, slice.clone(), bp)?;
    let branch = branch_points(&sliced, cfg)?;
    let radius = base_circle_radius(&branch);
    let (t0, base) = base_fiber_on_circle(&sliced, radius, cfg)?;
    monodromy_from_base(fam, bp, sliced, branch, radius, t0, base, cfg)
}

pub fn base_circle_radius<T: Real>(branch: &BranchPoints<T>) -> i64 {
    (2.0 * (1.0 + branch.max_magnitude())).ceil() as i64
}

/// Seed-determined base point on the circle of the given radius, retried on
/// [`Error::NearBranchLocus`].
pub fn base_fiber_on_circle<T: Real>(
    sliced: &SlicedFamily<T>,
    radius: i64,
    cfg: &Settings,
) -> Result<(Cx64, SliceFiber<T>)> {
    let mut rng = Rng::new(cfg.seed ^ 0xba5e_0a11);
    let mut last_err = None;
    for _ in 0..cfg.max_retries {
        let theta = 2.0 * std::f64::consts::PI * rng.unit();
        let t064 = Cx64::from_polar(radius as f64, theta);
        match slice_fiber_at(sliced, Cx::<T>::from_c64(t064), cfg) {
            Ok(f) => return Ok((t064, f)),
            Err(e @ Error::NearBranchLocus { .. }) | Err(e @ Error::RootsNoConverge { .. }) => {
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| {
        Error::DegenerateFamily("no usable base point found on the base circle".into())
    }))
}

#[allow(clippy::too_many_arguments)]
fn monodromy_from_base<T: Real>(
    _fam: &AlgebraicFamily,
    _bp: &MultiPoly,
    sliced: SlicedFamily<T>,
    branch: BranchPoints<T>,
    radius: i64,
    t0: Cx64,
    base: SliceFiber<T>,
    cfg: &Settings,
) -> Result<MonodromyRep<T>> {
    let loops = petal_loops(&branch.values_c64(), &branch.cluster_radius, t0, cfg)?;
    let perms = track_loops_concurrently(&sliced, &loops, &base, cfg)?;
    let group = PermGroup::new(sliced.n, perms.clone(), cfg.group_cap)?;
    Ok(MonodromyRep {
        slice: sliced.slice.clone(),
        base,
        branch,
        loops,
        perms,
        group,
        radius,
    })
}

/// Track the loops on scoped threads; results merge in loop order.
pub fn track_loops_concurrently<T: Real>(
    sliced: &SlicedFamily<T>,
    loops: &[Loop],
    base: &SliceFiber<T>,
    cfg: &Settings,
) -> Result<Vec<Perm>> {
    if loops.is_empty() {
        return Ok(vec![]);
    }
    let results: Vec<Result<Perm>> = std::thread::scope(|scope| {
        let handles: Vec<_> = loops
            .iter()
            .map(|lp| scope.spawn(move || loop_permutation(sliced, lp, base, cfg)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("tracker panicked")).collect()
    });
    results.into_iter().collect()
}

/// Local monodromy in a ball of radius `r` around `p`: a slice line through a
/// small offset of `p`, branch points confined to the ball, petal loops
/// confined likewise. The radius is halved until the group agrees between
/// `r` and `r/2`; the stabilized (smaller-radius) run is reported.
#[derive(Clone, Debug)]
pub struct LocalReport<T: Real> {
    pub center: Vec<Cx64>,
    /// Radius at which the group stabilized (the smaller of the agreeing pair).
    pub radius: f64,
    pub shrinks: u32,
    pub rep: MonodromyRep<T>,
    pub orbits: Vec<Vec<usize>>,
}

pub fn local_monodromy<T: Real>(
    fam: &AlgebraicFamily,
    p: &[Cx64],
    r: f64,
    cfg: &Settings,
) -> Result<LocalReport<T>> {
    if !(r > 0.0) {
        return Err(Error::BadInput("local radius must be positive".into()));
    }
    if p.len() != fam.vars.len() {
        return Err(Error::BadInput(format!(
            "point has {} coordinates, family has {} variables",
            p.len(),
            fam.vars.len()
        )));
    }
    let bp = branch_poly(fam)?;
    let mut radius = r;
    let mut prev: Option<(usize, Vec<usize>, MonodromyRep<T>)> = None;
    for shrink in 0..=cfg.max_shrinks {
        let run = local_run::<T>(fam, &bp, p, radius, cfg)?;
        let orbit_sizes: Vec<usize> = {
            let mut v: Vec<usize> = run.group.orbits().iter().map(|o| o.len()).collect();
            v.sort();
            v
        };
        let order = run.group.order()?;
        if let Some((prev_order, prev_sizes, prev_rep)) = prev.take() {
            if prev_order == order && prev_sizes == orbit_sizes {
                let orbits = run.group.orbits();
                let _ = prev_rep;
                return Ok(LocalReport {
                    center: p.to_vec(),
                    radius,
                    shrinks: shrink.saturating_sub(1),
                    rep: run,
                    orbits,
                });
            }
        }
        prev = Some((order, orbit_sizes, run));
        radius *= 0.5;
    }
    Err(Error::NonStabilized {
        shrinks: cfg.max_shrinks,
    })
}

/// One local monodromy computation at a fixed radius.
fn local_run<T: Real>(
    fam: &AlgebraicFamily,
    bp: &MultiPoly,
    p: &[Cx64],
    r: f64,
    cfg: &Settings,
) -> Result<MonodromyRep<T>> {
    let nvars = fam.vars.len();
    let mut rng = Rng::new(cfg.seed ^ 0x10ca1_5eed ^ f64_bits(r));
    let mut last_err: Option<Error> = None;
    'attempt: for _ in 0..cfg.max_retries {
        // exact slice through p + delta*u in seeded direction d
        let delta = r * cfg.offset_frac;
        let u: Vec<Cx64> = unit_seeded(&mut rng, nvars);
        let d: Vec<Cx64> = unit_seeded(&mut rng, nvars);
        let origin: Vec<GaussRat> = p
            .iter()
            .zip(&u)
            .map(|(pp, uu)| {
                GaussRat::from_parts(
                    f64_to_rational(pp.re + delta * uu.re),
                    f64_to_rational(pp.im + delta * uu.im),
                )
            })
            .collect();
        let direction: Vec<GaussRat> = d
            .iter()
            .map(|dd| GaussRat::from_parts(f64_to_rational(dd.re), f64_to_rational(dd.im)))
            .collect();
        let slice = SliceLine { origin, direction };
        let sliced = match SlicedFamily::<T>::new(fam, slice, bp) {
            Ok(s) => s,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        // the t-disk that keeps o + t*d within distance r of p
        let a: Vec<Cx64> = u.iter().map(|uu| uu.scale(delta)).collect(); // o - p
        let dd2: f64 = d.iter().map(|z| z.norm_sqr()).sum();
        let cross: Cx64 = d
            .iter()
            .zip(&a)
            .fold(Cx64::zero(), |acc, (di, ai)| acc + *di * ai.conj());
        let t_center = -(cross.conj()).scale(1.0 / dd2);
        let a2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let min_dist2 = (a2 - cross.norm_sqr() / dd2).max(0.0);
        if r * r <= min_dist2 {
            last_err = Some(Error::LoopConstruction("slice misses the local ball".into()));
            continue;
        }
        let t_radius = ((r * r - min_dist2) / dd2).sqrt();
        // keep branch points inside the disk
        let all = branch_points(&sliced, cfg)?;
        let mut kept: Vec<Cx<T>> = Vec::new();
        let mut kept_radius: Vec<f64> = Vec::new();
        for (v, cr) in all.values.iter().zip(&all.cluster_radius) {
            if v.to_c64().dist_f64(t_center) <= 0.98 * t_radius {
                kept.push(*v);
                kept_radius.push(*cr);
            }
        }
        let branch = BranchPoints {
            values: kept,
            cluster_radius: kept_radius,
        };
        // base point inside the disk, away from the kept branch points
        let mut base_rng = Rng::new(cfg.seed ^ 0xba5e_10ca ^ f64_bits(r));
        for _ in 0..cfg.max_retries {
            let theta = 2.0 * std::f64::consts::PI * base_rng.unit();
            let t064 = t_center + Cx64::from_polar(0.8 * t_radius, theta);
            let near_branch = branch
                .values_c64()
                .iter()
                .any(|&b| t064.dist_f64(b) < 0.1 * t_radius);
            if near_branch {
                continue;
            }
            let base = match slice_fiber_at(&sliced, Cx::<T>::from_c64(t064), cfg) {
                Ok(f) => f,
                Err(e @ Error::NearBranchLocus { .. }) => {
                    last_err = Some(e);
                    continue;
                }
                Err(e) => return Err(e),
            };
            // petals with radii capped to stay inside the disk
            let values64 = branch.values_c64();
            let caps: Vec<f64> = values64
                .iter()
                .map(|&b| 0.9 * (t_radius - b.dist_f64(t_center)))
                .collect();
            match petal_loops_capped(&values64, &branch.cluster_radius, t064, &caps, cfg) {
                Ok(loops) => {
                    // every waypoint stays inside the t-disk
                    for lp in &loops {
                        for w in &lp.waypoints {
                            if w.dist_f64(t_center) > t_radius * 1.001 {
                                last_err = Some(Error::LoopConstruction(
                                    "petal escaped the local ball".into(),
                                ));
                                continue 'attempt;
                            }
                        }
                    }
                    let perms = track_loops_concurrently(&sliced, &loops, &base, cfg)?;
                    let group = PermGroup::new(sliced.n, perms.clone(), cfg.group_cap)?;
                    return Ok(MonodromyRep {
                        slice: sliced.slice.clone(),
                        base,
                        branch,
                        loops,
                        perms,
                        group,
                        radius: t_radius.ceil() as i64,
                    });
                }
                Err(e) => {
                    last_err = Some(e);
                    continue;
                }
            }
        }
    }
    Err(last_err
        .unwrap_or_else(|| Error::DegenerateFamily("local monodromy setup failed".into())))
}

fn petal_loops_capped(
    bps: &[Cx64],
    cluster_radius: &[f64],
    t0: Cx64,
    caps: &[f64],
    cfg: &Settings,
) -> Result<Vec<Loop>> {
    // same construction as `petal_loops` but with extra per-petal radius caps
    let mut radii = petal_radii(bps, cluster_radius, t0)?;
    for (r, &cap) in radii.iter_mut().zip(caps) {
        if cap <= 0.0 {
            return Err(Error::LoopConstruction(
                "branch point too close to the ball boundary".into(),
            ));
        }
        *r = r.min(cap);
    }
    let mut loops = Vec::with_capacity(bps.len());
    for (j, (&b, &r)) in bps.iter().zip(&radii).enumerate() {
        let to_base = t0 - b;
        let entry = b + to_base.scale(r / to_base.abs());
        let obstacles: Vec<(Cx64, f64)> = bps
            .iter()
            .zip(&radii)
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, (&c, &rc))| (c, rc))
            .collect();
        let approach = approach_with_detours(t0, entry, &obstacles, t0)?;
        let mut waypoints = approach.clone();
        let phi0 = (entry - b).arg_f64();
        for k in 1..=cfg.k_seg {
            let phi = phi0 + 2.0 * std::f64::consts::PI * k as f64 / cfg.k_seg as f64;
            waypoints.push(b + Cx64::from_polar(r, phi));
        }
        let mut back = approach;
        back.reverse();
        waypoints.extend(back);
        dedup_consecutive(&mut waypoints);
        loops.push(Loop {
            base: t0,
            waypoints,
            encircled: Some(j),
        });
    }
    loops.sort_by(|x, y| {
        let ax = (bps[x.encircled.unwrap()] - t0).arg_f64();
        let ay = (bps[y.encircled.unwrap()] - t0).arg_f64();
        ax.partial_cmp(&ay).unwrap()
    });
    Ok(loops)
}

fn unit_seeded(rng: &mut Rng, n: usize) -> Vec<Cx64> {
    let mut v: Vec<Cx64> = (0..n)
        .map(|_| Cx64::new(rng.unit() * 2.0 - 1.0, rng.unit() * 2.0 - 1.0))
        .collect();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-6 {
        v[0] = Cx64::one();
        return v;
    }
    for z in &mut v {
        *z = z.scale(1.0 / norm);
    }
    v
}

fn f64_bits(v: f64) -> u64 {
    v.to_bits()
}

/// Orbit partition of the local group: one orbit per ramified germ, with the
/// orbit size as the germ's local degree.
pub fn ramified_germs<T: Real>(report: &LocalReport<T>) -> Vec<Vec<usize>> {
    report.orbits.clone()
}

#[cfg(test)]
mod tests;
