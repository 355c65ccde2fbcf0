//! The constructive half: express roots of solvable-monodromy families in
//! radicals by resolvent descent along the derived series, recognize
//! monodromy-invariant elements as exact rational functions, and certify
//! unsolvability otherwise.

mod expr;
mod fit;

pub use expr::{CxPair, RNode, RadicalExpr};
pub use fit::{fit_rational, FitOutcome, RatFn, RatRep};

use crate::config::{tols_for, Settings, Tols};
use crate::error::{Error, Result};
use crate::exact::{ExactCoef, GaussRat};
use crate::groups::{quotient_characters, CharacterTable, DerivedSeries, Perm, PermGroup, Terminal};
use crate::monodromy::{track_fiber, MonodromyRep, SliceFiber, SlicedFamily};
use crate::num::{Cx, Cx64, Real};
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

/// Element of the root field as an expression DAG: leaves are labeled root
/// germs or exact rational functions of the slice parameter; the group acts
/// by relabeling leaves.
#[derive(Clone, Debug)]
pub struct FieldElem(Rc<FNode>);

#[derive(Debug)]
enum FNode {
    /// The i-th root germ (0-based label in the base fiber).
    Root(usize),
    Rat(RatFn),
    Sum(Vec<(ExactCoef, FieldElem)>),
    Mul(FieldElem, FieldElem),
    Quot(FieldElem, FieldElem),
    Pow(FieldElem, u32),
}

impl FieldElem {
    pub fn root(i: usize) -> FieldElem {
        FieldElem(Rc::new(FNode::Root(i)))
    }
    pub fn rat(r: RatFn) -> FieldElem {
        FieldElem(Rc::new(FNode::Rat(r)))
    }
    pub fn parameter() -> FieldElem {
        Self::rat(RatFn::parameter())
    }
    pub fn scaled_sum(terms: Vec<(ExactCoef, FieldElem)>) -> FieldElem {
        FieldElem(Rc::new(FNode::Sum(terms)))
    }
    pub fn add(a: FieldElem, b: FieldElem) -> FieldElem {
        Self::scaled_sum(vec![(ExactCoef::one(), a), (ExactCoef::one(), b)])
    }
    pub fn sub(a: FieldElem, b: FieldElem) -> FieldElem {
        Self::scaled_sum(vec![
            (ExactCoef::one(), a),
            (ExactCoef::from_ratio(-1, 1), b),
        ])
    }
    pub fn mul(a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(Rc::new(FNode::Mul(a, b)))
    }
    pub fn quot(a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(Rc::new(FNode::Quot(a, b)))
    }
    pub fn pow(&self, e: u32) -> FieldElem {
        FieldElem(Rc::new(FNode::Pow(self.clone(), e)))
    }

    fn key(&self) -> usize {
        Rc::as_ptr(&self.0) as usize
    }

    /// Evaluate with the given labeled fiber at parameter `t`.
    pub fn eval<T: Real>(&self, roots: &[Cx<T>], t: Cx<T>) -> Cx<T> {
        let mut memo = HashMap::new();
        self.eval_memo(roots, t, &mut memo)
    }

    fn eval_memo<T: Real>(
        &self,
        roots: &[Cx<T>],
        t: Cx<T>,
        memo: &mut HashMap<usize, Cx<T>>,
    ) -> Cx<T> {
        if let Some(&v) = memo.get(&self.key()) {
            return v;
        }
        let v = match &*self.0 {
            FNode::Root(i) => roots[*i],
            FNode::Rat(r) => r.eval(t),
            FNode::Sum(terms) => {
                let mut acc = Cx::<T>::zero();
                for (c, e) in terms {
                    let cv: Cx<T> = c.eval();
                    acc = acc + cv * e.eval_memo(roots, t, memo);
                }
                acc
            }
            FNode::Mul(a, b) => a.eval_memo(roots, t, memo) * b.eval_memo(roots, t, memo),
            FNode::Quot(a, b) => a.eval_memo(roots, t, memo) / b.eval_memo(roots, t, memo),
            FNode::Pow(a, e) => a.eval_memo(roots, t, memo).powu(*e),
        };
        memo.insert(self.key(), v);
        v
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            FNode::Root(i) => write!(f, "y{}", i + 1),
            FNode::Rat(r) => write!(f, "{r}"),
            FNode::Sum(terms) => {
                for (k, (c, e)) in terms.iter().enumerate() {
                    if k > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "({c})*{e}")?;
                }
                Ok(())
            }
            FNode::Mul(a, b) => write!(f, "({a})*({b})"),
            FNode::Quot(a, b) => write!(f, "({a})/({b})"),
            FNode::Pow(a, e) => write!(f, "({a})^{e}"),
        }
    }
}

/// Relabel root symbols by a permutation: the field automorphism a loop
/// induces. Rational leaves are shared untouched; evaluation of `act(p, e)`
/// with base labels equals evaluating `e` with permuted labels.
pub fn act(p: &Perm, e: &FieldElem) -> Result<FieldElem> {
    let mut memo = HashMap::new();
    act_memo(p, e, &mut memo)
}

fn act_memo(p: &Perm, e: &FieldElem, memo: &mut HashMap<usize, FieldElem>) -> Result<FieldElem> {
    if let Some(hit) = memo.get(&e.key()) {
        return Ok(hit.clone());
    }
    let out = match &*e.0 {
        FNode::Root(i) => {
            if *i >= p.degree() {
                return Err(Error::DegreeMismatch(*i + 1, p.degree()));
            }
            FieldElem::root(p.apply(*i))
        }
        FNode::Rat(_) => e.clone(),
        FNode::Sum(terms) => {
            let mapped: Vec<(ExactCoef, FieldElem)> = terms
                .iter()
                .map(|(c, t)| Ok((c.clone(), act_memo(p, t, memo)?)))
                .collect::<Result<_>>()?;
            FieldElem::scaled_sum(mapped)
        }
        FNode::Mul(a, b) => FieldElem::mul(act_memo(p, a, memo)?, act_memo(p, b, memo)?),
        FNode::Quot(a, b) => FieldElem::quot(act_memo(p, a, memo)?, act_memo(p, b, memo)?),
        FNode::Pow(a, k) => act_memo(p, a, memo)?.pow(*k),
    };
    memo.insert(e.key(), out.clone());
    Ok(out)
}

/// Base point plus labeled fibers at sample points on a circle, with the
/// stored polyline paths that transported the labels there.
#[derive(Clone, Debug)]
pub struct GridSample<T: Real> {
    pub t: Cx<T>,
    /// Scaled coordinate `t / radius`, used by the rational fits.
    pub w: Cx<T>,
    pub path: Vec<Cx64>,
    pub fiber: SliceFiber<T>,
}

#[derive(Clone, Debug)]
pub struct SampleGrid<T: Real> {
    pub t0: Cx64,
    pub radius: i64,
    pub base: SliceFiber<T>,
    pub samples: Vec<GridSample<T>>,
}

impl<T: Real> SampleGrid<T> {
    /// Build a grid of `count` samples on the base circle. Labels at each
    /// sample are the continuation of the base labels along stored arcs;
    /// tracking happens incrementally around the circle once.
    pub fn build(
        sliced: &SlicedFamily<T>,
        t0: Cx64,
        radius: i64,
        base: &SliceFiber<T>,
        count: usize,
        jitter: f64,
        cfg: &Settings,
    ) -> Result<SampleGrid<T>> {
        let r = radius as f64;
        let theta0 = t0.arg_f64();
        let step = std::f64::consts::PI / cfg.k_seg as f64;
        let mut samples = Vec::with_capacity(count);
        let mut cur_fiber = base.clone();
        let mut cur_angle = 0.0f64; // offset from theta0
        let mut full_path: Vec<Cx64> = vec![t0];
        for s in 0..count {
            let target = 2.0 * std::f64::consts::PI * (s as f64 + 1.0 + 0.5 * jitter)
                / (count as f64 + 1.0);
            // extend the arc from cur_angle to target
            let mut seg: Vec<Cx64> = vec![*full_path.last().unwrap()];
            let mut a = cur_angle;
            while a + step < target {
                a += step;
                seg.push(Cx64::from_polar(r, theta0 + a));
            }
            seg.push(Cx64::from_polar(r, theta0 + target));
            cur_fiber = track_fiber(sliced, &seg, &cur_fiber, cfg)?;
            full_path.extend_from_slice(&seg[1..]);
            cur_angle = target;
            let radius_t = Cx::new(T::from_f64(r), T::zero());
            samples.push(GridSample {
                t: cur_fiber.t,
                w: cur_fiber.t / radius_t,
                path: full_path.clone(),
                fiber: cur_fiber.clone(),
            });
        }
        Ok(SampleGrid {
            t0,
            radius,
            base: base.clone(),
            samples,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Values of an element across the grid (and at the base point).
pub fn eval_on_grid<T: Real>(e: &FieldElem, grid: &SampleGrid<T>) -> (Vec<Cx<T>>, Cx<T>) {
    let vals = grid
        .samples
        .iter()
        .map(|s| e.eval(&s.fiber.roots, s.t))
        .collect();
    let base = e.eval(&grid.base.roots, grid.base.t);
    (vals, base)
}

fn grid_magnitude<T: Real>(vals: &[Cx<T>]) -> f64 {
    vals.iter().map(|v| v.to_c64().abs()).fold(0.0, f64::max)
}

/// True when the element is fixed by every generator of `h` at every grid
/// sample, to the given relative tolerance.
pub fn is_invariant<T: Real>(
    e: &FieldElem,
    h: &PermGroup,
    grid: &SampleGrid<T>,
    tol: f64,
) -> Result<bool> {
    let (vals, _) = eval_on_grid(e, grid);
    let scale = 1.0f64.max(grid_magnitude(&vals));
    for g in h.generators() {
        let moved = act(g, e)?;
        let (mvals, _) = eval_on_grid(&moved, grid);
        for (a, b) in mvals.iter().zip(&vals) {
            if (*a - *b).to_c64().abs() > tol * scale {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One character component of a resolvent split.
#[derive(Clone, Debug)]
pub struct SplitComponent<T: Real> {
    pub char_index: usize,
    /// Order of the character: the radical degree this component needs.
    pub char_order: u32,
    pub elem: FieldElem,
    pub value_t0: Cx<T>,
    pub grid_magnitude: f64,
}

/// Residual diagnostics of one split, reported and asserted by the tower.
#[derive(Clone, Debug)]
pub struct SplitRecord {
    pub level: usize,
    pub quotient_order: usize,
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
    pub reassembly_residual: f64,
    pub eigen_residual: f64,
    pub power_residual: f64,
}

/// Split a fixed element of the current level into character components of
/// the abelian quotient: `f_chi = (1/|A|) sum_a chi(a)^{-1} act(rep_a, f)`.
///
/// Components reassemble to `f` and each is an eigenvector of the quotient
/// action; both facts are measured on the grid, and a failed eigenvector
/// check aborts with [`Error::EigenCheckFailed`]. Components below the drop
/// tolerance are dropped and recorded.
pub fn resolvent_split<T: Real>(
    f: &FieldElem,
    table: &CharacterTable,
    grid: &SampleGrid<T>,
    cfg: &Settings,
    tols: &Tols,
) -> Result<(Vec<SplitComponent<T>>, SplitRecord)> {
    let m = table.quotient_order;
    let moved: Vec<FieldElem> = table
        .reps
        .iter()
        .map(|rep| act(rep, f))
        .collect::<Result<_>>()?;
    let inv_m = GaussRat::from_ratio(1, m as i64);
    let (fvals, _fbase) = eval_on_grid(f, grid);
    let scale = 1.0f64.max(grid_magnitude(&fvals));

    let mut components = Vec::with_capacity(m);
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut sum_vals = vec![Cx::<T>::zero(); grid.len()];
    let mut eigen_residual = 0.0f64;

    for chi in 0..m {
        let terms: Vec<(ExactCoef, FieldElem)> = (0..m)
            .map(|a| {
                (
                    ExactCoef::with_zeta(inv_m.clone(), table.values[chi][a].inv()),
                    moved[a].clone(),
                )
            })
            .collect();
        let comp = FieldElem::scaled_sum(terms);
        let (cvals, cbase) = eval_on_grid(&comp, grid);
        for (acc, v) in sum_vals.iter_mut().zip(&cvals) {
            *acc = *acc + *v;
        }
        let mag = grid_magnitude(&cvals);
        if mag < cfg.drop_tol * scale {
            dropped.push(chi);
            continue;
        }
        // eigenvector property: act(rep_a, comp) == chi(a) * comp on the grid
        let comp_scale = 1.0f64.max(mag);
        for a in 1..m {
            let moved_comp = act(&table.reps[a], &comp)?;
            let (mvals, _) = eval_on_grid(&moved_comp, grid);
            let chi_a: Cx<T> = table.values[chi][a].eval();
            for (mv, cv) in mvals.iter().zip(&cvals) {
                let resid = (*mv - chi_a * *cv).to_c64().abs() / comp_scale;
                eigen_residual = eigen_residual.max(resid);
            }
        }
        kept.push(chi);
        components.push(SplitComponent {
            char_index: chi,
            char_order: table.character_order(chi),
            elem: comp,
            value_t0: cbase,
            grid_magnitude: mag,
        });
    }
    let reassembly_residual = fvals
        .iter()
        .zip(&sum_vals)
        .map(|(a, b)| (*a - *b).to_c64().abs())
        .fold(0.0, f64::max)
        / scale;
    if eigen_residual > tols.eigen_tol {
        return Err(Error::EigenCheckFailed {
            residual: eigen_residual,
        });
    }
    if reassembly_residual > tols.reassembly_tol {
        return Err(Error::EigenCheckFailed {
            residual: reassembly_residual,
        });
    }
    Ok((
        components,
        SplitRecord {
            level: 0, // caller fills in
            quotient_order: m,
            kept,
            dropped,
            reassembly_residual,
            eigen_residual,
            power_residual: 0.0, // caller fills in
        },
    ))
}

/// Outcome of a rational reconstruction.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub rep: RatRep,
    pub num_degree: usize,
    pub den_degree: usize,
    pub holdout_residual: f64,
}

/// Recognize a monodromy-invariant element as an exact rational function of
/// the slice parameter by interpolation on the grid with held-out
/// validation. Coefficients are snapped to Gaussian rationals when they
/// round cleanly; otherwise the floating fit is kept and flagged.
pub fn rational_reconstruct<T: Real>(
    f: &FieldElem,
    grid: &SampleGrid<T>,
    cap: usize,
    tols: &Tols,
) -> Result<Reconstruction> {
    let (vals, _) = eval_on_grid(f, grid);
    let ws: Vec<Cx<T>> = grid.samples.iter().map(|s| s.w).collect();
    let out = fit_rational(&ws, &vals, grid.radius, cap, tols)?;
    Ok(Reconstruction {
        num_degree: out.num_degree,
        den_degree: out.den_degree,
        holdout_residual: out.holdout_residual,
        rep: out.rep,
    })
}

/// A dropped resolvent component, listed in reports.
#[derive(Clone, Debug)]
pub struct DroppedComponent {
    pub level: usize,
    pub char_index: usize,
    pub grid_magnitude: f64,
}

/// A finished tower with its construction diagnostics and verification
/// residuals.
#[derive(Clone, Debug)]
pub struct TowerBuild {
    pub expr: RadicalExpr,
    pub splits: Vec<SplitRecord>,
    pub dropped: Vec<DroppedComponent>,
    pub residual_at_base: f64,
    pub max_residual: f64,
    pub samples_checked: usize,
    pub all_exact: bool,
}

struct TowerCtx<'a, T: Real> {
    chain: &'a [PermGroup],
    tables: Vec<CharacterTable>,
    grid: &'a SampleGrid<T>,
    cfg: &'a Settings,
    tols: Tols,
    splits: Vec<SplitRecord>,
    dropped: Vec<DroppedComponent>,
}

impl<T: Real> TowerCtx<'_, T> {
    /// `f` is fixed by `chain[level]`; express it in radicals over the
    /// rational functions.
    fn express(&mut self, f: &FieldElem, level: usize) -> Result<RadicalExpr> {
        if level == 0 {
            let rec = rational_reconstruct(f, self.grid, self.cfg.degree_cap, &self.tols)?;
            return Ok(RadicalExpr::rat(rec.rep));
        }
        let table = &self.tables[level - 1];
        let (components, mut record) =
            resolvent_split(f, table, self.grid, self.cfg, &self.tols)?;
        record.level = level;
        // power invariance: each kept component's e-th power drops a level
        let parent = &self.chain[level - 1];
        let mut power_residual = 0.0f64;
        let mut terms: Vec<(ExactCoef, RadicalExpr)> = Vec::with_capacity(components.len());
        for comp in &components {
            let e = comp.char_order;
            if e == 1 {
                // invariant component: no root needed
                let child = self.express(&comp.elem, level - 1)?;
                terms.push((ExactCoef::one(), child));
                continue;
            }
            let g = comp.elem.pow(e);
            let (gvals, _) = eval_on_grid(&g, self.grid);
            let gscale = 1.0f64.max(grid_magnitude(&gvals));
            for gen in parent.generators() {
                let hg = act(gen, &g)?;
                let (hvals, _) = eval_on_grid(&hg, self.grid);
                for (a, b) in hvals.iter().zip(&gvals) {
                    power_residual =
                        power_residual.max((*a - *b).to_c64().abs() / gscale);
                }
            }
            let child = self.express(&g, level - 1)?;
            terms.push((
                ExactCoef::one(),
                RadicalExpr::root(e, child, CxPair::from_cx(comp.value_t0)),
            ));
        }
        if power_residual > self.tols.eigen_tol {
            return Err(Error::EigenCheckFailed {
                residual: power_residual,
            });
        }
        record.power_residual = power_residual;
        for &chi in &record.dropped {
            self.dropped.push(DroppedComponent {
                level,
                char_index: chi,
                grid_magnitude: 0.0,
            });
        }
        self.splits.push(record);
        Ok(RadicalExpr::sum(terms))
    }
}

/// Build and verify a radical expression for the first root germ of a family
/// with solvable monodromy.
///
/// Descends the derived series: split by the characters of each abelian
/// quotient, take the character-order power of each kept component one level
/// down, and reconstruct rational functions at the bottom. Root branches are
/// pinned at the base point; verification transports them along every grid
/// path and compares with the tracked root.
pub fn radical_tower<T: Real>(
    rep: &MonodromyRep<T>,
    series: &DerivedSeries,
    grid: &SampleGrid<T>,
    cfg: &Settings,
) -> Result<TowerBuild> {
    match series.terminal {
        Terminal::Solvable { .. } => {}
        Terminal::Perfect { core_order } => {
            return Err(Error::WrongTerminal(format!(
                "monodromy has a perfect core of order {core_order}; no radical tower exists"
            )))
        }
    }
    let chain = &series.chain;
    debug_assert_eq!(chain[0].degree(), rep.group.degree());
    let tables: Vec<CharacterTable> = chain
        .windows(2)
        .map(|w| quotient_characters(&w[0], &w[1]))
        .collect::<Result<_>>()?;
    let tols = tols_for::<T>();
    let mut ctx = TowerCtx {
        chain,
        tables,
        grid,
        cfg,
        tols,
        splits: Vec::new(),
        dropped: Vec::new(),
    };
    let target = FieldElem::root(0);
    let expr = ctx.express(&target, chain.len() - 1)?;

    // verification: base point, then every grid sample along its path
    let scale = 1.0
        + grid
            .samples
            .iter()
            .map(|s| grid_magnitude(&s.fiber.roots))
            .fold(grid_magnitude(&grid.base.roots), f64::max);
    let at_base: Cx<T> = expr.eval_at_base(grid.t0)?;
    let residual_at_base = (at_base - grid.base.roots[0]).to_c64().abs();
    let mut max_residual = residual_at_base;
    for s in &grid.samples {
        let v: Cx<T> = expr.eval_along_path(&s.path, cfg)?;
        let r = (v - s.fiber.roots[0]).to_c64().abs();
        max_residual = max_residual.max(r);
    }
    if max_residual > tols.verify_tol * scale {
        return Err(Error::VerificationFailed {
            residual: max_residual,
            tol: tols.verify_tol * scale,
        });
    }
    let all_exact = expr.all_rationals_exact();
    Ok(TowerBuild {
        expr,
        splits: ctx.splits,
        dropped: ctx.dropped,
        residual_at_base,
        max_residual,
        samples_checked: grid.len() + 1,
        all_exact,
    })
}

/// Witness that no radical expression exists: the derived series of the
/// monodromy group stabilizes at a nontrivial perfect subgroup.
#[derive(Clone, Debug)]
pub struct UnsolvabilityCertificate {
    pub generators: Vec<Perm>,
    pub chain_orders: Vec<usize>,
    pub core_order: usize,
    pub core_generators: Vec<Perm>,
}

pub fn unsolvability_certificate<T: Real>(
    rep: &MonodromyRep<T>,
    series: &DerivedSeries,
) -> Result<UnsolvabilityCertificate> {
    let Terminal::Perfect { core_order } = series.terminal else {
        return Err(Error::WrongTerminal(
            "certificate requires a derived series stabilizing above the identity".into(),
        ));
    };
    let chain_orders = series.chain_orders()?;
    let k = chain_orders.len();
    debug_assert!(k >= 2 && chain_orders[k - 1] == chain_orders[k - 2] && core_order > 1);
    let core = series.chain.last().expect("nonempty chain");
    Ok(UnsolvabilityCertificate {
        generators: rep.perms.clone(),
        chain_orders,
        core_order,
        core_generators: core.generators().to_vec(),
    })
}

#[cfg(test)]
mod tests;
