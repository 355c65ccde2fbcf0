//! Radical expression trees: rational leaves combined by arithmetic and
//! k-th roots with pinned branch values. Evaluation away from the base point
//! transports every branch along a path, bisecting adaptively so no root
//! node ever jumps sheets.

use crate::config::{tols_for, Settings};
use crate::error::{Error, Result};
use crate::exact::{
    decimal_string, parse_decimal, ExactCoef, GaussRat, RootOfUnity,
};
use crate::num::{kth_root_near, Cx, Cx64, Real};
use crate::polyalg::UniPoly;
use num_rational::BigRational;
use serde_json::{json, Value};
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use super::fit::{RatFn, RatRep};

/// A complex value stored as two double-double components, so both working
/// precisions round-trip losslessly.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CxPair {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl CxPair {
    pub fn from_cx<T: Real>(v: Cx<T>) -> CxPair {
        let split = |x: T| {
            let hi = x.to_f64();
            let lo = (x - T::from_f64(hi)).to_f64();
            (hi, lo)
        };
        CxPair {
            re: split(v.re),
            im: split(v.im),
        }
    }
    pub fn to_cx<T: Real>(self) -> Cx<T> {
        Cx::new(
            T::from_f64(self.re.0) + T::from_f64(self.re.1),
            T::from_f64(self.im.0) + T::from_f64(self.im.1),
        )
    }
    pub fn to_c64(self) -> Cx64 {
        Cx64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
    fn part_to_rational(p: (f64, f64)) -> BigRational {
        BigRational::from_float(p.0).unwrap_or_else(|| BigRational::from_float(0.0).unwrap())
            + BigRational::from_float(p.1).unwrap_or_else(|| BigRational::from_float(0.0).unwrap())
    }
    /// High-precision decimal pair `(re, im)`.
    pub fn decimal_pair(&self) -> (String, String) {
        (
            decimal_string(&Self::part_to_rational(self.re), 36),
            decimal_string(&Self::part_to_rational(self.im), 36),
        )
    }
    pub fn from_decimal_pair(re: &str, im: &str) -> Result<CxPair> {
        let conv = |s: &str| -> Result<(f64, f64)> {
            let r = parse_decimal(s)?;
            let hi = num_traits::ToPrimitive::to_f64(&r)
                .ok_or_else(|| Error::BadInput(format!("unreadable decimal `{s}`")))?;
            let rem = &r - BigRational::from_float(hi).unwrap();
            let lo = num_traits::ToPrimitive::to_f64(&rem).unwrap_or(0.0);
            Ok((hi, lo))
        };
        Ok(CxPair {
            re: conv(re)?,
            im: conv(im)?,
        })
    }
}

/// Expression tree of rational functions, arithmetic, and branch-pinned
/// roots. Leaves carry exact (or flagged floating) rational functions of the
/// slice parameter.
#[derive(Clone, Debug)]
pub struct RadicalExpr(Rc<RNode>);

#[derive(Debug)]
pub enum RNode {
    Rat(RatRep),
    Sum(Vec<(ExactCoef, RadicalExpr)>),
    Mul(RadicalExpr, RadicalExpr),
    Quot(RadicalExpr, RadicalExpr),
    Pow(RadicalExpr, u32),
    Root {
        degree: u32,
        child: RadicalExpr,
        /// Chosen complex value of the root at the base point.
        branch: CxPair,
    },
}

impl RadicalExpr {
    pub fn rat(rep: RatRep) -> Self {
        RadicalExpr(Rc::new(RNode::Rat(rep)))
    }
    pub fn exact_rat(r: RatFn) -> Self {
        Self::rat(RatRep::Exact(r))
    }
    pub fn sum(terms: Vec<(ExactCoef, RadicalExpr)>) -> Self {
        RadicalExpr(Rc::new(RNode::Sum(terms)))
    }
    pub fn mul(a: RadicalExpr, b: RadicalExpr) -> Self {
        RadicalExpr(Rc::new(RNode::Mul(a, b)))
    }
    pub fn quot(a: RadicalExpr, b: RadicalExpr) -> Self {
        RadicalExpr(Rc::new(RNode::Quot(a, b)))
    }
    pub fn pow(a: RadicalExpr, e: u32) -> Self {
        RadicalExpr(Rc::new(RNode::Pow(a, e)))
    }
    pub fn root(degree: u32, child: RadicalExpr, branch: CxPair) -> Self {
        RadicalExpr(Rc::new(RNode::Root {
            degree,
            child,
            branch,
        }))
    }
    pub fn node(&self) -> &RNode {
        &self.0
    }

    /// Max nesting depth of root nodes.
    pub fn depth(&self) -> usize {
        match self.node() {
            RNode::Rat(_) => 0,
            RNode::Sum(terms) => terms.iter().map(|(_, e)| e.depth()).max().unwrap_or(0),
            RNode::Mul(a, b) | RNode::Quot(a, b) => a.depth().max(b.depth()),
            RNode::Pow(a, _) => a.depth(),
            RNode::Root { child, .. } => 1 + child.depth(),
        }
    }

    pub fn count_roots(&self) -> usize {
        match self.node() {
            RNode::Rat(_) => 0,
            RNode::Sum(terms) => terms.iter().map(|(_, e)| e.count_roots()).sum(),
            RNode::Mul(a, b) | RNode::Quot(a, b) => a.count_roots() + b.count_roots(),
            RNode::Pow(a, _) => a.count_roots(),
            RNode::Root { child, .. } => 1 + child.count_roots(),
        }
    }

    pub fn root_degrees(&self) -> Vec<u32> {
        let mut out = Vec::new();
        fn go(e: &RadicalExpr, out: &mut Vec<u32>) {
            match e.node() {
                RNode::Rat(_) => {}
                RNode::Sum(terms) => terms.iter().for_each(|(_, e)| go(e, out)),
                RNode::Mul(a, b) | RNode::Quot(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                RNode::Pow(a, _) => go(a, out),
                RNode::Root { degree, child, .. } => {
                    out.push(*degree);
                    go(child, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    pub fn all_rationals_exact(&self) -> bool {
        match self.node() {
            RNode::Rat(rep) => rep.is_exact(),
            RNode::Sum(terms) => terms.iter().all(|(_, e)| e.all_rationals_exact()),
            RNode::Mul(a, b) | RNode::Quot(a, b) => {
                a.all_rationals_exact() && b.all_rationals_exact()
            }
            RNode::Pow(a, _) => a.all_rationals_exact(),
            RNode::Root { child, .. } => child.all_rationals_exact(),
        }
    }

    /// Evaluate at the endpoint of `path`, transporting every root branch
    /// from the base point along it. The whole tree steps together; a step
    /// is bisected whenever any radicand moves too fast.
    pub fn eval_along_path<T: Real>(&self, path: &[Cx64], cfg: &Settings) -> Result<Cx<T>> {
        let plan = Plan::<T>::compile(self);
        if path.is_empty() {
            return Err(Error::BadInput("empty evaluation path".into()));
        }
        let mut vals = plan.eval_at(Cx::<T>::from_c64(path[0]), None)?;
        if plan.root_slots.is_empty() {
            // no branches to transport: jump straight to the endpoint
            let end = plan.eval_at(Cx::<T>::from_c64(path[path.len() - 1]), None)?;
            return Ok(end[plan.top]);
        }
        let total_len: f64 = path.windows(2).map(|w| w[0].dist_f64(w[1])).sum();
        let min_step = (cfg.min_step_frac * total_len).max(1e-300);
        let mut cur = path[0];
        for &target in &path[1..] {
            let mut stack = vec![target];
            while let Some(&tgt) = stack.last() {
                match plan.eval_at(Cx::<T>::from_c64(tgt), Some(&vals)) {
                    Ok(next) => {
                        vals = next;
                        cur = tgt;
                        stack.pop();
                    }
                    Err(Error::StepCollapse { .. }) => {
                        let gap = cur.dist_f64(tgt);
                        if gap < min_step {
                            return Err(Error::StepCollapse {
                                at: format!("{:+.6e}{:+.6e}i", cur.re, cur.im),
                            });
                        }
                        stack.push((cur + tgt).scale(0.5));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(vals[plan.top])
    }

    /// Evaluate at the base point itself (no transport).
    pub fn eval_at_base<T: Real>(&self, t0: Cx64) -> Result<Cx<T>> {
        let plan = Plan::<T>::compile(self);
        let vals = plan.eval_at(Cx::<T>::from_c64(t0), None)?;
        Ok(vals[plan.top])
    }
}

/// Flattened DAG with numeric coefficients baked in for one precision.
struct Plan<T: Real> {
    nodes: Vec<PlanNode<T>>,
    root_slots: Vec<usize>,
    top: usize,
}

enum PlanNode<T: Real> {
    Rat { num: Vec<Cx<T>>, den: Vec<Cx<T>> },
    Sum(Vec<(Cx<T>, usize)>),
    Mul(usize, usize),
    Quot(usize, usize),
    Pow(usize, u32),
    Root { degree: u32, child: usize, branch: Cx<T> },
}

impl<T: Real> Plan<T> {
    fn compile(expr: &RadicalExpr) -> Plan<T> {
        let mut nodes = Vec::new();
        let mut root_slots = Vec::new();
        let mut index: HashMap<usize, usize> = HashMap::new();
        fn go<T: Real>(
            e: &RadicalExpr,
            nodes: &mut Vec<PlanNode<T>>,
            roots: &mut Vec<usize>,
            index: &mut HashMap<usize, usize>,
        ) -> usize {
            let key = Rc::as_ptr(&e.0) as usize;
            if let Some(&i) = index.get(&key) {
                return i;
            }
            let node = match e.node() {
                RNode::Rat(rep) => match rep {
                    RatRep::Exact(r) => PlanNode::Rat {
                        num: unipoly_numeric(&r.num),
                        den: unipoly_numeric(&r.den),
                    },
                    RatRep::Float { num, den } => PlanNode::Rat {
                        num: num.iter().map(|c| c.to_cx()).collect(),
                        den: den.iter().map(|c| c.to_cx()).collect(),
                    },
                },
                RNode::Sum(terms) => PlanNode::Sum(
                    terms
                        .iter()
                        .map(|(coef, child)| {
                            let ci = go(child, nodes, roots, index);
                            (coef.eval::<T>(), ci)
                        })
                        .collect(),
                ),
                RNode::Mul(a, b) => {
                    let ia = go(a, nodes, roots, index);
                    let ib = go(b, nodes, roots, index);
                    PlanNode::Mul(ia, ib)
                }
                RNode::Quot(a, b) => {
                    let ia = go(a, nodes, roots, index);
                    let ib = go(b, nodes, roots, index);
                    PlanNode::Quot(ia, ib)
                }
                RNode::Pow(a, e2) => {
                    let ia = go(a, nodes, roots, index);
                    PlanNode::Pow(ia, *e2)
                }
                RNode::Root {
                    degree,
                    child,
                    branch,
                } => {
                    let ic = go(child, nodes, roots, index);
                    PlanNode::Root {
                        degree: *degree,
                        child: ic,
                        branch: branch.to_cx(),
                    }
                }
            };
            nodes.push(node);
            let i = nodes.len() - 1;
            if matches!(nodes[i], PlanNode::Root { .. }) {
                roots.push(i);
            }
            index.insert(key, i);
            i
        }
        let top = go(expr, &mut nodes, &mut root_slots, &mut index);
        Plan {
            nodes,
            root_slots,
            top,
        }
    }

    /// Evaluate all slots at `t`. With `prev` given, root nodes continue
    /// their branch from the previous values (stepping); without it they pin
    /// to the stored base branch (initialization).
    fn eval_at(&self, t: Cx<T>, prev: Option<&[Cx<T>]>) -> Result<Vec<Cx<T>>> {
        let tols = tols_for::<T>();
        let mut vals = vec![Cx::<T>::zero(); self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            vals[i] = match node {
                PlanNode::Rat { num, den } => {
                    let n = horner(num, t);
                    let d = horner(den, t);
                    n / d
                }
                PlanNode::Sum(terms) => {
                    let mut acc = Cx::<T>::zero();
                    for &(c, idx) in terms {
                        acc = acc + c * vals[idx];
                    }
                    acc
                }
                PlanNode::Mul(a, b) => vals[*a] * vals[*b],
                PlanNode::Quot(a, b) => vals[*a] / vals[*b],
                PlanNode::Pow(a, e) => vals[*a].powu(*e),
                PlanNode::Root {
                    degree,
                    child,
                    branch,
                } => {
                    let c_new = vals[*child];
                    match prev {
                        None => {
                            // initialization: trust but verify the pinned branch
                            let k = *degree;
                            let bk = branch.powu(k);
                            let scale = 1.0 + c_new.to_c64().abs();
                            let err = (bk - c_new).to_c64().abs() / scale;
                            // polish the stored branch against the child value
                            let polished = kth_root_near(c_new, k, *branch).ok_or(
                                Error::VerificationFailed {
                                    residual: err,
                                    tol: tols.verify_tol,
                                },
                            )?;
                            if (polished - *branch).to_c64().abs()
                                > 0.25 * (1.0 + branch.to_c64().abs())
                            {
                                return Err(Error::VerificationFailed {
                                    residual: err,
                                    tol: tols.verify_tol,
                                });
                            }
                            polished
                        }
                        Some(old) => {
                            // stepping: the radicand must not race
                            let c_old =
                                old_child_value(&self.nodes, old, *child);
                            let denom = c_old.to_c64().abs();
                            if denom == 0.0
                                || (c_new - c_old).to_c64().abs() > 0.5 * denom
                            {
                                return Err(Error::StepCollapse {
                                    at: "radicand moved too fast".into(),
                                });
                            }
                            kth_root_near(c_new, *degree, old[i]).ok_or(
                                Error::StepCollapse {
                                    at: "radicand vanished".into(),
                                },
                            )?
                        }
                    }
                }
            };
        }
        Ok(vals)
    }
}

fn old_child_value<T: Real>(_nodes: &[PlanNode<T>], old: &[Cx<T>], child: usize) -> Cx<T> {
    old[child]
}

fn unipoly_numeric<T: Real>(p: &UniPoly) -> Vec<Cx<T>> {
    let v = p.numeric_coeffs::<T>();
    if v.is_empty() {
        vec![Cx::zero()]
    } else {
        v
    }
}

fn horner<T: Real>(coeffs: &[Cx<T>], t: Cx<T>) -> Cx<T> {
    let mut acc = Cx::<T>::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

// ---- serialization ----

impl RadicalExpr {
    pub fn to_json(&self) -> Value {
        match self.node() {
            RNode::Rat(rep) => match rep {
                RatRep::Exact(r) => json!({
                    "kind": "rat",
                    "exact": true,
                    "num": r.num.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "den": r.den.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                }),
                RatRep::Float { num, den } => json!({
                    "kind": "rat",
                    "exact": false,
                    "num": num.iter().map(|c| { let (re, im) = c.decimal_pair(); json!([re, im]) }).collect::<Vec<_>>(),
                    "den": den.iter().map(|c| { let (re, im) = c.decimal_pair(); json!([re, im]) }).collect::<Vec<_>>(),
                }),
            },
            RNode::Sum(terms) => json!({
                "kind": "sum",
                "terms": terms.iter().map(|(coef, child)| json!({
                    "coef": {
                        "rat": coef.rat.to_string(),
                        "zeta": [coef.zeta.numer(), coef.zeta.order()],
                    },
                    "node": child.to_json(),
                })).collect::<Vec<_>>(),
            }),
            RNode::Mul(a, b) => json!({"kind": "mul", "a": a.to_json(), "b": b.to_json()}),
            RNode::Quot(a, b) => json!({"kind": "quot", "a": a.to_json(), "b": b.to_json()}),
            RNode::Pow(a, e) => json!({"kind": "pow", "base": a.to_json(), "exp": e}),
            RNode::Root {
                degree,
                child,
                branch,
            } => {
                let (re, im) = branch.decimal_pair();
                json!({
                    "kind": "root",
                    "degree": degree,
                    "branch": [re, im],
                    "child": child.to_json(),
                })
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<RadicalExpr> {
        let bad = |msg: &str| Error::Schema(format!("radical expression: {msg}"));
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing kind"))?;
        match kind {
            "rat" => {
                let exact = v
                    .get("exact")
                    .and_then(Value::as_bool)
                    .ok_or_else(|| bad("missing exact flag"))?;
                let arr = |name: &str| -> Result<&Vec<Value>> {
                    v.get(name)
                        .and_then(Value::as_array)
                        .ok_or_else(|| bad("missing coefficient array"))
                };
                if exact {
                    let parse_poly = |vals: &Vec<Value>| -> Result<UniPoly> {
                        let coeffs: Vec<GaussRat> = vals
                            .iter()
                            .map(|s| {
                                GaussRat::parse(
                                    s.as_str().ok_or_else(|| bad("coefficient not a string"))?,
                                )
                            })
                            .collect::<Result<_>>()?;
                        Ok(UniPoly::from_coeffs(coeffs))
                    };
                    let num = parse_poly(arr("num")?)?;
                    let den = parse_poly(arr("den")?)?;
                    Ok(RadicalExpr::exact_rat(RatFn { num, den }))
                } else {
                    let parse_coeffs = |vals: &Vec<Value>| -> Result<Vec<CxPair>> {
                        vals.iter()
                            .map(|pair| {
                                let p = pair
                                    .as_array()
                                    .filter(|p| p.len() == 2)
                                    .ok_or_else(|| bad("bad float coefficient"))?;
                                CxPair::from_decimal_pair(
                                    p[0].as_str().ok_or_else(|| bad("bad decimal"))?,
                                    p[1].as_str().ok_or_else(|| bad("bad decimal"))?,
                                )
                            })
                            .collect()
                    };
                    Ok(RadicalExpr::rat(RatRep::Float {
                        num: parse_coeffs(arr("num")?)?,
                        den: parse_coeffs(arr("den")?)?,
                    }))
                }
            }
            "sum" => {
                let terms = v
                    .get("terms")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("missing terms"))?;
                let parsed: Vec<(ExactCoef, RadicalExpr)> = terms
                    .iter()
                    .map(|t| {
                        let coef = t.get("coef").ok_or_else(|| bad("missing coef"))?;
                        let rat = GaussRat::parse(
                            coef.get("rat")
                                .and_then(Value::as_str)
                                .ok_or_else(|| bad("missing coef.rat"))?,
                        )?;
                        let zeta = coef
                            .get("zeta")
                            .and_then(Value::as_array)
                            .filter(|z| z.len() == 2)
                            .ok_or_else(|| bad("missing coef.zeta"))?;
                        let num = zeta[0].as_u64().ok_or_else(|| bad("bad zeta"))? as u32;
                        let den = zeta[1].as_u64().ok_or_else(|| bad("bad zeta"))? as u32;
                        let node =
                            RadicalExpr::from_json(t.get("node").ok_or_else(|| bad("missing node"))?)?;
                        Ok((ExactCoef::with_zeta(rat, RootOfUnity::new(num, den)), node))
                    })
                    .collect::<Result<_>>()?;
                Ok(RadicalExpr::sum(parsed))
            }
            "mul" | "quot" => {
                let a = RadicalExpr::from_json(v.get("a").ok_or_else(|| bad("missing a"))?)?;
                let b = RadicalExpr::from_json(v.get("b").ok_or_else(|| bad("missing b"))?)?;
                Ok(if kind == "mul" {
                    RadicalExpr::mul(a, b)
                } else {
                    RadicalExpr::quot(a, b)
                })
            }
            "pow" => {
                let base =
                    RadicalExpr::from_json(v.get("base").ok_or_else(|| bad("missing base"))?)?;
                let e = v
                    .get("exp")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| bad("missing exp"))? as u32;
                Ok(RadicalExpr::pow(base, e))
            }
            "root" => {
                let degree = v
                    .get("degree")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| bad("missing degree"))? as u32;
                let branch = v
                    .get("branch")
                    .and_then(Value::as_array)
                    .filter(|b| b.len() == 2)
                    .ok_or_else(|| bad("missing branch"))?;
                let branch = CxPair::from_decimal_pair(
                    branch[0].as_str().ok_or_else(|| bad("bad branch"))?,
                    branch[1].as_str().ok_or_else(|| bad("bad branch"))?,
                )?;
                let child =
                    RadicalExpr::from_json(v.get("child").ok_or_else(|| bad("missing child"))?)?;
                Ok(RadicalExpr::root(degree, child, branch))
            }
            other => Err(bad(&format!("unknown kind `{other}`"))),
        }
    }
}

impl fmt::Display for RadicalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            RNode::Rat(rep) => write!(f, "{rep}"),
            RNode::Sum(terms) => {
                if terms.is_empty() {
                    return write!(f, "0");
                }
                for (k, (coef, child)) in terms.iter().enumerate() {
                    if k > 0 {
                        write!(f, " + ")?;
                    }
                    let coef_one = coef.rat.is_one() && coef.zeta.is_one();
                    if !coef_one {
                        write!(f, "({coef})*")?;
                    }
                    write!(f, "{child}")?;
                }
                Ok(())
            }
            RNode::Mul(a, b) => write!(f, "({a})*({b})"),
            RNode::Quot(a, b) => write!(f, "({a})/({b})"),
            RNode::Pow(a, e) => write!(f, "({a})^{e}"),
            RNode::Root {
                degree,
                child,
                branch,
            } => {
                let b = branch.to_c64();
                write!(
                    f,
                    "root({degree}; {child}; branch ~ {:+.6}{:+.6}i)",
                    b.re, b.im
                )
            }
        }
    }
}
