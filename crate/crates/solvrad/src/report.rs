//! Batch front-end: run the whole pipeline on an equation and emit a
//! machine-readable report; re-verify serialized expressions; cache the
//! expensive intermediates (branch points and generator permutations).

use crate::config::{tols_for, Precision, Settings};
use crate::error::{Error, Result};
use crate::groups::{Perm, PermGroup, Terminal};
use crate::monodromy::{
    base_circle_radius, base_fiber_on_circle, local_monodromy, petal_loops,
    slice_fiber_at, track_loops_concurrently, BranchPoints, MonodromyRep, SliceLine, SlicedFamily,
};
use crate::num::{Cx, Cx64, Dd, Real};
use crate::polyalg::{branch_poly, parse_family, AlgebraicFamily, MultiPoly};
use crate::radicals::{
    radical_tower, unsolvability_certificate, CxPair, RadicalExpr, SampleGrid, TowerBuild,
};
use crate::rng::Rng;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

/// Options for one analysis invocation.
#[derive(Clone, Debug, Default)]
pub struct AnalyzeOptions {
    pub settings: Settings,
    pub slice: Option<SliceLine>,
    pub cache_dir: Option<PathBuf>,
    pub no_timings: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceOut {
    pub origin: Vec<String>,
    pub direction: Vec<String>,
    pub parameter: String,
    /// Affine substitution realizing the slice, one entry per variable.
    pub substitution: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolvabilityOut {
    pub solvable: bool,
    pub derived_chain_orders: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solvable_at: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perfect_core_order: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchPointOut {
    pub value: [String; 2],
    pub cluster_radius: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitOut {
    pub level: usize,
    pub quotient_order: usize,
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
    pub reassembly_residual: f64,
    pub eigen_residual: f64,
    pub power_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DroppedOut {
    pub level: usize,
    pub char_index: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationOut {
    pub residual_at_base: f64,
    pub max_residual: f64,
    pub samples_checked: usize,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExprBlock {
    pub slice: SliceOut,
    pub base_point: [String; 2],
    pub radius: i64,
    pub depth: usize,
    pub root_count: usize,
    pub root_degrees: Vec<u32>,
    pub all_coefficients_exact: bool,
    pub display: String,
    pub expr: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateOut {
    pub generators: Vec<String>,
    pub chain_orders: Vec<usize>,
    pub core_order: usize,
    pub core_generators: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TimingsOut {
    pub monodromy_ms: f64,
    pub groups_ms: f64,
    pub radicals_ms: f64,
    pub total_ms: f64,
}

/// The full analysis report. Serializes deterministically: identical input,
/// seed, and precision give byte-identical JSON (timings excluded via
/// [`AnalyzeOptions::no_timings`]).
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub input: String,
    pub equation: String,
    pub variables: Vec<String>,
    pub degree: usize,
    pub seed: u64,
    pub precision_bits: u32,
    pub slice: SliceOut,
    pub base_point: [String; 2],
    pub radius: i64,
    pub branch_points: Vec<BranchPointOut>,
    pub generators: Vec<String>,
    pub group_order: usize,
    /// 1-based orbit partition; a single orbit means the family is
    /// irreducible over the rational functions.
    pub orbits: Vec<Vec<usize>>,
    pub irreducible: bool,
    pub solvability: SolvabilityOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radical_expr: Option<ExprBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateOut>,
    pub splits: Vec<SplitOut>,
    pub dropped_components: Vec<DroppedOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<TimingsOut>,
}

impl AnalysisReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_human(&self) -> String {
        let mut s = String::new();
        use std::fmt::Write;
        let _ = writeln!(s, "equation: {}", self.equation);
        let _ = writeln!(
            s,
            "slice: t -> ({})",
            self.slice.substitution.join(", ")
        );
        let _ = writeln!(
            s,
            "base point: {} + {} i   (circle radius {})",
            self.base_point[0], self.base_point[1], self.radius
        );
        let _ = writeln!(s, "branch points: {}", self.branch_points.len());
        let _ = writeln!(
            s,
            "generators: {}",
            if self.generators.is_empty() {
                "(none)".to_string()
            } else {
                self.generators.join("  ")
            }
        );
        let _ = writeln!(s, "group order: {}", self.group_order);
        let orbit_str: Vec<String> = self
            .orbits
            .iter()
            .map(|o| {
                format!(
                    "{{{}}}",
                    o.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
                )
            })
            .collect();
        let _ = writeln!(
            s,
            "orbits: {}  ({})",
            orbit_str.join(" "),
            if self.irreducible {
                "irreducible"
            } else {
                "reducible"
            }
        );
        let chain = self
            .solvability
            .derived_chain_orders
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" > ");
        if self.solvability.solvable {
            let _ = writeln!(
                s,
                "solvable by radicals: yes (derived series {} in {} steps)",
                chain,
                self.solvability.solvable_at.unwrap_or(0)
            );
        } else {
            let _ = writeln!(
                s,
                "solvable by radicals: NO (derived series {} stabilizes at order {})",
                chain,
                self.solvability.perfect_core_order.unwrap_or(0)
            );
        }
        if let Some(expr) = &self.radical_expr {
            let _ = writeln!(
                s,
                "radical tower (depth {}, {} root node{}):",
                expr.depth,
                expr.root_count,
                if expr.root_count == 1 { "" } else { "s" }
            );
            let _ = writeln!(s, "  y1 = {}", expr.display);
        }
        if let Some(cert) = &self.certificate {
            let _ = writeln!(
                s,
                "unsolvability certificate: perfect core of order {} generated by {}",
                cert.core_order,
                cert.core_generators.join("  ")
            );
        }
        if let Some(v) = &self.verification {
            let _ = writeln!(
                s,
                "verification: max residual {:.3e} over {} points (tolerance {:.1e})",
                v.max_residual, v.samples_checked, v.tolerance
            );
        }
        if let Some(t) = &self.timings_ms {
            let _ = writeln!(s, "total time: {:.1} ms", t.total_ms);
        }
        s
    }
}

fn slice_out(slice: &SliceLine, vars: &[String]) -> SliceOut {
    SliceOut {
        origin: slice.origin.iter().map(|g| g.to_string()).collect(),
        direction: slice.direction.iter().map(|g| g.to_string()).collect(),
        parameter: "t".into(),
        substitution: vars
            .iter()
            .zip(slice.origin.iter().zip(&slice.direction))
            .map(|(v, (o, d))| format!("{v} = {o} + ({d})*t"))
            .collect(),
    }
}

fn decimal_pair_of<T: Real>(v: Cx<T>) -> [String; 2] {
    let (re, im) = CxPair::from_cx(v).decimal_pair();
    [re, im]
}

/// Analyze an equation end to end.
///
/// Retries once at double-double precision when the 53-bit run hits a
/// numeric failure (near branch locus, step collapse, lost matching).
pub fn analyze(equation: &str, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    match opts.settings.precision {
        Precision::F64 => match analyze_at::<f64>(equation, opts) {
            Err(e) if numeric_retry(&e) => {
                let mut retry = opts.clone();
                retry.settings.precision = Precision::Dd;
                analyze_at::<Dd>(equation, &retry)
            }
            other => other,
        },
        Precision::Dd => analyze_at::<Dd>(equation, opts),
    }
}

fn numeric_retry(e: &Error) -> bool {
    matches!(
        e,
        Error::NearBranchLocus { .. }
            | Error::StepCollapse { .. }
            | Error::RootsNoConverge { .. }
            | Error::AmbiguousMatching(_)
    )
}

fn analyze_at<T: Real>(equation: &str, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let t_start = Instant::now();
    let cfg = &opts.settings;
    let fam = parse_family(equation)?;
    let bp = branch_poly(&fam)?;

    let t_mono = Instant::now();
    let rep: MonodromyRep<T> = monodromy_with_cache(&fam, &bp, opts)?;
    let monodromy_ms = t_mono.elapsed().as_secs_f64() * 1e3;

    let t_groups = Instant::now();
    let series = rep.group.derived_series()?;
    let orders = series.chain_orders()?;
    let groups_ms = t_groups.elapsed().as_secs_f64() * 1e3;

    let orbits0 = rep.group.orbits();
    let orbits: Vec<Vec<usize>> = orbits0
        .iter()
        .map(|o| o.iter().map(|v| v + 1).collect())
        .collect();
    let irreducible = orbits.len() == 1;

    let solvability = match series.terminal {
        Terminal::Solvable { steps } => SolvabilityOut {
            solvable: true,
            derived_chain_orders: orders.clone(),
            solvable_at: Some(steps),
            perfect_core_order: None,
        },
        Terminal::Perfect { core_order } => SolvabilityOut {
            solvable: false,
            derived_chain_orders: orders.clone(),
            solvable_at: None,
            perfect_core_order: Some(core_order),
        },
    };

    let t_rad = Instant::now();
    let mut radical_expr = None;
    let mut certificate = None;
    let mut splits = Vec::new();
    let mut dropped = Vec::new();
    let mut verification = None;
    if solvability.solvable {
        let sliced = SlicedFamily::<T>::new(&fam, rep.slice.clone(), &bp)?;
        let jitter = Rng::new(cfg.seed ^ 0x9f1d_aa11).unit();
        let grid = SampleGrid::build(
            &sliced,
            rep.base.t.to_c64(),
            rep.radius,
            &rep.base,
            cfg.grid_samples(),
            jitter,
            cfg,
        )?;
        let tower: TowerBuild = radical_tower(&rep, &series, &grid, cfg)?;
        splits = tower
            .splits
            .iter()
            .map(|r| SplitOut {
                level: r.level,
                quotient_order: r.quotient_order,
                kept: r.kept.clone(),
                dropped: r.dropped.clone(),
                reassembly_residual: r.reassembly_residual,
                eigen_residual: r.eigen_residual,
                power_residual: r.power_residual,
            })
            .collect();
        dropped = tower
            .dropped
            .iter()
            .map(|d| DroppedOut {
                level: d.level,
                char_index: d.char_index,
            })
            .collect();
        verification = Some(VerificationOut {
            residual_at_base: tower.residual_at_base,
            max_residual: tower.max_residual,
            samples_checked: tower.samples_checked,
            tolerance: tols_for::<T>().verify_tol,
        });
        radical_expr = Some(ExprBlock {
            slice: slice_out(&rep.slice, &fam.vars),
            base_point: decimal_pair_of(rep.base.t),
            radius: rep.radius,
            depth: tower.expr.depth(),
            root_count: tower.expr.count_roots(),
            root_degrees: tower.expr.root_degrees(),
            all_coefficients_exact: tower.all_exact,
            display: tower.expr.to_string(),
            expr: tower.expr.to_json(),
        });
    } else {
        let cert = unsolvability_certificate(&rep, &series)?;
        certificate = Some(CertificateOut {
            generators: cert.generators.iter().map(|p| p.to_string()).collect(),
            chain_orders: cert.chain_orders,
            core_order: cert.core_order,
            core_generators: cert.core_generators.iter().map(|p| p.to_string()).collect(),
        });
    }
    let radicals_ms = t_rad.elapsed().as_secs_f64() * 1e3;

    let timings_ms = if opts.no_timings {
        None
    } else {
        Some(TimingsOut {
            monodromy_ms,
            groups_ms,
            radicals_ms,
            total_ms: t_start.elapsed().as_secs_f64() * 1e3,
        })
    };

    Ok(AnalysisReport {
        schema: SCHEMA_VERSION,
        input: equation.to_string(),
        equation: fam.display_equation(),
        variables: fam.vars.clone(),
        degree: fam.n,
        seed: cfg.seed,
        precision_bits: T::MANTISSA_BITS,
        slice: slice_out(&rep.slice, &fam.vars),
        base_point: decimal_pair_of(rep.base.t),
        radius: rep.radius,
        branch_points: rep
            .branch
            .values
            .iter()
            .zip(&rep.branch.cluster_radius)
            .map(|(v, r)| BranchPointOut {
                value: decimal_pair_of(*v),
                cluster_radius: *r,
            })
            .collect(),
        generators: rep.perms.iter().map(|p| p.to_string()).collect(),
        group_order: rep.group.order()?,
        orbits,
        irreducible,
        solvability,
        radical_expr,
        certificate,
        splits,
        dropped_components: dropped,
        verification,
        timings_ms,
    })
}

// ---- cache ----

fn fnv64(data: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in data.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

#[derive(Serialize, serde::Deserialize)]
struct CacheFile {
    schema: u32,
    equation: String,
    slice: String,
    seed: u64,
    precision_bits: u32,
    radius: i64,
    /// Each branch point as (re_hi, re_lo, im_hi, im_lo).
    branch_points: Vec<[f64; 4]>,
    cluster_radius: Vec<f64>,
    perms: Vec<String>,
}

fn cache_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("solvrad-{:016x}.json", fnv64(key)))
}

/// Monodromy with the branch points and generator permutations optionally
/// served from the cache. Cached data is validated cheaply (branch points
/// must satisfy the restricted branch polynomial; permutations must be
/// bijections of the right degree) and recomputed on any mismatch.
fn monodromy_with_cache<T: Real>(
    fam: &AlgebraicFamily,
    bp: &MultiPoly,
    opts: &AnalyzeOptions,
) -> Result<MonodromyRep<T>> {
    let cfg = &opts.settings;
    let slice = match &opts.slice {
        Some(s) => s.clone(),
        None => crate::monodromy::choose_slice_with(fam, bp, cfg.seed, cfg)?,
    };
    let key = format!(
        "{}|{}|{}|{}",
        fam.display_equation(),
        slice.to_flag_string(),
        cfg.seed,
        T::MANTISSA_BITS,
    );
    let cache_file = opts.cache_dir.as_ref().map(|d| cache_path(d, &key));

    let sliced = SlicedFamily::<T>::new(fam, slice.clone(), bp)?;
    if let Some(path) = &cache_file {
        if let Some(rep) = try_load_cache::<T>(path, &key, &sliced, cfg) {
            return Ok(rep);
        }
    }
    let branch = crate::monodromy::branch_points(&sliced, cfg)?;
    let radius = base_circle_radius(&branch);
    let (t0, base) = base_fiber_on_circle(&sliced, radius, cfg)?;
    let loops = petal_loops(&branch.values_c64(), &branch.cluster_radius, t0, cfg)?;
    let perms = track_loops_concurrently(&sliced, &loops, &base, cfg)?;
    let group = PermGroup::new(sliced.n, perms.clone(), cfg.group_cap)?;
    let rep = MonodromyRep {
        slice,
        base,
        branch,
        loops,
        perms,
        group,
        radius,
    };
    if let Some(path) = &cache_file {
        let _ = store_cache(path, fam, &rep, cfg);
    }
    Ok(rep)
}

fn try_load_cache<T: Real>(
    path: &Path,
    key: &str,
    sliced: &SlicedFamily<T>,
    cfg: &Settings,
) -> Option<MonodromyRep<T>> {
    let text = std::fs::read_to_string(path).ok()?;
    let file: CacheFile = serde_json::from_str(&text).ok()?;
    let mut parts = key.split('|');
    let (equation, slice_str, seed_str, bits_str) =
        (parts.next()?, parts.next()?, parts.next()?, parts.next()?);
    if file.schema != SCHEMA_VERSION
        || file.equation != equation
        || file.slice != slice_str
        || file.seed.to_string() != seed_str
        || file.precision_bits.to_string() != bits_str
        || file.branch_points.len() != file.cluster_radius.len()
    {
        return None;
    }
    // cheap validation: branch points satisfy the restricted branch poly
    let coeff_scale = sliced
        .branch_squarefree
        .numeric_coeffs::<f64>()
        .iter()
        .map(|c| c.abs())
        .fold(1e-300, f64::max);
    let values: Vec<Cx<T>> = file
        .branch_points
        .iter()
        .map(|q| {
            Cx::new(
                T::from_f64(q[0]) + T::from_f64(q[1]),
                T::from_f64(q[2]) + T::from_f64(q[3]),
            )
        })
        .collect();
    for v in &values {
        let bvmag = sliced.branch_value_at(*v).to_c64().abs();
        let vmag = v.to_c64().abs();
        if bvmag > 1e-6 * coeff_scale * (1.0 + vmag).powi(sliced.branch_squarefree.degree() as i32)
        {
            return None;
        }
    }
    let perms: Vec<Perm> = file
        .perms
        .iter()
        .map(|s| Perm::parse(s, sliced.n))
        .collect::<Result<_>>()
        .ok()?;
    let branch = BranchPoints {
        values,
        cluster_radius: file.cluster_radius.clone(),
    };
    // base point and loops are cheap to rebuild deterministically
    let (t0, base) = base_fiber_on_circle(sliced, file.radius, cfg).ok()?;
    let loops = petal_loops(&branch.values_c64(), &branch.cluster_radius, t0, cfg).ok()?;
    if loops.len() != perms.len() {
        return None;
    }
    let group = PermGroup::new(sliced.n, perms.clone(), cfg.group_cap).ok()?;
    Some(MonodromyRep {
        slice: sliced.slice.clone(),
        base,
        branch,
        loops,
        perms,
        group,
        radius: file.radius,
    })
}

fn store_cache<T: Real>(
    path: &Path,
    fam: &AlgebraicFamily,
    rep: &MonodromyRep<T>,
    cfg: &Settings,
) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let to_quad = |v: &Cx<T>| {
        let p = CxPair::from_cx(*v);
        [p.re.0, p.re.1, p.im.0, p.im.1]
    };
    let file = CacheFile {
        schema: SCHEMA_VERSION,
        equation: fam.display_equation(),
        slice: rep.slice.to_flag_string(),
        seed: cfg.seed,
        precision_bits: T::MANTISSA_BITS,
        radius: rep.radius,
        branch_points: rep.branch.values.iter().map(to_quad).collect(),
        cluster_radius: rep.branch.cluster_radius.clone(),
        perms: rep.perms.iter().map(|p| p.to_string()).collect(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

// ---- local monodromy ----

#[derive(Clone, Debug, Serialize)]
pub struct LocalOut {
    pub schema: u32,
    pub input: String,
    pub point: Vec<[String; 2]>,
    pub radius_requested: f64,
    pub radius_stabilized: f64,
    pub shrinks: u32,
    pub slice: SliceOut,
    pub branch_points_in_ball: usize,
    pub generators: Vec<String>,
    pub group_order: usize,
    pub solvable: bool,
    pub derived_chain_orders: Vec<usize>,
    /// Orbits of the local group: one per ramified germ, 1-based, with the
    /// orbit size as the germ's local degree.
    pub ramified_germs: Vec<Vec<usize>>,
}

impl LocalOut {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
    pub fn render_human(&self) -> String {
        let mut s = String::new();
        use std::fmt::Write;
        let pt: Vec<String> = self
            .point
            .iter()
            .map(|p| format!("{}+{}i", p[0], p[1]))
            .collect();
        let _ = writeln!(
            s,
            "local monodromy at ({}) stabilized at radius {}",
            pt.join(", "),
            self.radius_stabilized
        );
        let _ = writeln!(
            s,
            "group order {} ({}); generators: {}",
            self.group_order,
            if self.solvable { "solvable" } else { "UNSOLVABLE" },
            if self.generators.is_empty() {
                "(none)".into()
            } else {
                self.generators.join("  ")
            }
        );
        for o in &self.ramified_germs {
            let _ = writeln!(
                s,
                "ramified germ of local degree {}: sheets {{{}}}",
                o.len(),
                o.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
            );
        }
        s
    }
}

/// Local monodromy report at a point.
pub fn local(equation: &str, point: &[Cx64], radius: f64, opts: &AnalyzeOptions) -> Result<LocalOut> {
    let cfg = &opts.settings;
    let fam = parse_family(equation)?;
    let run = || -> Result<LocalOut> {
        let report = match cfg.precision {
            Precision::F64 => build_local::<f64>(&fam, equation, point, radius, cfg),
            Precision::Dd => build_local::<Dd>(&fam, equation, point, radius, cfg),
        }?;
        Ok(report)
    };
    run()
}

fn build_local<T: Real>(
    fam: &AlgebraicFamily,
    equation: &str,
    point: &[Cx64],
    radius: f64,
    cfg: &Settings,
) -> Result<LocalOut> {
    let report = local_monodromy::<T>(fam, point, radius, cfg)?;
    let series = report.rep.group.derived_series()?;
    Ok(LocalOut {
        schema: SCHEMA_VERSION,
        input: equation.to_string(),
        point: point
            .iter()
            .map(|p| decimal_pair_of(Cx::<f64>::new(p.re, p.im)))
            .collect(),
        radius_requested: radius,
        radius_stabilized: report.radius,
        shrinks: report.shrinks,
        slice: slice_out(&report.rep.slice, &fam.vars),
        branch_points_in_ball: report.rep.branch.len(),
        generators: report.rep.perms.iter().map(|p| p.to_string()).collect(),
        group_order: report.rep.group.order()?,
        solvable: series.is_solvable(),
        derived_chain_orders: series.chain_orders()?,
        ramified_germs: report
            .orbits
            .iter()
            .map(|o| o.iter().map(|v| v + 1).collect())
            .collect(),
    })
}

// ---- verify ----

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub equation: String,
    pub max_residual: f64,
    pub residual_at_base: f64,
    pub samples_checked: usize,
    pub tolerance: f64,
    pub ok: bool,
}

impl VerifyReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Re-evaluate a serialized radical expression against freshly tracked roots
/// of the given equation on a new grid. Errors with
/// [`Error::VerificationFailed`] when the maximum residual exceeds the
/// tolerance at the active precision.
pub fn verify(expr_file: &str, equation: &str, opts: &AnalyzeOptions) -> Result<VerifyReport> {
    let value: serde_json::Value = serde_json::from_str(expr_file)?;
    let block = value
        .get("radical_expr")
        .filter(|b| !b.is_null())
        .unwrap_or(&value);
    let bad = |m: &str| Error::Schema(format!("expression file: {m}"));
    let expr = RadicalExpr::from_json(block.get("expr").ok_or_else(|| bad("missing expr"))?)?;
    let slice_block = block.get("slice").ok_or_else(|| bad("missing slice"))?;
    let read_tuple = |name: &str| -> Result<Vec<crate::exact::GaussRat>> {
        slice_block
            .get(name)
            .and_then(serde_json::Value::as_array)
            .ok_or_else(|| bad("bad slice"))?
            .iter()
            .map(|s| {
                crate::exact::GaussRat::parse(s.as_str().ok_or_else(|| bad("bad slice entry"))?)
            })
            .collect()
    };
    let slice = SliceLine {
        origin: read_tuple("origin")?,
        direction: read_tuple("direction")?,
    };
    let base_pair = block
        .get("base_point")
        .and_then(serde_json::Value::as_array)
        .filter(|a| a.len() == 2)
        .ok_or_else(|| bad("missing base_point"))?;
    let base_point = CxPair::from_decimal_pair(
        base_pair[0].as_str().ok_or_else(|| bad("bad base_point"))?,
        base_pair[1].as_str().ok_or_else(|| bad("bad base_point"))?,
    )?;
    let radius = block
        .get("radius")
        .and_then(serde_json::Value::as_i64)
        .ok_or_else(|| bad("missing radius"))?;

    match opts.settings.precision {
        Precision::F64 => verify_at::<f64>(equation, &slice, base_point, radius, expr, opts),
        Precision::Dd => verify_at::<Dd>(equation, &slice, base_point, radius, expr, opts),
    }
}

fn verify_at<T: Real>(
    equation: &str,
    slice: &SliceLine,
    base_point: CxPair,
    radius: i64,
    expr: RadicalExpr,
    opts: &AnalyzeOptions,
) -> Result<VerifyReport> {
    let cfg = &opts.settings;
    let fam = parse_family(equation)?;
    let bp = branch_poly(&fam)?;
    let sliced = SlicedFamily::<T>::new(&fam, slice.clone(), &bp)?;
    let t0: Cx<T> = base_point.to_cx();
    let base = slice_fiber_at(&sliced, t0, cfg)?;
    // fresh grid: jitter differs from the analyze-time grid even at the
    // same seed
    let jitter = Rng::new(cfg.seed ^ 0x7e71_f1ed).unit();
    let count = cfg.grid_samples().min(40);
    let grid = SampleGrid::build(&sliced, t0.to_c64(), radius, &base, count, jitter, cfg)?;
    let tols = tols_for::<T>();
    let scale = 1.0
        + grid
            .samples
            .iter()
            .flat_map(|s| s.fiber.roots.iter())
            .map(|r| r.to_c64().abs())
            .fold(0.0, f64::max);
    let at_base: Cx<T> = expr.eval_at_base(grid.t0)?;
    let residual_at_base = (at_base - grid.base.roots[0]).to_c64().abs();
    let mut max_residual = residual_at_base;
    for s in &grid.samples {
        let v: Cx<T> = expr.eval_along_path(&s.path, cfg)?;
        let r = (v - s.fiber.roots[0]).to_c64().abs();
        max_residual = max_residual.max(r);
    }
    let tolerance = tols.verify_tol * scale;
    if max_residual > tolerance {
        return Err(Error::VerificationFailed {
            residual: max_residual,
            tol: tolerance,
        });
    }
    Ok(VerifyReport {
        schema: SCHEMA_VERSION,
        equation: fam.display_equation(),
        max_residual,
        residual_at_base,
        samples_checked: grid.len() + 1,
        tolerance,
        ok: true,
    })
}

/// Machine-readable error object for the CLI.
pub fn error_json(e: &Error) -> String {
    serde_json::to_string_pretty(&serde_json::json!({
        "schema": SCHEMA_VERSION,
        "error": {
            "kind": e.kind(),
            "message": e.to_string(),
            "exit_code": e.exit_code(),
        },
    }))
    .expect("error serializes")
}
