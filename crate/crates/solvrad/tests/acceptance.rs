//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with its measured numbers. Run with `cargo test --test acceptance --
//! --nocapture` to see the lines.

use solvrad::config::{Precision, Settings};
use solvrad::monodromy::{
    compose_in_path_order, infinity_loop, loop_permutation, monodromy_group, puncture_loop,
    MonodromyRep, SlicedFamily,
};
use solvrad::num::Cx64;
use solvrad::polyalg::{branch_poly, parse_family};
use solvrad::radicals::SampleGrid;
use solvrad::report::{analyze, AnalyzeOptions};
use solvrad::rng::Rng;
use std::time::Instant;

struct Criterion {
    n: u32,
    desc: &'static str,
    failures: Vec<String>,
    start: Instant,
}

impl Criterion {
    fn new(n: u32, desc: &'static str) -> Criterion {
        Criterion {
            n,
            desc,
            failures: Vec::new(),
            start: Instant::now(),
        }
    }
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }
    fn finish(mut self, limit_s: f64) {
        let elapsed = self.start.elapsed().as_secs_f64();
        if elapsed >= limit_s {
            self.failures
                .push(format!("runtime {elapsed:.2}s exceeded {limit_s}s"));
        }
        if self.failures.is_empty() {
            println!(
                "criterion {:>2}: PASS — {} ({elapsed:.2}s)",
                self.n, self.desc
            );
        } else {
            println!(
                "criterion {:>2}: FAIL — {}: {}",
                self.n,
                self.desc,
                self.failures.join("; ")
            );
            panic!("criterion {} failed: {}", self.n, self.failures.join("; "));
        }
    }
}

fn opts() -> AnalyzeOptions {
    AnalyzeOptions {
        no_timings: true,
        ..AnalyzeOptions::default()
    }
}

fn rep_for(eq: &str) -> (MonodromyRep<f64>, SlicedFamily<f64>) {
    let cfg = Settings::default();
    let fam = parse_family(eq).unwrap();
    let bp = branch_poly(&fam).unwrap();
    let rep = monodromy_group::<f64>(&fam, None, &cfg).unwrap();
    let sliced = SlicedFamily::new(&fam, rep.slice.clone(), &bp).unwrap();
    (rep, sliced)
}

#[test]
fn criterion_01_quadratic() {
    let mut c = Criterion::new(1, "quadratic y^2 - x: transposition group and verified tower");
    let r = analyze("y^2 - x", &opts()).unwrap();
    c.check(r.branch_points.len() == 1, "one branch point");
    c.check(
        r.generators == vec!["(1 2)".to_string()],
        format!("generator (1 2), got {:?}", r.generators),
    );
    c.check(r.group_order == 2, "order 2");
    c.check(r.irreducible, "transitive action");
    c.check(
        r.solvability.solvable && r.solvability.solvable_at == Some(1),
        "solvable at step 1",
    );
    let v = r.verification.as_ref().expect("verification present");
    c.check(
        v.max_residual <= 1e-8,
        format!("residual {:.3e} <= 1e-8", v.max_residual),
    );
    c.check(
        v.samples_checked >= 20,
        format!("{} samples >= 20", v.samples_checked),
    );
    c.check(r.radical_expr.is_some(), "radical expression present");
    c.finish(1.0);
}

#[test]
fn criterion_02_cyclic_families() {
    let mut c = Criterion::new(2, "cyclic y^n - x, n=2..7: one n-cycle, depth-1 tower");
    for n in 2..=7usize {
        let r = analyze(&format!("y^{n} - x"), &opts()).unwrap();
        c.check(
            r.generators.len() == 1,
            format!("n={n}: single generator, got {}", r.generators.len()),
        );
        let gen = solvrad::groups::Perm::parse(&r.generators[0], n).unwrap();
        let cycles = gen.cycles();
        c.check(
            cycles.len() == 1 && cycles[0].len() == n,
            format!("n={n}: generator is an n-cycle"),
        );
        c.check(r.group_order == n, format!("n={n}: order {n}"));
        c.check(r.solvability.solvable, format!("n={n}: solvable"));
        let e = r.radical_expr.as_ref().expect("tower present");
        c.check(e.depth == 1, format!("n={n}: depth 1, got {}", e.depth));
        c.check(
            e.root_count == 1 && e.root_degrees == vec![n as u32],
            format!("n={n}: one root node of degree {n}"),
        );
        let v = r.verification.as_ref().unwrap();
        c.check(
            v.max_residual <= 1e-8,
            format!("n={n}: residual {:.3e} <= 1e-8", v.max_residual),
        );
    }
    c.finish(5.0);
}

#[test]
fn criterion_03_cubic_cardano() {
    let mut c = Criterion::new(3, "cubic y^3 + p*y + q: S3, depth-2 tower at both precisions");
    let r = analyze("y^3 + p*y + q", &opts()).unwrap();
    c.check(r.group_order == 6, format!("order 6, got {}", r.group_order));
    c.check(
        r.solvability.derived_chain_orders == vec![6, 3, 1],
        format!("chain (6,3,1), got {:?}", r.solvability.derived_chain_orders),
    );
    let e = r.radical_expr.as_ref().expect("tower present");
    c.check(e.depth == 2, format!("depth 2, got {}", e.depth));
    let v = r.verification.as_ref().unwrap();
    c.check(
        v.max_residual <= 1e-6,
        format!("53-bit residual {:.3e} <= 1e-6", v.max_residual),
    );
    // high-precision run
    let mut hi = opts();
    hi.settings.precision = Precision::Dd;
    let r = analyze("y^3 + p*y + q", &hi).unwrap();
    c.check(r.precision_bits > 53, "high-precision run");
    let v = r.verification.as_ref().unwrap();
    c.check(
        v.max_residual <= 1e-20,
        format!("high-precision residual {:.3e} <= 1e-20", v.max_residual),
    );
    c.finish(10.0);
}

#[test]
fn criterion_04_quartic() {
    let mut c = Criterion::new(4, "quartic y^4 + p*y + q: S4 chain and verified tower");
    let r = analyze("y^4 + p*y + q", &opts()).unwrap();
    c.check(r.group_order == 24, format!("order 24, got {}", r.group_order));
    c.check(
        r.solvability.derived_chain_orders == vec![24, 12, 4, 1],
        format!(
            "chain (24,12,4,1), got {:?}",
            r.solvability.derived_chain_orders
        ),
    );
    let v = r.verification.as_ref().expect("verification present");
    c.check(
        v.max_residual <= 1e-6,
        format!("residual {:.3e} <= 1e-6", v.max_residual),
    );
    c.finish(60.0);
}

#[test]
fn criterion_05_unsolvable_quintic() {
    let mut c = Criterion::new(5, "quintic y^5 + a*y + b: S5 certificate, local S5 at the origin");
    let r = analyze("y^5 + a*y + b", &opts()).unwrap();
    c.check(r.group_order == 120, format!("order 120, got {}", r.group_order));
    c.check(!r.solvability.solvable, "unsolvable");
    let chain = &r.solvability.derived_chain_orders;
    c.check(
        chain.len() >= 2 && chain[chain.len() - 1] == 60 && chain[chain.len() - 2] == 60,
        format!("series stabilizes at 60, got {chain:?}"),
    );
    let cert = r.certificate.as_ref().expect("certificate present");
    c.check(cert.core_order == 60, "perfect core of order 60");
    c.check(r.radical_expr.is_none(), "no radical expression");
    // radical_tower itself must refuse
    let cfg = Settings::default();
    let fam = parse_family("y^5 + a*y + b").unwrap();
    let bp = branch_poly(&fam).unwrap();
    let rep = monodromy_group::<f64>(&fam, None, &cfg).unwrap();
    let series = rep.group.derived_series().unwrap();
    let sliced = SlicedFamily::<f64>::new(&fam, rep.slice.clone(), &bp).unwrap();
    let grid = SampleGrid::build(
        &sliced,
        rep.base.t.to_c64(),
        rep.radius,
        &rep.base,
        24,
        0.0,
        &cfg,
    )
    .unwrap();
    let refused = solvrad::radicals::radical_tower(&rep, &series, &grid, &cfg);
    c.check(
        matches!(refused, Err(solvrad::Error::WrongTerminal(_))),
        "radical_tower refuses the perfect core",
    );
    // local monodromy at the origin
    let local = solvrad::report::local(
        "y^5 + a*y + b",
        &[Cx64::zero(), Cx64::zero()],
        0.5,
        &opts(),
    )
    .unwrap();
    c.check(
        local.group_order == 120,
        format!("local order 120, got {}", local.group_order),
    );
    c.check(!local.solvable, "local group unsolvable");
    c.finish(60.0);
}

#[test]
fn criterion_06_reducible_family_orbits() {
    let mut c = Criterion::new(6, "product family: two orbits of size 2, order-2 restrictions");
    let (rep, _) = rep_for("(y^2 - x)*(y^2 - x - 1)");
    let orbits = rep.group.orbits();
    c.check(orbits.len() == 2, format!("two orbits, got {}", orbits.len()));
    c.check(
        orbits.iter().all(|o| o.len() == 2),
        "both orbits have size 2",
    );
    for o in &orbits {
        let restricted = rep.group.restrict_to_orbit(o).unwrap();
        c.check(
            restricted.order().unwrap() == 2,
            format!("orbit {o:?} restricted order 2"),
        );
    }
    c.finish(10.0);
}

const FAMILIES: [&str; 5] = [
    "y^2 - x",
    "y^3 - x",
    "y^3 + p*y + q",
    "y^4 + p*y + q",
    "y^5 + a*y + b",
];

#[test]
fn criterion_07_puncture_loops_are_identity() {
    let mut c = Criterion::new(7, "loops around non-branch punctures act trivially (20 trials each)");
    let cfg = Settings::default();
    for eq in FAMILIES {
        let (rep, sliced) = rep_for(eq);
        let t0 = rep.base.t.to_c64();
        let bvals = rep.branch.values_c64();
        let span = 1.0 + rep.branch.max_magnitude();
        let mut rng = Rng::new(0xca7_f00d);
        let mut trials = 0;
        while trials < 20 {
            let cand = Cx64::new(
                (rng.unit() * 2.0 - 1.0) * span,
                (rng.unit() * 2.0 - 1.0) * span,
            );
            let too_close = bvals.iter().any(|&b| cand.dist_f64(b) < 0.15 * span)
                || cand.dist_f64(t0) < 0.3 * span;
            if too_close {
                continue;
            }
            let lp = puncture_loop(cand, &bvals, &rep.branch.cluster_radius, t0, &cfg).unwrap();
            let perm = loop_permutation(&sliced, &lp, &rep.base, &cfg).unwrap();
            c.check(
                perm.is_identity(),
                format!("{eq}: puncture at {cand:?} gave {perm}"),
            );
            trials += 1;
        }
    }
    c.finish(60.0);
}

#[test]
fn criterion_08_loop_at_infinity() {
    let mut c = Criterion::new(8, "composed petals equal the big-circle permutation");
    let cfg = Settings::default();
    for eq in FAMILIES {
        let (rep, sliced) = rep_for(eq);
        let t0 = rep.base.t.to_c64();
        let big = infinity_loop(t0, &cfg);
        let big_perm = loop_permutation(&sliced, &big, &rep.base, &cfg).unwrap();
        let composed = compose_in_path_order(&rep.perms, rep.group.degree());
        c.check(
            big_perm == composed,
            format!("{eq}: big circle {big_perm} vs composed {composed}"),
        );
    }
    c.finish(60.0);
}

#[test]
fn criterion_09_resolvent_split_residuals() {
    let mut c = Criterion::new(9, "every split reassembles and is an exact eigenbasis on the grid");
    let mut total_splits = 0;
    for eq in ["y^2 - x", "y^3 - x", "y^4 - x", "y^5 - x", "y^6 - x", "y^7 - x", "y^3 + p*y + q", "y^4 + p*y + q"] {
        let r = analyze(eq, &opts()).unwrap();
        for s in &r.splits {
            total_splits += 1;
            c.check(
                s.reassembly_residual <= 1e-10,
                format!("{eq} level {}: reassembly {:.3e}", s.level, s.reassembly_residual),
            );
            c.check(
                s.eigen_residual <= 1e-8,
                format!("{eq} level {}: eigen {:.3e}", s.level, s.eigen_residual),
            );
            c.check(
                s.power_residual <= 1e-8,
                format!("{eq} level {}: power {:.3e}", s.level, s.power_residual),
            );
        }
    }
    c.check(total_splits >= 10, format!("saw {total_splits} splits"));
    c.finish(60.0);
}

#[test]
fn criterion_10_quintic_rescaling_identity() {
    let mut c = Criterion::new(10, "y = a^(1/4) g(b a^(-5/4)) solves y^5 + a y + b");
    let cfg = Settings::default();
    let mut rng = Rng::new(0x1d37_17e5);
    let mut trials = 0;
    while trials < 10 {
        let a = Cx64::new(rng.unit() * 4.0 - 2.0, rng.unit() * 4.0 - 2.0);
        let b = Cx64::new(rng.unit() * 4.0 - 2.0, rng.unit() * 4.0 - 2.0);
        if a.abs() < 0.1 {
            continue;
        }
        trials += 1;
        // fixed branch: principal fourth root of a
        let s = Cx64::from_polar(a.abs().powf(0.25), a.arg_f64() / 4.0);
        let s5 = s.powu(5);
        let u = b / s5;
        // all five g with g^5 + g + u = 0
        let coeffs = [
            Cx64::one(),
            Cx64::zero(),
            Cx64::zero(),
            Cx64::zero(),
            Cx64::one(),
            u,
        ];
        let gs = solvrad::roots::all_roots(&coeffs, 0, &cfg).unwrap();
        for g in gs {
            let y = s * g;
            let residual = (y.powu(5) + a * y + b).abs();
            let scale = 1.0 + y.abs().powi(5) + (a * y).abs() + b.abs();
            c.check(
                residual / scale <= 1e-8,
                format!("a={a:?} b={b:?}: residual {residual:.3e}"),
            );
        }
    }
    c.finish(1.0);
}

#[test]
fn criterion_11_deterministic_reports() {
    let mut c = Criterion::new(11, "same input and seed give byte-identical JSON");
    let r1 = analyze("y^2 - x", &opts()).unwrap().to_json_string();
    let r2 = analyze("y^2 - x", &opts()).unwrap().to_json_string();
    c.check(r1 == r2, "reports differ");
    c.finish(10.0);
}
