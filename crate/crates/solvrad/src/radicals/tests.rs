use super::*;
use crate::groups::Solvability;
use crate::monodromy::monodromy_group;
use crate::polyalg::{parse_family, AlgebraicFamily};

fn cfg() -> Settings {
    Settings::default()
}

fn pipeline(
    eq: &str,
    seed: u64,
) -> (
    AlgebraicFamily,
    MonodromyRep<f64>,
    DerivedSeries,
    SampleGrid<f64>,
) {
    let cfg = cfg().with_seed(seed);
    let fam = parse_family(eq).unwrap();
    let rep = monodromy_group::<f64>(&fam, None, &cfg).unwrap();
    let series = rep.group.derived_series().unwrap();
    let bp = crate::polyalg::branch_poly(&fam).unwrap();
    let sliced = SlicedFamily::<f64>::new(&fam, rep.slice.clone(), &bp).unwrap();
    let grid = SampleGrid::build(
        &sliced,
        rep.base.t.to_c64(),
        rep.radius,
        &rep.base,
        cfg.grid_samples(),
        0.0,
        &cfg,
    )
    .unwrap();
    (fam, rep, series, grid)
}

#[test]
fn act_relabels_roots() {
    let p = Perm::parse("(1 2)", 2).unwrap();
    let y1 = FieldElem::root(0);
    let moved = act(&p, &y1).unwrap();
    // act((1 2), y1) = y2: evaluation with labels [a, b] gives b
    let roots = [Cx::<f64>::new(3.0, 0.0), Cx::new(5.0, 0.0)];
    assert_eq!(moved.eval(&roots, Cx::zero()).re, 5.0);

    // rational leaves are fixed (and shared)
    let r = FieldElem::parameter();
    let moved = act(&p, &r).unwrap();
    assert_eq!(r.key(), moved.key());

    // act((1 2 3), y1*y2) = y2*y3
    let p3 = Perm::parse("(1 2 3)", 3).unwrap();
    let prod = FieldElem::mul(FieldElem::root(0), FieldElem::root(1));
    let moved = act(&p3, &prod).unwrap();
    let roots = [
        Cx::<f64>::new(2.0, 0.0),
        Cx::new(7.0, 0.0),
        Cx::new(11.0, 0.0),
    ];
    assert_eq!(moved.eval(&roots, Cx::zero()).re, 77.0);
}

#[test]
fn act_degree_mismatch_detected() {
    let p = Perm::parse("(1 2)", 2).unwrap();
    let y3 = FieldElem::root(2);
    assert!(matches!(
        act(&p, &y3).unwrap_err(),
        Error::DegreeMismatch(..)
    ));
}

#[test]
fn invariance_examples() {
    let (_fam, rep, _series, grid) = pipeline("y^2 - x", 0);
    let h = &rep.group;
    let y1 = FieldElem::root(0);
    let y2 = FieldElem::root(1);
    let sum = FieldElem::add(y1.clone(), y2.clone());
    let diff_sq = FieldElem::sub(y1.clone(), y2.clone()).pow(2);
    let tol = 1e-8;
    assert!(is_invariant(&sum, h, &grid, tol).unwrap());
    assert!(!is_invariant(&y1, h, &grid, tol).unwrap());
    assert!(is_invariant(&diff_sq, h, &grid, tol).unwrap());
}

#[test]
fn resolvent_split_of_quadratic() {
    let (_fam, rep, series, grid) = pipeline("y^2 - x", 0);
    assert!(series.is_solvable());
    let table = quotient_characters(&series.chain[0], &series.chain[1]).unwrap();
    let y1 = FieldElem::root(0);
    let (comps, record) = resolvent_split(&y1, &table, &grid, &cfg(), &tols_for::<f64>()).unwrap();
    // (y1+y2)/2 vanishes for y^2 - x and is dropped; (y1-y2)/2 survives
    assert_eq!(comps.len(), 1);
    assert_eq!(record.dropped.len(), 1);
    assert_eq!(comps[0].char_order, 2);
    assert!(record.reassembly_residual < 1e-12);
    assert!(record.eigen_residual < 1e-10);
    // its square reconstructs to the rational function t
    let sq = comps[0].elem.pow(2);
    let rec = rational_reconstruct(&sq, &grid, 8, &tols_for::<f64>()).unwrap();
    let RatRep::Exact(r) = &rec.rep else {
        panic!("expected exact reconstruction")
    };
    assert_eq!(r.to_string(), "t");
    let _ = rep;
}

#[test]
fn resolvent_split_trivial_quotient_returns_element() {
    let (_fam, _rep, series, grid) = pipeline("y^2 - 1", 0);
    // trivial monodromy: chain is just the trivial group; quotient of the
    // group by itself has order 1 and the single component is f itself
    let table = quotient_characters(&series.chain[0], &series.chain[0]).unwrap();
    assert_eq!(table.quotient_order, 1);
    let y1 = FieldElem::root(0);
    let (comps, record) = resolvent_split(&y1, &table, &grid, &cfg(), &tols_for::<f64>()).unwrap();
    assert_eq!(comps.len(), 1);
    assert!(record.dropped.is_empty());
    let (vals, _) = eval_on_grid(&comps[0].elem, &grid);
    let (yvals, _) = eval_on_grid(&y1, &grid);
    for (a, b) in vals.iter().zip(&yvals) {
        assert!((*a - *b).abs() < 1e-14);
    }
}

#[test]
fn resolvent_split_of_cyclic_cubic() {
    // y^3 - x on the identity slice: the full group is C3; y1 is a pure
    // cube-root germ, so exactly one character component survives and its
    // cube is the rational function t
    let (_fam, _rep, series, grid) = pipeline("y^3 - x", 0);
    let table = quotient_characters(&series.chain[0], &series.chain[1]).unwrap();
    assert_eq!(table.quotient_order, 3);
    let y1 = FieldElem::root(0);
    let (comps, record) = resolvent_split(&y1, &table, &grid, &cfg(), &tols_for::<f64>()).unwrap();
    assert_eq!(comps.len(), 1, "one Lagrange resolvent survives");
    assert_eq!(record.dropped.len(), 2);
    assert_eq!(comps[0].char_order, 3);
    let cube = comps[0].elem.pow(3);
    let rec = rational_reconstruct(&cube, &grid, 8, &tols_for::<f64>()).unwrap();
    let RatRep::Exact(r) = &rec.rep else {
        panic!("expected exact")
    };
    assert_eq!(r.to_string(), "t");
}

#[test]
fn reconstruct_vieta_examples() {
    let (_fam, _rep, _series, grid) = pipeline("y^2 - x", 0);
    let y1 = FieldElem::root(0);
    let y2 = FieldElem::root(1);
    let tols = tols_for::<f64>();

    // y1*y2 = -t
    let prod = FieldElem::mul(y1.clone(), y2.clone());
    let rec = rational_reconstruct(&prod, &grid, 8, &tols).unwrap();
    let RatRep::Exact(r) = &rec.rep else { panic!() };
    assert_eq!(r.to_string(), "(-1)*t");

    // y1 + y2 = 0
    let sum = FieldElem::add(y1.clone(), y2.clone());
    let rec = rational_reconstruct(&sum, &grid, 8, &tols).unwrap();
    let RatRep::Exact(r) = &rec.rep else { panic!() };
    assert!(r.is_zero());

    // y1^2 + y2^2 = 2t
    let squares = FieldElem::add(y1.pow(2), y2.pow(2));
    let rec = rational_reconstruct(&squares, &grid, 8, &tols).unwrap();
    let RatRep::Exact(r) = &rec.rep else { panic!() };
    assert_eq!(r.to_string(), "(2)*t");
}

#[test]
fn reconstruct_with_denominator_for_nonmonic_family() {
    // x*y^2 - 1: y1*y2 = -1/x = -1/t on the identity slice
    let (_fam, _rep, _series, grid) = pipeline("x*y^2 - 1", 0);
    let prod = FieldElem::mul(FieldElem::root(0), FieldElem::root(1));
    let rec = rational_reconstruct(&prod, &grid, 8, &tols_for::<f64>()).unwrap();
    assert_eq!((rec.num_degree, rec.den_degree), (0, 1));
    let RatRep::Exact(r) = &rec.rep else { panic!() };
    let t = Cx::<f64>::new(0.37, 1.2);
    assert!((r.eval(t) + Cx::one() / t).abs() < 1e-12);
}

#[test]
fn tower_for_quadratic() {
    let (_fam, rep, series, grid) = pipeline("y^2 - x", 0);
    let tower = radical_tower(&rep, &series, &grid, &cfg()).unwrap();
    assert_eq!(tower.expr.count_roots(), 1);
    assert_eq!(tower.expr.root_degrees(), vec![2]);
    assert_eq!(tower.expr.depth(), 1);
    assert!(tower.max_residual < 1e-9, "residual {}", tower.max_residual);
    assert!(tower.all_exact);
    // evaluates to y1 at the base point
    let v: Cx<f64> = tower.expr.eval_at_base(grid.t0).unwrap();
    assert!((v - grid.base.roots[0]).abs() < 1e-9);
}

#[test]
fn tower_for_cyclic_families_is_single_root_node() {
    for n in [3usize, 5] {
        let (_fam, rep, series, grid) = pipeline(&format!("y^{n} - x"), 0);
        let tower = radical_tower(&rep, &series, &grid, &cfg()).unwrap();
        assert_eq!(tower.expr.count_roots(), 1, "n = {n}");
        assert_eq!(tower.expr.root_degrees(), vec![n as u32]);
        assert!(tower.max_residual < 1e-9);
    }
}

#[test]
fn tower_for_cubic_matches_cardano() {
    let (fam, rep, series, grid) = pipeline("y^3 + p*y + q", 0);
    assert_eq!(rep.group.order().unwrap(), 6);
    assert_eq!(series.chain_orders().unwrap(), vec![6, 3, 1]);
    let tower = radical_tower(&rep, &series, &grid, &cfg()).unwrap();
    assert_eq!(tower.expr.depth(), 2, "square root inside the cube roots");
    assert!(
        tower.max_residual < 1e-6,
        "residual {}",
        tower.max_residual
    );
    // cross-check a few samples against Cardano's closed form
    let idx = [0usize, grid.len() / 2, grid.len() - 1];
    for &i in &idx {
        let s = &grid.samples[i];
        let x = rep.slice.point_at::<f64>(s.t);
        let (p, q) = (x[0], x[1]);
        let tower_val: Cx<f64> = tower.expr.eval_along_path(&s.path, &cfg()).unwrap();
        let best = cardano_roots(p, q)
            .into_iter()
            .map(|y| (y - tower_val).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-6, "sample {i}: distance {best}");
    }
    let _ = fam;
}

/// Cardano's closed form for y^3 + p y + q = 0 (any consistent branch).
fn cardano_roots(p: Cx<f64>, q: Cx<f64>) -> Vec<Cx<f64>> {
    let half_q = q.scale(0.5);
    let third_p = p.scale(1.0 / 3.0);
    let disc = half_q * half_q + third_p.powu(3);
    let s = sqrt_principal(disc);
    let mut c3 = -half_q + s;
    if c3.abs() < 1e-12 {
        c3 = -half_q - s;
    }
    let c = cbrt_principal(c3);
    let omega = Cx64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    (0..3)
        .map(|j| {
            let cj = c * omega.powu(j);
            cj - third_p / cj
        })
        .collect()
}

fn sqrt_principal(z: Cx64) -> Cx64 {
    Cx64::from_polar(z.abs().sqrt(), z.arg_f64() / 2.0)
}

fn cbrt_principal(z: Cx64) -> Cx64 {
    Cx64::from_polar(z.abs().cbrt(), z.arg_f64() / 3.0)
}

#[test]
fn tower_reruns_agree_across_seeds() {
    for seed in [0u64, 7] {
        let (_fam, rep, series, grid) = pipeline("y^3 + p*y + q", seed);
        let tower = radical_tower(&rep, &series, &grid, &cfg().with_seed(seed)).unwrap();
        assert!(
            tower.max_residual < 1e-6,
            "seed {seed}: residual {}",
            tower.max_residual
        );
        assert!(tower.samples_checked >= 21);
    }
}

#[test]
fn split_records_within_tolerance() {
    let (_fam, rep, series, grid) = pipeline("y^3 + p*y + q", 0);
    let tower = radical_tower(&rep, &series, &grid, &cfg()).unwrap();
    assert!(!tower.splits.is_empty());
    for rec in &tower.splits {
        assert!(rec.reassembly_residual <= 1e-10, "{rec:?}");
        assert!(rec.eigen_residual <= 1e-8, "{rec:?}");
        assert!(rec.power_residual <= 1e-8, "{rec:?}");
    }
}

#[test]
fn certificate_for_quintic() {
    let (_fam, rep, series, _grid) = pipeline("y^5 + a*y + b", 0);
    let cert = unsolvability_certificate(&rep, &series).unwrap();
    assert_eq!(cert.chain_orders, vec![120, 60, 60]);
    assert_eq!(cert.core_order, 60);
    assert_eq!(cert.generators.len(), 5);
    // and the tower refuses
    let grid = _grid;
    let err = radical_tower(&rep, &series, &grid, &cfg()).unwrap_err();
    assert!(matches!(err, Error::WrongTerminal(_)));
}

#[test]
fn certificate_refuses_solvable_series() {
    let (_fam, rep, series, _grid) = pipeline("y^5 - x", 0);
    assert!(matches!(
        rep.group.is_solvable().unwrap(),
        Solvability::Solvable { .. }
    ));
    let err = unsolvability_certificate(&rep, &series).unwrap_err();
    assert!(matches!(err, Error::WrongTerminal(_)));
}

#[test]
fn certificate_from_handbuilt_generators() {
    // <(1 2 3 4 5), (3 4 5)> = A5-containing: derived series lands on A5
    let g = PermGroup::new(
        5,
        vec![
            Perm::parse("(1 2 3 4 5)", 5).unwrap(),
            Perm::parse("(3 4 5)", 5).unwrap(),
        ],
        1_000_000,
    )
    .unwrap();
    let series = g.derived_series().unwrap();
    let Terminal::Perfect { core_order } = series.terminal else {
        panic!("expected a perfect core")
    };
    assert_eq!(core_order, 60);
}

#[test]
fn dichotomy_between_tower_and_certificate() {
    for eq in ["y^2 - x", "y^4 - x", "y^3 + p*y + q", "y^5 + a*y + b", "y^5 - x"] {
        let (_fam, rep, series, grid) = pipeline(eq, 0);
        let solvable = matches!(
            rep.group.is_solvable().unwrap(),
            Solvability::Solvable { .. }
        );
        let tower = radical_tower(&rep, &series, &grid, &cfg());
        let cert = unsolvability_certificate(&rep, &series);
        assert_eq!(tower.is_ok(), solvable, "{eq}");
        assert_eq!(cert.is_ok(), !solvable, "{eq}");
    }
}
