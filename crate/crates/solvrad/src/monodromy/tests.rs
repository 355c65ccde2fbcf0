use super::*;
use crate::polyalg::parse_family;

fn cfg() -> Settings {
    Settings::default()
}

fn c(re: f64, im: f64) -> Cx64 {
    Cx64::new(re, im)
}

fn sliced_identity(eq: &str) -> SlicedFamily<f64> {
    let fam = parse_family(eq).unwrap();
    let bp = branch_poly(&fam).unwrap();
    let slice = if fam.vars.is_empty() {
        SliceLine {
            origin: vec![],
            direction: vec![],
        }
    } else {
        SliceLine::identity()
    };
    SlicedFamily::new(&fam, slice, &bp).unwrap()
}

/// Independent dense-tracking oracle: fixed tiny steps, bare Newton per
/// root, no bisection or acceptance machinery.
fn dense_track_oracle(
    sliced: &SlicedFamily<f64>,
    path: &[Cx64],
    start_roots: &[Cx64],
    steps_per_seg: usize,
) -> Vec<Cx64> {
    let mut roots = start_roots.to_vec();
    for w in path.windows(2) {
        for k in 1..=steps_per_seg {
            let s = k as f64 / steps_per_seg as f64;
            let t = w[0] + (w[1] - w[0]).scale(s);
            let coeffs = sliced.coeffs_at(t);
            let n = coeffs.len() - 1;
            let deriv: Vec<Cx64> = coeffs[..n]
                .iter()
                .enumerate()
                .map(|(j, &cc)| cc.scale((n - j) as f64))
                .collect();
            for z in roots.iter_mut() {
                for _ in 0..30 {
                    let p = horner_desc(&coeffs, *z);
                    let dp = horner_desc(&deriv, *z);
                    let step = p / dp;
                    *z = *z - step;
                    if step.abs() < 1e-13 * (1.0 + z.abs()) {
                        break;
                    }
                }
            }
        }
    }
    roots
}

#[test]
fn branch_points_of_quadratic() {
    let sliced = sliced_identity("y^2 - x");
    let bps = branch_points(&sliced, &cfg()).unwrap();
    assert_eq!(bps.len(), 1);
    assert!(bps.values[0].abs() < 1e-12);
}

#[test]
fn branch_points_empty_for_constant_roots() {
    let sliced = sliced_identity("y^2 - 1");
    let bps = branch_points(&sliced, &cfg()).unwrap();
    assert!(bps.is_empty());
}

#[test]
fn branch_points_of_cyclic_collapse_to_one() {
    // disc of y^n - x is a power of x: the square-free part has the single
    // root 0, so exactly one branch point survives
    for n in 2..=7 {
        let sliced = sliced_identity(&format!("y^{n} - x"));
        let bps = branch_points(&sliced, &cfg()).unwrap();
        assert_eq!(bps.len(), 1, "n = {n}");
        assert!(bps.values[0].abs() < 1e-10);
    }
}

#[test]
fn quintic_branch_points_closed_form() {
    // slice (a, b) = (t, 1/10): 256 t^5 + 3125/10^4 = 0
    let fam = parse_family("y^5 + a*y + b").unwrap();
    let bp = branch_poly(&fam).unwrap();
    let slice = SliceLine {
        origin: vec![GaussRat::zero(), GaussRat::from_ratio(1, 10)],
        direction: vec![GaussRat::one(), GaussRat::zero()],
    };
    let sliced = SlicedFamily::<f64>::new(&fam, slice, &bp).unwrap();
    let bps = branch_points(&sliced, &cfg()).unwrap();
    assert_eq!(bps.len(), 5);
    let r = (3125.0e-4f64 / 256.0).powf(0.2);
    for v in &bps.values {
        assert!((v.abs() - r).abs() < 1e-9, "|t| = {}", v.abs());
        // 256 t^5 = -3125/10^4: t^5 must be real negative
        let t5 = v.powu(5);
        assert!(t5.re < 0.0 && t5.im.abs() < 1e-9 * r.powi(5));
    }
}

#[test]
fn petal_loops_examples() {
    // single branch point at 0, base 1
    let loops = petal_loops(&[c(0.0, 0.0)], &[1e-8], c(1.0, 0.0), &cfg()).unwrap();
    assert_eq!(loops.len(), 1);
    assert_eq!(loops[0].encircled, Some(0));
    assert_eq!(loops[0].waypoints.first().unwrap().dist_f64(c(1.0, 0.0)), 0.0);
    assert_eq!(loops[0].waypoints.last().unwrap().dist_f64(c(1.0, 0.0)), 0.0);

    // empty branch set -> no loops
    let loops = petal_loops(&[], &[], c(1.0, 0.0), &cfg()).unwrap();
    assert!(loops.is_empty());

    // two branch points at +-i, base 2: the -i loop comes first
    let loops = petal_loops(&[c(0.0, 1.0), c(0.0, -1.0)], &[1e-8, 1e-8], c(2.0, 0.0), &cfg()).unwrap();
    assert_eq!(loops.len(), 2);
    assert_eq!(loops[0].encircled, Some(1), "-i has the smaller argument");
    assert_eq!(loops[1].encircled, Some(0));
}

#[test]
fn base_too_close_to_branch_point_errors() {
    let err = petal_loops(&[c(1.0, 0.0)], &[1e-8], c(1.0, 0.0), &cfg()).unwrap_err();
    assert!(matches!(err, Error::LoopConstruction(_)));
}

#[test]
fn constant_path_is_identity_continuation() {
    let sliced = sliced_identity("y^2 - x");
    let base = slice_fiber_at(&sliced, c(4.0, 0.0), &cfg()).unwrap();
    let path = vec![c(4.0, 0.0), c(4.0, 0.0)];
    let end = track_fiber(&sliced, &path, &base, &cfg()).unwrap();
    for (a, b) in end.roots.iter().zip(&base.roots) {
        assert!(a.dist_f64(*b) < 1e-12);
    }
}

#[test]
fn quadratic_circle_swaps_roots() {
    let sliced = sliced_identity("y^2 - x");
    let base = slice_fiber_at(&sliced, c(1.0, 0.0), &cfg()).unwrap();
    let mut path = Vec::new();
    for k in 0..=64 {
        let phi = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
        path.push(Cx64::from_polar(1.0, phi));
    }
    let end = track_fiber(&sliced, &path, &base, &cfg()).unwrap();
    let perm = match_to_base(&end, &base).unwrap();
    assert_eq!(perm.to_string(), "(1 2)");
    // independent dense oracle agrees
    let oracle_end = dense_track_oracle(&sliced, &path, &base.roots, 64);
    for (a, b) in end.roots.iter().zip(&oracle_end) {
        assert!(a.dist_f64(*b) < 1e-8);
    }
}

#[test]
fn cyclic_circle_is_full_cycle() {
    // y^n - x around 0: an n-cycle, matching t^{1/n} continuation
    for n in 2..=5usize {
        let sliced = sliced_identity(&format!("y^{n} - x"));
        let base = slice_fiber_at(&sliced, c(1.0, 0.0), &cfg()).unwrap();
        let mut path = Vec::new();
        for k in 0..=96 {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / 96.0;
            path.push(Cx64::from_polar(1.0, phi));
        }
        let end = track_fiber(&sliced, &path, &base, &cfg()).unwrap();
        let perm = match_to_base(&end, &base).unwrap();
        // closed form: root exp(2 pi i k/n) moves to exp(2 pi i (k+1)/n)
        let mut expected = vec![usize::MAX; n];
        let roots64: Vec<Cx64> = base.roots.iter().map(|r| r.to_c64()).collect();
        for (j, &z) in roots64.iter().enumerate() {
            let rotated = z * Cx64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
            let (tgt, d) = roots64
                .iter()
                .enumerate()
                .map(|(i, &w)| (i, w.dist_f64(rotated)))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            assert!(d < 1e-9);
            expected[j] = tgt;
        }
        let expected = Perm::from_images(expected).unwrap();
        assert_eq!(perm, expected, "n = {n}");
        let cycles = perm.cycles();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].len(), n);
    }
}

#[test]
fn monodromy_of_quadratic_is_transposition() {
    let fam = parse_family("y^2 - x").unwrap();
    let rep = monodromy_group::<f64>(&fam, None, &cfg()).unwrap();
    assert_eq!(rep.perms.len(), 1);
    assert_eq!(rep.perms[0].to_string(), "(1 2)");
    assert_eq!(rep.group.order().unwrap(), 2);
}

#[test]
fn monodromy_of_split_quadratic_is_trivial() {
    let fam = parse_family("y^2 - 1").unwrap();
    let rep = monodromy_group::<f64>(&fam, None, &cfg()).unwrap();
    assert!(rep.perms.is_empty());
    assert_eq!(rep.group.order().unwrap(), 1);
}

#[test]
fn monodromy_of_quintic_is_s5() {
    let fam = parse_family("y^5 + a*y + b").unwrap();
    let rep = monodromy_group::<f64>(&fam, None, &cfg()).unwrap();
    assert_eq!(rep.perms.len(), 5);
    for p in &rep.perms {
        assert!(p.is_transposition(), "{p}");
    }
    assert_eq!(rep.group.order().unwrap(), 120);
}

#[test]
fn loop_reversal_gives_identity() {
    let fam = parse_family("y^3 + x*y + 1").unwrap();
    let rep = monodromy_group::<f64>(&fam, None, &cfg()).unwrap();
    let bp = branch_poly(&fam).unwrap();
    let sliced = SlicedFamily::<f64>::new(&fam, rep.slice.clone(), &bp).unwrap();
    for lp in &rep.loops {
        let mut path = lp.waypoints.clone();
        let mut back = lp.waypoints.clone();
        back.reverse();
        path.extend_from_slice(&back[1..]);
        let end = track_fiber(&sliced, &path, &rep.base, &cfg()).unwrap();
        let perm = match_to_base(&end, &rep.base).unwrap();
        assert!(perm.is_identity());
    }
}

#[test]
fn puncture_loop_is_identity() {
    // loop around a non-branch point: enlarging the hypersurface changes nothing
    let fam = parse_family("y^3 + x*y + 1").unwrap();
    let rep = monodromy_group::<f64>(&fam, None, &cfg()).unwrap();
    let bp = branch_poly(&fam).unwrap();
    let sliced = SlicedFamily::<f64>::new(&fam, rep.slice.clone(), &bp).unwrap();
    let t0 = rep.base.t.to_c64();
    let mut rng = Rng::new(99);
    let bvals = rep.branch.values_c64();
    let mut done = 0;
    while done < 5 {
        let cand = Cx64::new(rng.unit() * 3.0 - 1.5, rng.unit() * 3.0 - 1.5);
        let near = bvals.iter().any(|&b| cand.dist_f64(b) < 0.3) || cand.dist_f64(t0) < 0.5;
        if near {
            continue;
        }
        let lp = puncture_loop(cand, &bvals, &rep.branch.cluster_radius, t0, &cfg()).unwrap();
        let perm = loop_permutation(&sliced, &lp, &rep.base, &cfg()).unwrap();
        assert!(perm.is_identity(), "puncture at {cand:?} gave {perm}");
        done += 1;
    }
}

#[test]
fn loop_at_infinity_matches_composed_petals() {
    for eq in ["y^2 - x", "y^3 + x*y + 1", "y^5 + a*y + b"] {
        let fam = parse_family(eq).unwrap();
        let rep = monodromy_group::<f64>(&fam, None, &cfg()).unwrap();
        let bp = branch_poly(&fam).unwrap();
        let sliced = SlicedFamily::<f64>::new(&fam, rep.slice.clone(), &bp).unwrap();
        let t0 = rep.base.t.to_c64();
        let big = infinity_loop(t0, &cfg());
        let big_perm = loop_permutation(&sliced, &big, &rep.base, &cfg()).unwrap();
        let composed = compose_in_path_order(&rep.perms, fam.n);
        assert_eq!(big_perm, composed, "family {eq}");
    }
}

#[test]
fn base_point_independence_of_group_order() {
    let fam = parse_family("y^3 + x*y + 1").unwrap();
    let orders: Vec<usize> = [0u64, 1, 2]
        .iter()
        .map(|&seed| {
            let rep =
                monodromy_group::<f64>(&fam, None, &cfg().with_seed(seed)).unwrap();
            rep.group.order().unwrap()
        })
        .collect();
    assert!(orders.windows(2).all(|w| w[0] == w[1]), "{orders:?}");
}

#[test]
fn product_family_has_two_orbits() {
    let fam = parse_family("(y^2 - x)*(y^2 - x - 1)").unwrap();
    let rep = monodromy_group::<f64>(&fam, None, &cfg()).unwrap();
    let orbits = rep.group.orbits();
    assert_eq!(orbits.len(), 2);
    assert!(orbits.iter().all(|o| o.len() == 2));
    assert!(!rep.group.is_transitive());
    for o in &orbits {
        let restricted = rep.group.restrict_to_orbit(o).unwrap();
        assert_eq!(restricted.order().unwrap(), 2);
    }
    // an irreducible family by contrast acts transitively
    let fam = parse_family("y^3 + x*y + 1").unwrap();
    let rep = monodromy_group::<f64>(&fam, None, &cfg()).unwrap();
    assert!(rep.group.is_transitive());
}

#[test]
fn local_monodromy_away_from_branch_is_trivial() {
    let fam = parse_family("y^2 - x").unwrap();
    let report = local_monodromy::<f64>(&fam, &[c(1.0, 0.0)], 0.2, &cfg()).unwrap();
    assert_eq!(report.rep.group.order().unwrap(), 1);
    assert_eq!(report.orbits.len(), 2);
    let germs = ramified_germs(&report);
    assert!(germs.iter().all(|o| o.len() == 1));
}

#[test]
fn local_monodromy_at_branch_point() {
    let fam = parse_family("y^2 - x").unwrap();
    let report = local_monodromy::<f64>(&fam, &[c(0.0, 0.0)], 0.5, &cfg()).unwrap();
    assert_eq!(report.rep.group.order().unwrap(), 2);
    assert_eq!(report.orbits, vec![vec![0, 1]]);
}

#[test]
fn local_quintic_at_origin_is_s5() {
    let fam = parse_family("y^5 + a*y + b").unwrap();
    let report =
        local_monodromy::<f64>(&fam, &[c(0.0, 0.0), c(0.0, 0.0)], 0.5, &cfg()).unwrap();
    assert_eq!(report.rep.group.order().unwrap(), 120);
    assert_eq!(report.orbits.len(), 1);
}

#[test]
fn ramified_germs_of_mixed_factor_family() {
    // (y^2 - x)(y - 1): at x = 0 one ramified germ of degree 2, one simple
    let fam = parse_family("(y^2 - x)*(y - 1)").unwrap();
    let report = local_monodromy::<f64>(&fam, &[c(0.0, 0.0)], 0.25, &cfg()).unwrap();
    let mut sizes: Vec<usize> = report.orbits.iter().map(|o| o.len()).collect();
    sizes.sort();
    assert_eq!(sizes, vec![1, 2]);
}

#[test]
fn collinear_branch_points_force_detours_and_still_compose() {
    // y^2 = x(x - 3/2): branch points 0 and 3/2 on the real axis; a real
    // base point makes the stem to 0 pass straight through the petal disk
    // around 3/2, so the detour machinery must engage.
    let sliced = sliced_identity("y^2 - x^2 + (3/2)*x");
    let bps = vec![c(0.0, 0.0), c(1.5, 0.0)];
    let t0 = c(5.0, 0.0);
    let loops = petal_loops(&bps, &[1e-9, 1e-9], t0, &cfg()).unwrap();
    assert_eq!(loops.len(), 2);
    // loop invariant: waypoints keep their margin from non-encircled points
    for lp in &loops {
        let j = lp.encircled.unwrap();
        for w in &lp.waypoints {
            for (k, &b) in bps.iter().enumerate() {
                if k != j {
                    assert!(
                        w.dist_f64(b) > 0.3,
                        "waypoint {w:?} of loop {j} too close to branch {k}"
                    );
                }
            }
        }
    }
    // the stem to 0 is longer than the straight segment: a detour happened
    let far_loop = loops.iter().find(|l| {
        bps[l.encircled.unwrap()].dist_f64(c(0.0, 0.0)) < 0.1
    }).unwrap();
    let stem_len: f64 = far_loop
        .waypoints
        .windows(2)
        .map(|w| w[0].dist_f64(w[1]))
        .sum();
    let straight = 2.0 * (5.0 - 0.75) + 2.0 * std::f64::consts::PI * 0.75;
    assert!(stem_len > straight + 0.1, "stem {stem_len} vs straight {straight}");
    // and the permutations still compose to the big circle
    let base = slice_fiber_at(&sliced, t0, &cfg()).unwrap();
    let perms: Vec<Perm> = loops
        .iter()
        .map(|lp| loop_permutation(&sliced, lp, &base, &cfg()).unwrap())
        .collect();
    for p in &perms {
        assert_eq!(p.to_string(), "(1 2)");
    }
    let big = infinity_loop(t0, &cfg());
    let big_perm = loop_permutation(&sliced, &big, &base, &cfg()).unwrap();
    assert_eq!(big_perm, compose_in_path_order(&perms, 2));
}

#[test]
fn slice_flag_round_trip() {
    let s = SliceLine::parse_flag("1/2,0;1,-1/3+2*i").unwrap();
    let back = SliceLine::parse_flag(&s.to_flag_string()).unwrap();
    assert_eq!(s, back);
}

#[test]
fn degenerate_family_detected() {
    // (y - 1)^2 has identically vanishing discriminant
    let fam = parse_family("y^2 - 2*y + 1").unwrap();
    let err = monodromy_group::<f64>(&fam, None, &cfg()).unwrap_err();
    assert!(matches!(err, Error::DegenerateFamily(_)), "{err}");
}

#[test]
fn dd_tracking_reaches_tighter_residuals() {
    use crate::num::Dd;
    let fam = parse_family("y^2 - x").unwrap();
    let rep = monodromy_group::<Dd>(&fam, None, &cfg()).unwrap();
    assert_eq!(rep.group.order().unwrap(), 2);
    assert!(rep.base.residual < 1e-25, "residual {}", rep.base.residual);
}
