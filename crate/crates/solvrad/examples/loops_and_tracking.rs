//! Branch points on a slice, petal loops around them, and the permutations
//! obtained by tracking the fiber along each loop. Also demonstrates the
//! loop-at-infinity identity: the petal permutations composed in path order
//! equal one big counterclockwise circle around everything.
//!
//! ```bash
//! cargo run --example loops_and_tracking
//! ```

use solvrad::monodromy::{
    base_circle_radius, base_fiber_on_circle, branch_points, compose_in_path_order, infinity_loop,
    loop_permutation, petal_loops, SliceLine, SlicedFamily,
};
use solvrad::polyalg::{branch_poly, parse_family};
use solvrad::Settings;

fn main() {
    let cfg = Settings::default();
    let fam = parse_family("y^3 + x*y + 1").unwrap();
    let bp = branch_poly(&fam).unwrap();
    let sliced = SlicedFamily::<f64>::new(&fam, SliceLine::identity(), &bp).unwrap();

    let branch = branch_points(&sliced, &cfg).unwrap();
    println!("branch points of y^3 + x*y + 1 on the identity slice:");
    for (v, r) in branch.values.iter().zip(&branch.cluster_radius) {
        println!("  t = {:+.9}{:+.9}i   (cluster radius {:.1e})", v.re, v.im, r);
    }

    let radius = base_circle_radius(&branch);
    let (t0, base) = base_fiber_on_circle(&sliced, radius, &cfg).unwrap();
    println!("\nbase point on the circle of radius {radius}: {:+.6}{:+.6}i", t0.re, t0.im);

    let loops = petal_loops(&branch.values_c64(), &branch.cluster_radius, t0, &cfg).unwrap();
    let mut perms = Vec::new();
    for lp in &loops {
        let perm = loop_permutation(&sliced, lp, &base, &cfg).unwrap();
        println!(
            "petal around branch point {}: {} waypoints, permutation {}",
            lp.encircled.unwrap() + 1,
            lp.waypoints.len(),
            perm
        );
        perms.push(perm);
    }

    let big = infinity_loop(t0, &cfg);
    let big_perm = loop_permutation(&sliced, &big, &base, &cfg).unwrap();
    let composed = compose_in_path_order(&perms, fam.n);
    println!("\nbig circle permutation:      {big_perm}");
    println!("petals composed in order:    {composed}");
    assert_eq!(big_perm, composed);
    println!("the two agree, as they must.");
}
