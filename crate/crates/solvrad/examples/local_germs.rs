//! Local monodromy: loops confined to a small ball around a point. The
//! orbits of the local group are the ramified germs there; the orbit size is
//! each germ's local degree. The radius halves until the group stabilizes.
//!
//! ```bash
//! cargo run --example local_germs
//! ```

use solvrad::num::Cx64;
use solvrad::report::{local, AnalyzeOptions};

fn main() {
    let opts = AnalyzeOptions::default();

    // (y^2 - x)(y - 1) near x = 0: one double germ, one simple germ
    let l = local("(y^2 - x)*(y - 1)", &[Cx64::zero()], 0.25, &opts).unwrap();
    println!("(y^2 - x)(y - 1) at x = 0:");
    println!(
        "  local group order {} after {} extra shrink(s), radius {}",
        l.group_order, l.shrinks, l.radius_stabilized
    );
    for germ in &l.ramified_germs {
        println!(
            "  ramified germ of local degree {}: sheets {:?}",
            germ.len(),
            germ
        );
    }

    // the same family away from the branch locus: everything splits
    let l = local("(y^2 - x)*(y - 1)", &[Cx64::new(2.0, 0.0)], 0.25, &opts).unwrap();
    println!("\n(y^2 - x)(y - 1) at x = 2:");
    println!("  local group order {}", l.group_order);
    println!(
        "  {} unramified germs: the function is analytic here",
        l.ramified_germs.len()
    );
}
