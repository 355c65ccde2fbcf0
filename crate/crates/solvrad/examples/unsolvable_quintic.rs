//! The obstruction side: the quintic y^5 + a*y + b has monodromy S5, whose
//! derived series stabilizes at A5. No tower exists; the pipeline emits a
//! certificate instead, and the local group at the origin is already the
//! full S5.
//!
//! ```bash
//! cargo run --example unsolvable_quintic
//! ```

use solvrad::num::Cx64;
use solvrad::report::{analyze, local, AnalyzeOptions};

fn main() {
    let opts = AnalyzeOptions::default();
    let r = analyze("y^5 + a*y + b", &opts).unwrap();

    println!("equation: {}", r.equation);
    println!("group order: {}", r.group_order);
    println!(
        "derived series: {}",
        r.solvability
            .derived_chain_orders
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" > ")
    );
    assert!(!r.solvability.solvable);

    let cert = r.certificate.as_ref().expect("certificate present");
    println!(
        "certificate: perfect core of order {} generated by {}",
        cert.core_order,
        cert.core_generators.join("  ")
    );
    println!("=> no expression by rational functions, arithmetic, and radicals exists.\n");

    let l = local(
        "y^5 + a*y + b",
        &[Cx64::zero(), Cx64::zero()],
        0.5,
        &opts,
    )
    .unwrap();
    println!(
        "local monodromy at the origin: order {} ({}), stabilized at radius {}",
        l.group_order,
        if l.solvable { "solvable" } else { "unsolvable" },
        l.radius_stabilized
    );
    println!(
        "so the root cannot even be composed from single-variable entire\nalgebraic functions near the origin: the local obstruction is already full."
    );
}
