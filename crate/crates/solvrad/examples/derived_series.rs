//! Group-theoretic machinery on its own: derived series, solvability
//! verdicts, and exact character tables of the abelian quotients.
//!
//! ```bash
//! cargo run --example derived_series
//! ```

use solvrad::groups::{quotient_characters, Perm, PermGroup, Solvability, Terminal};

fn main() {
    let s4 = PermGroup::new(
        4,
        vec![
            Perm::parse("(1 2)", 4).unwrap(),
            Perm::parse("(1 2 3 4)", 4).unwrap(),
        ],
        1_000_000,
    )
    .unwrap();

    let series = s4.derived_series().unwrap();
    println!("derived series of S4:");
    for (k, g) in series.chain.iter().enumerate() {
        let gens: Vec<String> = g.generators().iter().map(|p| p.to_string()).collect();
        println!(
            "  G^{k}: order {:>2}, generators {}",
            g.order().unwrap(),
            if gens.is_empty() { "(identity)".into() } else { gens.join("  ") }
        );
    }
    match series.terminal {
        Terminal::Solvable { steps } => println!("  solvable in {steps} steps"),
        Terminal::Perfect { core_order } => println!("  perfect core of order {core_order}"),
    }

    println!("\ncharacter tables along the series:");
    for w in series.chain.windows(2) {
        let t = quotient_characters(&w[0], &w[1]).unwrap();
        println!(
            "  quotient of order {} = product of cyclic factors {:?}",
            t.quotient_order, t.factor_orders
        );
        for (i, row) in t.values.iter().enumerate() {
            let vals: Vec<String> = row.iter().map(|z| z.to_string()).collect();
            println!("    chi_{i} (order {}): [{}]", t.character_order(i), vals.join(", "));
        }
    }

    println!();
    for (name, gens, n) in [
        ("C5", vec!["(1 2 3 4 5)"], 5usize),
        ("S4", vec!["(1 2)", "(1 2 3 4)"], 4),
        ("S5", vec!["(1 2)", "(1 2 3 4 5)"], 5),
        ("A5", vec!["(1 2 3)", "(3 4 5)"], 5),
    ] {
        let g = PermGroup::new(
            n,
            gens.iter().map(|s| Perm::parse(s, n).unwrap()).collect(),
            1_000_000,
        )
        .unwrap();
        match g.is_solvable().unwrap() {
            Solvability::Solvable { steps } => {
                println!("{name}: solvable (derived series reaches identity in {steps} steps)")
            }
            Solvability::Unsolvable { core_order } => {
                println!("{name}: NOT solvable (perfect core of order {core_order})")
            }
        }
    }
}
