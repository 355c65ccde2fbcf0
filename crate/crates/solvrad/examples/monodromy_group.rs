//! The full monodromy group of a family: generators from petal loops,
//! group order by enumeration, and the orbit partition that decides
//! irreducibility.
//!
//! ```bash
//! cargo run --example monodromy_group
//! ```

use solvrad::monodromy::monodromy_group;
use solvrad::polyalg::parse_family;
use solvrad::Settings;

fn main() {
    let cfg = Settings::default();

    for eq in ["y^2 - x", "y^5 + a*y + b", "(y^2 - x)*(y^2 - x - 1)"] {
        let fam = parse_family(eq).unwrap();
        let rep = monodromy_group::<f64>(&fam, None, &cfg).unwrap();
        println!("family: {eq}");
        println!("  slice: {}", rep.slice.to_flag_string());
        println!("  branch points: {}", rep.branch.len());
        let gens: Vec<String> = rep.perms.iter().map(|p| p.to_string()).collect();
        println!("  generators: {}", if gens.is_empty() { "(none)".into() } else { gens.join("  ") });
        println!("  group order: {}", rep.group.order().unwrap());
        let orbits = rep.group.orbits();
        let orbit_strs: Vec<String> = orbits
            .iter()
            .map(|o| {
                format!(
                    "{{{}}}",
                    o.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ")
                )
            })
            .collect();
        println!(
            "  orbits: {}  -> {}",
            orbit_strs.join(" "),
            if orbits.len() == 1 {
                "the equation is irreducible"
            } else {
                "the equation factors"
            }
        );
        println!();
    }
}
