//! Numeric fibers: all n roots over a point with residual and separation
//! diagnostics, and the near-branch-locus failure mode.
//!
//! ```bash
//! cargo run --example fibers
//! ```

use solvrad::num::Cx;
use solvrad::polyalg::parse_family;
use solvrad::roots::fiber_at;
use solvrad::Settings;

fn main() {
    let cfg = Settings::default();
    let fam = parse_family("y^5 + a*y + b").unwrap();

    let point = [Cx::new(0.0, 0.0), Cx::new(1.0, 0.0)];
    let fiber = fiber_at::<f64>(&fam, &point, &cfg).unwrap();
    println!("fiber of y^5 + a*y + b over (a, b) = (0, 1):");
    for (k, r) in fiber.roots.iter().enumerate() {
        println!("  y{} = {:+.12}{:+.12}i", k + 1, r.re, r.im);
    }
    println!("  max residual  {:.3e}", fiber.residual);
    println!("  min separation {:.6} (= 2 sin(pi/5) = {:.6})",
        fiber.min_sep, 2.0 * (std::f64::consts::PI / 5.0).sin());

    // over a branch point the fiber degenerates and the call refuses
    let fam = parse_family("y^2 - x").unwrap();
    let err = fiber_at::<f64>(&fam, &[Cx::new(0.0, 0.0)], &cfg).unwrap_err();
    println!("\nfiber of y^2 - x over x = 0 -> {err}");

    // the same call at a safe point, at double-double precision
    use solvrad::num::Dd;
    let fiber = fiber_at::<Dd>(&fam, &[Cx::from_f64s(2.0, 0.0)], &cfg).unwrap();
    println!("\nfiber of y^2 - x over x = 2 at ~106-bit precision:");
    for r in &fiber.roots {
        println!("  y = {}", r.re);
    }
    println!("  max residual {:.3e}", fiber.residual);
}
