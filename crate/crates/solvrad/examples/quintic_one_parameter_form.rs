//! Although y^5 + a*y + b is not solvable by radicals, its root IS a
//! composition of one single-variable algebraic function and radicals once
//! division is allowed: y(a, b) = a^(1/4) * g(b * a^(-5/4)) where
//! g^5 + g + u = 0. This example checks the identity numerically.
//!
//! ```bash
//! cargo run --example quintic_one_parameter_form
//! ```

use solvrad::num::Cx64;
use solvrad::rng::Rng;
use solvrad::roots::all_roots;
use solvrad::Settings;

fn main() {
    let cfg = Settings::default();
    let mut rng = Rng::new(2024);
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let a = Cx64::new(rng.unit() * 4.0 - 2.0, rng.unit() * 4.0 - 2.0);
        let b = Cx64::new(rng.unit() * 4.0 - 2.0, rng.unit() * 4.0 - 2.0);
        if a.abs() < 0.1 {
            continue;
        }
        // fixed branch: principal fourth root of a
        let s = Cx64::from_polar(a.abs().powf(0.25), a.arg_f64() / 4.0);
        let u = b / s.powu(5);
        // solve the one-parameter quintic g^5 + g + u = 0
        let coeffs = [
            Cx64::one(),
            Cx64::zero(),
            Cx64::zero(),
            Cx64::zero(),
            Cx64::one(),
            u,
        ];
        let gs = all_roots(&coeffs, 0, &cfg).unwrap();
        for g in gs {
            let y = s * g;
            let residual = (y.powu(5) + a * y + b).abs();
            worst = worst.max(residual);
        }
        println!(
            "trial {trial}: a = {:+.3}{:+.3}i  b = {:+.3}{:+.3}i  -> all five rescaled roots satisfy the quintic",
            a.re, a.im, b.re, b.im
        );
    }
    println!("\nmax residual of y^5 + a*y + b over all trials: {worst:.3e}");
    assert!(worst < 1e-8);
}
