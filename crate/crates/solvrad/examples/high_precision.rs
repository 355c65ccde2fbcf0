//! The whole pipeline at ~106-bit double-double precision: deeper towers
//! amplify rounding, so the verification tolerance tightens from 1e-6 to
//! 1e-20 and the tower still passes with room to spare.
//!
//! ```bash
//! cargo run --example high_precision
//! ```

use solvrad::config::Precision;
use solvrad::report::{analyze, AnalyzeOptions};

fn main() {
    let mut opts = AnalyzeOptions::default();

    let r = analyze("y^3 + p*y + q", &opts).unwrap();
    let v = r.verification.as_ref().unwrap();
    println!(
        "53-bit run:  max residual {:.3e} (tolerance {:.1e})",
        v.max_residual, v.tolerance
    );

    opts.settings.precision = Precision::Dd;
    let r = analyze("y^3 + p*y + q", &opts).unwrap();
    let v = r.verification.as_ref().unwrap();
    println!(
        "106-bit run: max residual {:.3e} (tolerance {:.1e})",
        v.max_residual, v.tolerance
    );
    println!(
        "branch value of the innermost root, at full precision:\n  {} + {} i",
        r.radical_expr.as_ref().unwrap().base_point[0],
        r.radical_expr.as_ref().unwrap().base_point[1]
    );
}
