//! Serialize a radical tower to JSON, reload it, and re-verify it against
//! freshly tracked roots on a new grid — the same flow as
//! `solvrad verify --expr report.json "equation"`.
//!
//! ```bash
//! cargo run --example verify_expression
//! ```

use solvrad::report::{analyze, verify, AnalyzeOptions};

fn main() {
    let opts = AnalyzeOptions {
        no_timings: true,
        ..AnalyzeOptions::default()
    };
    let report = analyze("y^4 + p*y + q", &opts).unwrap();
    let json = report.to_json_string();
    println!(
        "analyze produced a {}-byte report with a depth-{} tower",
        json.len(),
        report.radical_expr.as_ref().unwrap().depth
    );

    // round-trip through the serialized form against a fresh grid
    let v = verify(&json, "y^4 + p*y + q", &opts).unwrap();
    println!(
        "re-verified on {} fresh points: max residual {:.3e} (tolerance {:.1e})",
        v.samples_checked, v.max_residual, v.tolerance
    );

    // the same expression against a different family must fail
    match verify(&json, "y^4 + p*y + q + 1", &opts) {
        Err(e) => println!("checked against y^4 + p*y + q + 1 -> {e}"),
        Ok(_) => unreachable!("wrong family must not verify"),
    }
}
