//! Parse equation text into an exact family and compute the branch
//! hypersurface `P_n * disc` whose zero set carries all the monodromy.
//!
//! ```bash
//! cargo run --example parse_and_branch
//! ```

use solvrad::polyalg::{branch_poly, parse_family, resultant_y};

fn main() {
    for eq in ["y^2 - x", "y^5 + a*y + b", "(y^2 - x)*(y^2 - x - 1)", "y^2 - 1"] {
        let fam = parse_family(eq).expect("parses");
        println!("input:      {eq}");
        println!("expanded:   {}", fam.display_equation());
        println!("degree:     {} in y, variables {:?}", fam.n, fam.vars);
        let bp = branch_poly(&fam).expect("branch polynomial");
        println!("branch set: {bp} = 0");
        println!();
    }

    // the discriminant comes from a Sylvester resultant; here is the raw one
    let fam = parse_family("y^5 + a*y + b").unwrap();
    let res = resultant_y(&fam.coeffs, &fam.derivative_y()).unwrap();
    println!("Res_y(P, dP/dy) for the quintic: {res}");

    // parse errors carry byte positions
    let err = parse_family("y^2 - 1/0").unwrap_err();
    println!("\nbad input `y^2 - 1/0` -> {err}");
}
