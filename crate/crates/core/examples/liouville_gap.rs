//! Polynomial growth of order alpha < 1 is incompatible with the Simons exponent ladder.
use jacobi_cone::growth::{liouville_gap, Alpha};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let radii = [1.0 + 1e-9, 2.0, 1e3, 1e9];
    for text in ["0.1", "0.5", "0.9", "1/3"] {
        let report = liouville_gap(&Alpha::parse(text)?, &radii)?;
        println!(
            "alpha = {text:4}  {}  (exact margin {})",
            report.summary(),
            report.margin_exact
        );
    }
    Ok(())
}
