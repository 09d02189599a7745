//! Frequency convexity and the doubling dichotomy on the Simons exponent ladder.
use jacobi_cone::cone_spectrum::{spectrum, ConeSpec};
use jacobi_cone::growth::{
    check_allowed_ratio, doubling_dichotomy, equality_case, exponent_ladder, ladder_profile,
    psi_convexity, TGrid,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ladder = exponent_ladder(&spectrum(&ConeSpec::simons(), 2), 2)?;
    for rung in &ladder {
        println!("exponent {}  sources {:?}", rung.exponent, rung.sources);
    }
    let exps: Vec<f64> = ladder.iter().map(|r| r.exponent).collect();
    let profile = ladder_profile(&exps, &[1.0, 0.0, 3.0, 0.0, 0.5], "example")?;
    let grid = TGrid {
        t_min: -8.0,
        t_max: 3.0,
        step: 0.05,
    };
    println!(
        "min second difference of psi: {:.2e}",
        psi_convexity(&profile, Some(grid))?
    );

    // Q = 2^{2q+1} sits between rungs and is allowed
    let q = 2f64.powi(3);
    check_allowed_ratio(&profile, q)?;
    for rho in [0.01, 0.1, 1.0, 10.0] {
        let d = doubling_dichotomy(&profile, q, rho)?;
        println!(
            "rho {rho:5}: small {:.3}  large {:.3}  premise {}  conclusion {}",
            d.ratio_small, d.ratio_large, d.premise_holds, d.conclusion_holds
        );
    }
    let single = ladder_profile(&exps, &[0.0, 0.0, 1.0, 0.0, 0.0], "single")?;
    println!(
        "equality case exponent: {:?}",
        equality_case(&single, 0.0, 1e-12)
    );
    Ok(())
}
