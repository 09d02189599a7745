//! Link spectrum and stability data for a few cones.
use jacobi_cone::cone_spectrum::{build_cone, spectrum, strict_stability, write_spectrum_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (p, q) in [(3, 3), (2, 4), (1, 5), (1, 1)] {
        let cone = build_cone(p, q)?;
        let st = strict_stability(&cone);
        println!(
            "C_{{{p},{q}}}  n = {}  {:?}  margin {}",
            cone.n, st.class, st.margin
        );
    }
    let lines = spectrum(&build_cone(3, 3)?, 5);
    write_spectrum_csv(&lines, std::io::stdout())?;
    Ok(())
}
