//! Expand a field on a half sphere in the beta-harmonic basis and reconstruct it.
use jacobi_cone::beta_poly::h_q;
use jacobi_cone::beta_solver::{expand_on_sphere, reconstruct, sup_gap, FnField, ModeSum};
use num_rational::BigRational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let beta = BigRational::from_integer(1.into());
    let field = ModeSum::new(vec![(0.8, h_q(&beta, 1)), (-1.7, h_q(&beta, 3))])?;
    let e = expand_on_sphere(&field, 0.5, 6)?;
    for m in e.modes() {
        println!("q = {}  c_q = {:+.6e}", m.q, m.coefficient);
    }
    let rec = reconstruct(&e, &[vec![0.2, 0.1], vec![0.1, -0.3]])?;
    println!(
        "reconstructed {:?}, tail bound {:.1e}",
        rec.values, rec.tail_bound
    );
    println!("sup gap on B_0.5 = {:.1e}", sup_gap(&e, &field, 0.5, 101));

    // a non-polynomial trace converges spectrally
    let smooth = FnField::new(1, 1.0, |r: f64, y: &[f64]| (y[0] + 0.3 * r * r).exp());
    for d in [2, 4, 8, 12] {
        println!(
            "degree {d:2}  residual {:.2e}",
            expand_on_sphere(&smooth, 0.9, d)?.residual_norm()
        );
    }
    Ok(())
}
