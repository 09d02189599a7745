//! Symbolic and specialised beta-harmonic polynomials, their norms and orthogonality.
use jacobi_cone::beta_poly::{
    apply_beta_laplacian, beta_inner_product, generate_symbolic, h_q, sphere_norm,
    weighted_ball_l2, HalfSphereMeasure,
};
use jacobi_cone::poly::Poly;
use num_rational::BigRational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let y4 = Poly::monomial(1, vec![4], BigRational::from_integer(1.into()));
    println!("symbolic h_4 = {}", generate_symbolic(1, &y4)?);

    let beta = BigRational::from_integer(1.into());
    let basis: Vec<_> = (0..=4).map(|q| h_q(&beta, q)).collect();
    for h in &basis {
        assert!(apply_beta_laplacian(h.full_poly(), &beta)?.is_zero());
        let ball = weighted_ball_l2(h, 0.5)?;
        println!(
            "h_{} = {}  N = {:.6}  ball(0.5) = {:.6e}",
            h.degree(),
            h.full_poly(),
            sphere_norm(h)?,
            ball.analytic
        );
    }
    let m = HalfSphereMeasure::new(1, 1.0, 16)?;
    let ip = beta_inner_product(&basis[2], &basis[4], &m)?;
    println!("<h_2, h_4> = {:.2e}", ip.quadrature);
    Ok(())
}
