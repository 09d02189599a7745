//! Solve the weighted Dirichlet problem on the half ball and watch second-order convergence.
use jacobi_cone::beta_poly::h_q;
use jacobi_cone::beta_solver::{solve_dirichlet, BoundaryTrace, GridSpec};
use jacobi_cone::poly::rational_from_f64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let beta = 2.5;
    let h = h_q(&rational_from_f64(beta), 3);
    let trace = BoundaryTrace::from_function(&h, BoundaryTrace::DEFAULT_SAMPLES)?;
    let mut last = None;
    for n in [16, 32, 64, 128] {
        let u = solve_dirichlet(beta, 1, &trace, GridSpec::square(n)?)?;
        let err = u.max_error(&h);
        let order = last.map(|e: f64| (e / err).log2());
        println!(
            "n = {n:4}  max error {err:.3e}  order {}  weak residual {:.1e}  hardy {:.3} <= {:.3}",
            order.map_or("-".into(), |o| format!("{o:.2}")),
            u.weak_form_residual(),
            u.hardy().ratio,
            u.hardy().constant,
        );
        last = Some(err);
    }
    Ok(())
}
