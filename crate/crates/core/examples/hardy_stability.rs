//! The cone stability inequality: tight on the Simons cone, violated on the (1,1) cone.
use jacobi_cone::cone_spectrum::{
    build_cone, cone_stability_inequality, hardy_check, strict_stability, RadialFn,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let simons = build_cone(3, 3)?;
    let bump = RadialFn::new(0.0, 2.0, |r: f64| r * (2.0 - r), |r: f64| 2.0 - 2.0 * r);
    let chk = cone_stability_inequality(&simons, &bump, 0.25);
    println!(
        "Simons, r(2-r): {:.4} <= {:.4}  {}",
        chk.lhs, chk.rhs, chk.holds
    );
    let h = hardy_check(simons.n, 0.0, &bump)?;
    println!("Hardy ratio {:.4} <= {:.4}", h.ratio, h.constant);

    // oscillating in log r on [1, e^4]
    let w = std::f64::consts::PI / 4.0;
    let log_bump = RadialFn::new(
        1.0,
        4f64.exp(),
        move |r: f64| r.powf(-0.5) * (w * r.ln()).sin(),
        move |r: f64| r.powf(-1.5) * (w * (w * r.ln()).cos() - 0.5 * (w * r.ln()).sin()),
    );
    let unstable = build_cone(1, 1)?;
    let chk = cone_stability_inequality(&unstable, &log_bump, 0.25);
    println!(
        "(1,1), log bump: {:.4} <= {:.4}  {}",
        chk.lhs, chk.rhs, chk.holds
    );
    println!("(1,1) class: {:?}", strict_stability(&unstable).class);
    Ok(())
}
