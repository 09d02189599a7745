//! Acceptance gate: ten criteria, each with its tolerance and time budget.
//! Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use jacobi_cone::beta_poly::{
    beta_inner_product, generate, generate_symbolic, sphere_norm, weighted_ball_l2, BetaPolynomial,
    HalfSphereMeasure,
};
use jacobi_cone::beta_solver::{
    expand_on_sphere, reconstruct, solve_dirichlet, sup_gap, BoundaryTrace, GridSpec, ModeSum,
};
use jacobi_cone::cone_spectrum::{
    build_cone, cone_stability_inequality, spectrum, strict_stability, ConeSpec, RadialFn,
    SampledRadial, StabilityClass,
};
use jacobi_cone::cylinder_modes::{
    separated_ode_residual, synthesize, FnProfile, JacobiFieldSpec, ModeSpec, OdeGrid,
};
use jacobi_cone::growth::{
    check_allowed_ratio, doubling_dichotomy, exponent_ladder, ladder_profile, liouville_gap,
    psi_convexity, Alpha, TGrid,
};
use jacobi_cone::poly::{parse_rational, rational_from_f64, Poly};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn leading(ell: usize, q: u32) -> Poly {
    let mut e = vec![0; ell];
    e[0] = q;
    Poly::monomial(ell, e, rat(1, 1))
}

fn ac1_simons_anchor() -> Outcome {
    let cone = build_cone(3, 3).map_err(|e| e.to_string())?;
    let l1 = &spectrum(&cone, 1)[0];
    ensure(l1.lambda == rat(-6, 1), || {
        format!("lambda_1 = {}", l1.lambda)
    })?;
    ensure(l1.exact_beta() == Some(rat(1, 1)), || {
        format!("beta_1 = {:?}", l1.exact_beta())
    })?;
    ensure(l1.exact_gamma_plus() == Some(rat(-2, 1)), || {
        "gamma_1^+ != -2".into()
    })?;
    ensure(l1.exact_gamma_minus() == Some(rat(-3, 1)), || {
        "gamma_1^- != -3".into()
    })?;
    let st = strict_stability(&cone);
    ensure(
        st.class == StabilityClass::StrictlyStable && st.margin == rat(1, 4),
        || format!("stability {:?} margin {}", st.class, st.margin),
    )?;
    Ok("beta_1 = 1, gamma = (-2, -3), margin = 1/4 (exact)".into())
}

/// The five displayed polynomials with `d1 = 2 + beta`, `d2 = (2 + beta)(4 + beta)`.
fn closed_form(q: u32, beta: &BigRational) -> Poly {
    let one = rat(1, 1);
    let d1 = rat(2, 1) + beta;
    let d2 = &d1 * (rat(4, 1) + beta);
    let terms: Vec<(Vec<u32>, BigRational)> = match q {
        0 => vec![(vec![0, 0], one)],
        1 => vec![(vec![0, 1], one)],
        2 => vec![(vec![0, 2], one.clone()), (vec![2, 0], -one / &d1)],
        3 => vec![(vec![0, 3], one), (vec![2, 1], rat(-3, 1) / &d1)],
        _ => vec![
            (vec![0, 4], one),
            (vec![2, 2], rat(-6, 1) / &d1),
            (vec![4, 0], rat(3, 1) / &d2),
        ],
    };
    Poly::from_terms(2, terms).unwrap()
}

fn ac2_closed_forms() -> Outcome {
    // symbolic numerators over prod_{i<=j} (2i + beta)
    let numerators: [Vec<(u32, i64)>; 5] = [
        vec![(0, 1)],
        vec![(1, 1)],
        vec![(2, 1), (0, -1)],
        vec![(3, 1), (1, -3)],
        vec![(4, 1), (2, -6), (0, 3)],
    ];
    for q in 0..=4u32 {
        let s = generate_symbolic(1, &leading(1, q)).map_err(|e| e.to_string())?;
        let want = &numerators[q as usize];
        ensure(s.layer_count() == want.len(), || {
            format!("h_{q}: {} layers", s.layer_count())
        })?;
        for (j, &(deg, c)) in want.iter().enumerate() {
            let expect = Poly::monomial(1, vec![deg], rat(c, 1));
            ensure(s.numerator(j) == &expect, || {
                format!("h_{q} layer {j}: {}", s.numerator(j))
            })?;
        }
        for b in [1i64, 2, 5] {
            let beta = rat(b, 1);
            let h = generate(&beta, 1, &leading(1, q)).map_err(|e| e.to_string())?;
            ensure(h.full_poly() == &closed_form(q, &beta), || {
                format!("h_{q} at beta={b}: {}", h.full_poly())
            })?;
        }
    }
    Ok("h_0..h_4 match symbolically and at beta = 1, 2, 5".into())
}

fn basis(ell: usize, beta: f64) -> Vec<BetaPolynomial> {
    let b = rational_from_f64(beta);
    (0..=8u32)
        .map(|q| generate(&b, ell, &leading(ell, q)).unwrap())
        .collect()
}

fn ac3_orthogonality() -> Outcome {
    let mut worst = 0.0f64;
    for ell in [1usize, 2] {
        for beta in [0.5, 1.0, 2.5] {
            let hs = basis(ell, beta);
            let m = HalfSphereMeasure::new(ell, beta, 16).map_err(|e| e.to_string())?;
            let norms: Vec<f64> = hs.iter().map(|h| sphere_norm(h).unwrap()).collect();
            for p in 0..hs.len() {
                for q in p + 1..hs.len() {
                    let ip = beta_inner_product(&hs[p], &hs[q], &m).map_err(|e| e.to_string())?;
                    let rel = ip.quadrature.abs().max(ip.analytic.abs()) / (norms[p] * norms[q]);
                    worst = worst.max(rel);
                    ensure(rel <= 1e-9, || {
                        format!("ell={ell} beta={beta} <h_{p},h_{q}> = {rel:e} N_p N_q")
                    })?;
                }
            }
        }
    }
    Ok(format!("max |<h_p,h_q>| / (N_p N_q) = {worst:.2e}"))
}

fn ac4_growth_law() -> Outcome {
    let mut worst = 0.0f64;
    for ell in [1usize, 2] {
        for beta in [0.5, 1.0, 2.5] {
            for h in basis(ell, beta).iter().take(7) {
                for rho in [0.25, 0.5, 1.0] {
                    let b = weighted_ball_l2(h, rho).map_err(|e| e.to_string())?;
                    worst = worst.max(b.relative_gap());
                    ensure(b.relative_gap() <= 1e-6, || {
                        format!("ell={ell} beta={beta} q={} rho={rho}: {b:?}", h.degree())
                    })?;
                }
            }
        }
    }
    Ok(format!("max relative gap {worst:.2e}"))
}

fn ac5_solver() -> Outcome {
    let beta = rat(1, 1);
    let grids = [32usize, 64, 128];
    let mut summary = Vec::new();
    for q in 0..=4u32 {
        let h = generate(&beta, 1, &leading(1, q)).map_err(|e| e.to_string())?;
        let trace = BoundaryTrace::from_function(&h, BoundaryTrace::DEFAULT_SAMPLES)
            .map_err(|e| e.to_string())?;
        let mut errs = Vec::new();
        for &n in &grids {
            let u = solve_dirichlet(1.0, 1, &trace, GridSpec::square(n).unwrap())
                .map_err(|e| e.to_string())?;
            let r = u.weak_form_residual();
            ensure(r <= 1e-10, || {
                format!("q={q} n={n}: weak-form residual {r:e}")
            })?;
            errs.push(u.max_error(&h));
        }
        if errs.iter().all(|e| *e <= 1e-12) {
            summary.push(format!("q={q}: exact"));
            continue;
        }
        let order = (errs[0] / errs[2]).log2() / 2.0;
        ensure(order >= 1.8, || {
            format!("q={q}: errors {errs:?}, order {order:.3}")
        })?;
        summary.push(format!("q={q}: {order:.2}"));
    }
    Ok(format!("observed orders {}", summary.join(", ")))
}

fn ac6_roundtrip() -> Outcome {
    let b = rat(1, 1);
    let (h1, h3) = (
        generate(&b, 1, &leading(1, 1)).unwrap(),
        generate(&b, 1, &leading(1, 3)).unwrap(),
    );
    let (a1, a3) = (0.8, -1.7);
    let field =
        ModeSum::new(vec![(a1, h1.clone()), (a3, h3.clone())]).map_err(|e| e.to_string())?;
    let rho = 0.5;
    let e = expand_on_sphere(&field, rho, 8).map_err(|e| e.to_string())?;
    let want = |q: u32| match q {
        1 => a1 * sphere_norm(&h1).unwrap() * rho,
        3 => a3 * sphere_norm(&h3).unwrap() * rho.powi(3),
        _ => 0.0,
    };
    let coeff_err = (0..=8)
        .map(|q| (e.coefficient(q) - want(q)).abs())
        .fold(0.0, f64::max);
    ensure(coeff_err <= 1e-8, || {
        format!("coefficient error {coeff_err:e}")
    })?;
    let points: Vec<Vec<f64>> = (0..50)
        .map(|i| {
            let t = -1.5 + 3.0 * i as f64 / 49.0;
            vec![0.4 * t.cos(), 0.4 * t.sin()]
        })
        .collect();
    reconstruct(&e, &points).map_err(|e| e.to_string())?;
    let gap = sup_gap(&e, &field, rho, 101);
    ensure(gap < 1e-4, || format!("sup gap {gap:e}"))?;
    Ok(format!(
        "coefficient error {coeff_err:.1e}, sup gap {gap:.1e}"
    ))
}

fn ac7_separated_ode() -> Outcome {
    let cone = ConeSpec::simons();
    let exact = FnProfile::new(1, |r: f64, _: &[f64]| r.powi(-2));
    let r0 = separated_ode_residual(&exact, &cone, 1, &OdeGrid::new(1e-2, 1.0, 1e-3))
        .map_err(|e| e.to_string())?;
    ensure(r0 < 1e-8, || format!("r^-2 residual {r0:e}"))?;
    let steps = [0.2, 0.1, 0.05];
    let mut worst = f64::INFINITY;
    for j in 1..=2usize {
        for q in 0..=4u32 {
            let spec = JacobiFieldSpec::new(
                cone.clone(),
                1,
                vec![ModeSpec::h_q(&cone, j, q, 1.0).unwrap()],
            )
            .map_err(|e| e.to_string())?;
            let v = synthesize(&spec);
            let comp = v.component(j).unwrap();
            let res: Vec<f64> = steps
                .iter()
                .map(|&h| {
                    separated_ode_residual(comp, &cone, j, &OdeGrid::new(1e-2, 1.0, h)).unwrap()
                })
                .collect();
            if res.iter().all(|r| *r < 1e-12) {
                continue;
            }
            let order = (res[0] / res[2]).log2() / 2.0;
            worst = worst.min(order);
            ensure(order >= 1.8, || {
                format!("(j,q)=({j},{q}): residuals {res:?}")
            })?;
        }
    }
    Ok(format!("r^-2 residual {r0:.1e}, smallest order {worst:.2}"))
}

fn ac8_convexity_dichotomy() -> Outcome {
    let ladder: Vec<f64> = exponent_ladder(&spectrum(&ConeSpec::simons(), 2), 4)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|r| r.exponent)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let grid = TGrid {
        t_min: -8.0,
        t_max: 2.0,
        step: 0.05,
    };
    let mut min_second = f64::INFINITY;
    let mut checks = 0usize;
    let top = *ladder.last().unwrap();
    for _ in 0..10_000 {
        let weights: Vec<f64> = ladder
            .iter()
            .map(|_| {
                if rng.gen_bool(0.6) {
                    rng.gen_range(0.0..5.0f64).powi(3)
                } else {
                    0.0
                }
            })
            .collect();
        if weights.iter().all(|w| *w == 0.0) {
            continue;
        }
        let profile = ladder_profile(&ladder, &weights, "random").map_err(|e| e.to_string())?;
        min_second =
            min_second.min(psi_convexity(&profile, Some(grid)).map_err(|e| e.to_string())?);
        let mut drawn = 0;
        while drawn < 100 {
            let q = rng.gen_range(0.0..(top + 1.0) * 4f64.ln()).exp();
            if check_allowed_ratio(&profile, q).is_err() {
                continue;
            }
            drawn += 1;
            let rho = rng.gen_range(-4.0f64..2.0).exp();
            let d = doubling_dichotomy(&profile, q, rho).map_err(|e| e.to_string())?;
            ensure(d.consistent(), || {
                format!("counterexample {d:?} for weights {weights:?}")
            })?;
            checks += 1;
        }
    }
    ensure(min_second >= -1e-9, || {
        format!("min second difference {min_second:e}")
    })?;
    Ok(format!(
        "min second difference {min_second:.2e}, {checks} implications, 0 counterexamples"
    ))
}

fn ac9_liouville() -> Outcome {
    let radii = [1.0 + 1e-12, 1.0 + 1e-6, 1.5, 2.0, 10.0, 1e3, 1e9];
    for k in 1..=9i64 {
        let text = format!("0.{k}");
        let alpha = Alpha::parse(&text).map_err(|e| e.to_string())?;
        let r = liouville_gap(&alpha, &radii).map_err(|e| e.to_string())?;
        ensure(
            r.infeasible_beyond_one && r.samples.iter().all(|s| !s.feasible),
            || format!("alpha={text}: {}", r.summary()),
        )?;
        let margin = parse_rational(&r.margin_exact).map_err(|e| e.to_string())?;
        ensure(margin == rat(2, 1) - rat(2 * k, 10), || {
            format!("alpha={text}: margin {}", r.margin_exact)
        })?;
    }
    Ok("infeasible for every R > 1, margin 2 - 2 alpha exact".into())
}

fn ac10_stability() -> Outcome {
    let simons = ConeSpec::simons();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..100 {
        let lo = rng.gen_range(0.0..1.0);
        let hi = lo + rng.gen_range(0.5..6.0);
        let n = rng.gen_range(4..20);
        let knots: Vec<f64> = (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect();
        let values: Vec<f64> = knots.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        let zeta = SampledRadial::new(knots, values).map_err(|e| e.to_string())?;
        let chk = cone_stability_inequality(&simons, &zeta, 0.25);
        ensure(chk.holds, || format!("Simons test function {i}: {chk:?}"))?;
    }
    // r^(-1/2) sin(pi log r / 4) on [1, e^4]
    let w = std::f64::consts::PI / 4.0;
    let bump = RadialFn::new(
        1.0,
        4f64.exp(),
        move |r: f64| r.powf(-0.5) * (w * r.ln()).sin(),
        move |r: f64| r.powf(-1.5) * (w * (w * r.ln()).cos() - 0.5 * (w * r.ln()).sin()),
    );
    let unstable = build_cone(1, 1).map_err(|e| e.to_string())?;
    let chk = cone_stability_inequality(&unstable, &bump, 0.25);
    ensure(!chk.holds, || format!("(1,1) cone passed: {chk:?}"))?;
    ensure(
        strict_stability(&unstable).class == StabilityClass::Unstable,
        || "(1,1) not unstable".into(),
    )?;
    Ok(format!(
        "100/100 hold on (3,3); (1,1) fails with lhs {:.3} > rhs {:.3}",
        chk.lhs, chk.rhs
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        (
            "AC1 Simons-cone anchor",
            ac1_simons_anchor,
            Duration::from_secs(1),
        ),
        (
            "AC2 closed-form polynomials",
            ac2_closed_forms,
            Duration::from_secs(1),
        ),
        (
            "AC3 orthogonality",
            ac3_orthogonality,
            Duration::from_secs(10),
        ),
        ("AC4 growth law", ac4_growth_law, Duration::from_secs(30)),
        (
            "AC5 solver convergence",
            ac5_solver,
            Duration::from_secs(120),
        ),
        (
            "AC6 completeness roundtrip",
            ac6_roundtrip,
            Duration::from_secs(30),
        ),
        (
            "AC7 separated ODE",
            ac7_separated_ode,
            Duration::from_secs(30),
        ),
        (
            "AC8 convexity and dichotomy",
            ac8_convexity_dichotomy,
            Duration::from_secs(60),
        ),
        ("AC9 Liouville gap", ac9_liouville, Duration::from_secs(1)),
        (
            "AC10 Hardy/stability",
            ac10_stability,
            Duration::from_secs(10),
        ),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; over budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {name} ({:.3}s): {detail}", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({:.3}s): {why}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
