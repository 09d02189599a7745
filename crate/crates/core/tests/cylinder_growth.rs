use jacobi_cone::cone_spectrum::{spectrum, ConeSpec};
use jacobi_cone::cylinder_modes::{
    avint_profile, mode_projection_transform, separated_ode_residual, synthesize, JacobiFieldSpec,
    ModeSpec, OdeGrid,
};
use jacobi_cone::growth::{
    check_allowed_ratio, doubling_dichotomy, dyadic_increments, equality_case, exponent_ladder,
    fit_exponents, ladder_profile, liouville_gap, psi_convexity, Alpha, GrowthProfile, TGrid,
};
use jacobi_cone::poly::{parse_rational, Poly};
use num_rational::BigRational;
use proptest::prelude::*;

fn simons() -> ConeSpec {
    ConeSpec::simons()
}

fn fit_order(res: &[f64], steps: &[f64]) -> f64 {
    // least-squares slope of log residual against log step
    let n = res.len() as f64;
    let xs: Vec<f64> = steps.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = res.iter().map(|r| r.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[test]
fn separated_residual_order_for_synthesized_modes() {
    let c = simons();
    let steps = [0.2, 0.1, 0.05];
    for (j, q) in [(1usize, 0u32), (1, 1), (1, 2), (1, 4), (2, 0), (2, 3)] {
        let spec = JacobiFieldSpec::new(c.clone(), 1, vec![ModeSpec::h_q(&c, j, q, 1.0).unwrap()])
            .unwrap();
        let v = synthesize(&spec);
        let comp = v.component(j).unwrap();
        let res: Vec<f64> = steps
            .iter()
            .map(|&h| separated_ode_residual(comp, &c, j, &OdeGrid::new(0.01, 1.0, h)).unwrap())
            .collect();
        if res.iter().all(|r| *r < 1e-12) {
            continue;
        }
        let order = fit_order(&res, &steps);
        assert!(order >= 1.8, "(j,q)=({j},{q}): {res:?}");
    }
}

#[test]
fn two_variable_modes() {
    let c = simons();
    let p0 = Poly::monomial(2, vec![1, 1], BigRational::from_integer(1.into()));
    let spec = JacobiFieldSpec::new(
        c.clone(),
        2,
        vec![ModeSpec::from_leading(&c, 1, 2, &p0, 1.0).unwrap()],
    )
    .unwrap();
    let v = synthesize(&spec);
    let res = separated_ode_residual(v.component(1).unwrap(), &c, 1, &OdeGrid::default()).unwrap();
    assert!(res < 1e-8, "{res}");
    let p = avint_profile(&spec, &[0.25, 0.5, 1.0]).unwrap();
    assert!(p.rows.iter().all(|r| r.relative_gap < 1e-10));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_two_term_mode_is_beta_harmonic(
        j in 1usize..=2, q in 0u32..=5, a in -2.0f64..2.0, b in -2.0f64..2.0
    ) {
        let c = simons();
        let modes = vec![ModeSpec::h_q(&c, j, q, a).unwrap(), ModeSpec::h_q(&c, j, q + 1, b).unwrap()];
        let spec = JacobiFieldSpec::new(c.clone(), 1, modes).unwrap();
        let v = synthesize(&spec);
        let h = mode_projection_transform(v.component(j).unwrap(), &c, j).unwrap();
        prop_assert_eq!(h.symbolic_check(), Some(true));
        let res = h.laplacian_residual(&OdeGrid::default()).unwrap();
        prop_assert!(res < 1e-7, "{}", res);
    }

    #[test]
    fn avint_is_nondecreasing(a in -2.0f64..2.0, b in -2.0f64..2.0, d in -2.0f64..2.0) {
        let c = simons();
        let modes = vec![
            ModeSpec::h_q(&c, 1, 0, a).unwrap(),
            ModeSpec::h_q(&c, 1, 2, b).unwrap(),
            ModeSpec::h_q(&c, 2, 1, d).unwrap(),
        ];
        let spec = JacobiFieldSpec::new(c, 1, modes).unwrap();
        let radii: Vec<f64> = (1..=12).map(|i| i as f64 / 6.0).collect();
        let p = avint_profile(&spec, &radii).unwrap();
        for w in p.rows.windows(2) {
            prop_assert!(w[1].analytic >= w[0].analytic);
            prop_assert!(w[1].quadrature >= w[0].quadrature * (1.0 - 1e-12));
        }
    }

    #[test]
    fn psi_is_convex(ws in prop::collection::vec(0.0f64..10.0, 1..6)) {
        let exps: Vec<f64> = (0..ws.len()).map(|i| i as f64).collect();
        prop_assume!(ws.iter().any(|w| *w > 0.0));
        let p = ladder_profile(&exps, &ws, "random").unwrap();
        let grid = TGrid { t_min: -10.0, t_max: 3.0, step: 0.05 };
        prop_assert!(psi_convexity(&p, Some(grid)).unwrap() >= -1e-9);
        let mut last = 0.0;
        for i in 1..=40 {
            let v = p.value(i as f64 / 10.0);
            prop_assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn dichotomy_implication(
        ws in prop::collection::vec(0.01f64..10.0, 1..5),
        log_q in 0.01f64..6.0,
        rho in 0.05f64..4.0,
    ) {
        let exps: Vec<f64> = (0..ws.len()).map(|i| i as f64).collect();
        let p = ladder_profile(&exps, &ws, "random").unwrap();
        let q = log_q.exp();
        prop_assume!(check_allowed_ratio(&p, q).is_ok());
        let d = doubling_dichotomy(&p, q, rho).unwrap();
        prop_assert!(d.consistent(), "{:?}", d);
    }
}

#[test]
fn distinct_levels_add() {
    let c = simons();
    let radii = [0.25, 0.5, 1.0, 1.5];
    let one = |modes: Vec<ModeSpec>| {
        let spec = JacobiFieldSpec::new(c.clone(), 1, modes).unwrap();
        avint_profile(&spec, &radii).unwrap()
    };
    let m1 = ModeSpec::h_q(&c, 1, 1, 0.7).unwrap();
    let m2 = ModeSpec::h_q(&c, 2, 2, -1.3).unwrap();
    let a = one(vec![m1.clone()]);
    let b = one(vec![m2.clone()]);
    let ab = one(vec![m1, m2]);
    for i in 0..radii.len() {
        let sum = a.rows[i].analytic + b.rows[i].analytic;
        assert!((ab.rows[i].analytic - sum).abs() < 1e-12 * sum);
        let sum_q = a.rows[i].quadrature + b.rows[i].quadrature;
        assert!((ab.rows[i].quadrature - sum_q).abs() < 1e-12 * sum_q);
    }
}

#[test]
fn simons_ladder_is_the_integers() {
    let ladder = exponent_ladder(&spectrum(&simons(), 2), 3).unwrap();
    let exps: Vec<f64> = ladder.iter().map(|r| r.exponent).collect();
    assert_eq!(exps, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    assert_eq!(ladder[2].sources, vec![(1, 2), (2, 0)]);
}

#[test]
fn equality_case_is_single_mode() {
    let p = GrowthProfile::analytic(vec![(1.5, 2.0)], "single").unwrap();
    let (a, b) = dyadic_increments(&p, 0.3);
    assert!((a - b).abs() < 1e-12);
    assert!((a - 4f64.powf(1.5).ln()).abs() < 1e-12);
    let q = equality_case(&p, 0.3, 1e-12).unwrap();
    assert!((q - 1.5).abs() < 1e-12);
    let two = GrowthProfile::analytic(vec![(0.0, 1.0), (1.0, 1.0)], "two").unwrap();
    assert!(equality_case(&two, 0.0, 1e-12).is_none());
}

#[test]
fn liouville_gap_for_all_alpha() {
    for k in 1..=9 {
        let alpha = Alpha::parse(&format!("0.{k}")).unwrap();
        let r = liouville_gap(&alpha, &[1.0 + 1e-12, 1.5, 2.0, 1e6]).unwrap();
        assert!(r.infeasible_beyond_one);
        assert!(r.samples.iter().all(|s| !s.feasible));
        let want =
            BigRational::from_integer(2.into()) - BigRational::new((2 * k).into(), 10.into());
        assert_eq!(parse_rational(&r.margin_exact).unwrap(), want);
    }
}

#[test]
fn fit_recovers_modes_profile() {
    let c = simons();
    let modes = vec![
        ModeSpec::h_q(&c, 1, 0, 1.0).unwrap(),
        ModeSpec::h_q(&c, 1, 1, 0.5).unwrap(),
        ModeSpec::h_q(&c, 2, 0, 0.3).unwrap(),
    ];
    let spec = JacobiFieldSpec::new(c.clone(), 1, modes).unwrap();
    let radii: Vec<f64> = (1..=16).map(|i| i as f64 / 16.0).collect();
    let p = avint_profile(&spec, &radii).unwrap();
    let ladder: Vec<f64> = exponent_ladder(&spectrum(&c, 2), 2)
        .unwrap()
        .iter()
        .map(|r| r.exponent)
        .collect();
    let fit = fit_exponents(&p.quadrature_samples().unwrap(), &ladder).unwrap();
    let truth = p.profile.terms().unwrap();
    for t in truth {
        let i = fit.exponents.iter().position(|e| *e == t.exponent).unwrap();
        assert!(
            (fit.weights[i] - t.weight).abs() < 1e-8 * t.weight,
            "{fit:?}"
        );
    }
}
