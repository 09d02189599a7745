use jacobi_cone::beta_poly::{
    apply_beta_laplacian, beta_inner_product, generate, generate_symbolic, h_q,
    radial_leading_layer, sphere_norm, spherical_eigen_check, weighted_ball_l2, BetaPolynomial,
    HalfSphereMeasure,
};
use jacobi_cone::beta_solver::{expand_on_sphere, FnField, ModeSum};
use jacobi_cone::poly::Poly;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn y_pow(q: u32) -> Poly {
    Poly::monomial(1, vec![q], rat(1, 1))
}

/// Homogeneous polynomial of degree `degree` in `ell` variables from raw draws.
fn homogeneous(ell: usize, degree: u32, draws: &[(Vec<u32>, i64)]) -> Poly {
    let mut terms = Vec::new();
    for (split, c) in draws {
        let mut left = degree;
        let mut e = vec![0u32; ell];
        for (i, s) in split.iter().take(ell - 1).enumerate() {
            e[i] = s % (left + 1);
            left -= e[i];
        }
        e[ell - 1] = left;
        terms.push((e, rat(*c, 1)));
    }
    Poly::from_terms(ell, terms).unwrap()
}

fn poly_input() -> impl Strategy<Value = (usize, u32, Vec<(Vec<u32>, i64)>, i64, i64)> {
    (1usize..=3, 0u32..=10).prop_flat_map(|(ell, degree)| {
        (
            Just(ell),
            Just(degree),
            prop::collection::vec((prop::collection::vec(0u32..=10, 2), -9i64..=9), 1..6),
            1i64..=40,
            1i64..=8,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn generated_polynomials_are_beta_harmonic((ell, degree, draws, bn, bd) in poly_input()) {
        let p0 = homogeneous(ell, degree, &draws);
        let beta = rat(bn, bd);
        let h = generate(&beta, ell, &p0).unwrap();
        prop_assert!(apply_beta_laplacian(h.full_poly(), &beta).unwrap().is_zero());
        prop_assert_eq!(h.leading_layer(), &p0);
        if !p0.is_zero() {
            prop_assert_eq!(h.full_poly().homogeneous_degree().unwrap(), degree);
        }
    }

    #[test]
    fn wire_roundtrip((ell, degree, draws, bn, bd) in poly_input()) {
        let h = generate(&rat(bn, bd), ell, &homogeneous(ell, degree, &draws)).unwrap();
        let back = BetaPolynomial::from_json(&h.to_json()).unwrap();
        prop_assert_eq!(back.full_poly(), h.full_poly());
        prop_assert_eq!(back.beta(), h.beta());
    }
}

#[test]
fn closed_forms_for_specific_beta() {
    for b in [1i64, 2, 5] {
        let beta = rat(b, 1);
        let two = rat(2, 1) + &beta;
        let four = rat(4, 1) + &beta;
        let h: Vec<BetaPolynomial> = (0..=4)
            .map(|q| generate(&beta, 1, &y_pow(q)).unwrap())
            .collect();
        assert_eq!(h[0].coefficient(0, &[0]), rat(1, 1));
        assert_eq!(h[1].coefficient(0, &[1]), rat(1, 1));
        assert_eq!(h[1].full_poly().terms().count(), 1);
        assert_eq!(h[2].coefficient(2, &[0]), -rat(1, 1) / &two);
        assert_eq!(h[3].coefficient(2, &[1]), -rat(3, 1) / &two);
        assert_eq!(h[4].coefficient(2, &[2]), -rat(6, 1) / &two);
        assert_eq!(h[4].coefficient(4, &[0]), rat(3, 1) / (&two * &four));
        assert_eq!(h[2].full_poly().terms().count(), 2);
        assert_eq!(h[3].full_poly().terms().count(), 2);
        assert_eq!(h[4].full_poly().terms().count(), 3);
    }
}

#[test]
fn symbolic_numerators() {
    let s = generate_symbolic(1, &y_pow(4)).unwrap();
    assert_eq!(s.layer_count(), 3);
    assert_eq!(s.numerator(1), &Poly::monomial(1, vec![2], rat(-6, 1)));
    assert_eq!(s.numerator(2), &Poly::monomial(1, vec![0], rat(3, 1)));
    let s3 = generate_symbolic(1, &y_pow(3)).unwrap();
    assert_eq!(s3.numerator(1), &Poly::monomial(1, vec![1], rat(-3, 1)));
    let b = rat(7, 3);
    assert_eq!(
        s.specialize(&b).unwrap().full_poly(),
        h_q(&b, 4).full_poly()
    );
}

#[test]
fn orthogonality_up_to_degree_eight() {
    for ell in [1usize, 2] {
        for beta in [0.5, 1.0, 2.5] {
            let b = jacobi_cone::poly::rational_from_f64(beta);
            let basis: Vec<BetaPolynomial> = (0..=8u32)
                .map(|q| {
                    let p0 = if ell == 1 {
                        y_pow(q)
                    } else {
                        Poly::monomial(2, vec![q, 0], rat(1, 1))
                    };
                    generate(&b, ell, &p0).unwrap()
                })
                .collect();
            let m = HalfSphereMeasure::new(ell, beta, 16).unwrap();
            let norms: Vec<f64> = basis.iter().map(|h| sphere_norm(h).unwrap()).collect();
            for p in 0..basis.len() {
                for q in p + 1..basis.len() {
                    let ip = beta_inner_product(&basis[p], &basis[q], &m).unwrap();
                    let scale = norms[p] * norms[q];
                    assert!(
                        ip.quadrature.abs() <= 1e-9 * scale,
                        "ell={ell} beta={beta} p={p} q={q}: {ip:?}"
                    );
                    assert!(ip.analytic.abs() <= 1e-9 * scale);
                }
            }
        }
    }
}

#[test]
fn eigen_identity_on_the_half_sphere() {
    for beta in [rat(1, 2), rat(1, 1), rat(5, 2)] {
        for q in 0..=5 {
            let c = spherical_eigen_check(&h_q(&beta, q)).unwrap();
            assert!(c.max_residual < 1e-10, "q={q}: {c:?}");
        }
        let h = generate(&beta, 2, &radial_leading_layer(2, 4)).unwrap();
        assert!(spherical_eigen_check(&h).unwrap().max_residual < 1e-10);
    }
}

#[test]
fn ball_norm_growth_law() {
    for beta in [rat(1, 2), rat(1, 1), rat(5, 2)] {
        for q in 0..=6 {
            let h = h_q(&beta, q);
            for radius in [0.25, 0.5, 1.0] {
                let b = weighted_ball_l2(&h, radius).unwrap();
                assert!(b.relative_gap() < 1e-6, "q={q} R={radius}: {b:?}");
            }
            let exp = 1.0 + 2.0 + h.beta_f64() + 2.0 * q as f64;
            let ratio = weighted_ball_l2(&h, 1.0).unwrap().direct
                / weighted_ball_l2(&h, 0.5).unwrap().direct;
            assert!((ratio / 2f64.powf(exp) - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn h2_ball_example() {
    // in polar form the integral is (1/8) int (sin^2 t - cos^2 t / 3)^2 cos^2 t dt = pi / 144
    let h = h_q(&rat(1, 1), 2);
    let b = weighted_ball_l2(&h, 1.0).unwrap();
    let exact = std::f64::consts::PI / 144.0;
    assert!((b.analytic - exact).abs() < 1e-6 * exact, "{b:?}");
    assert!((b.direct - exact).abs() < 1e-6 * exact);
    // independent tensor Gauss-Legendre in r = sin s, y = cos(s) x
    let g = jacobi_cone::quadrature::gauss_legendre(24);
    let quarter = std::f64::consts::FRAC_PI_4;
    let mut sum = 0.0;
    for (xs, ws) in g.nodes.iter().zip(&g.weights) {
        let s = quarter * (xs + 1.0);
        let (r, half) = (s.sin(), s.cos());
        for (xy, wy) in g.nodes.iter().zip(&g.weights) {
            let y = half * xy;
            sum += quarter * ws * half * half * wy * (y * y - r * r / 3.0).powi(2) * r * r;
        }
    }
    assert!((sum - exact).abs() < 1e-6 * exact, "{sum}");
}

#[test]
fn parseval_for_finite_sums() {
    let beta = rat(3, 2);
    let terms: Vec<(f64, BetaPolynomial)> = [(0, 0.7), (1, -1.2), (3, 0.4), (6, 0.25)]
        .iter()
        .map(|&(q, a)| (a, h_q(&beta, q)))
        .collect();
    let expected: f64 = terms
        .iter()
        .map(|(a, h)| (a * sphere_norm(h).unwrap()).powi(2))
        .sum();
    let e = expand_on_sphere(&ModeSum::new(terms).unwrap(), 0.999_999_999, 8).unwrap();
    let captured: f64 = e.modes().iter().map(|m| m.coefficient.powi(2)).sum();
    assert!((e.trace_norm_sq() - captured).abs() < 1e-8 * expected);
    assert!((e.trace_norm_sq() / expected - 1.0).abs() < 1e-7);
}

#[test]
fn bessel_and_completeness_for_a_smooth_trace() {
    let f = FnField::new(1, 1.0, |r: f64, y: &[f64]| (y[0] + 0.3 * r * r).exp());
    let mut last = f64::INFINITY;
    for d in [2u32, 4, 8, 12] {
        let e = expand_on_sphere(&f, 0.9, d).unwrap();
        let captured: f64 = e.modes().iter().map(|m| m.coefficient.powi(2)).sum();
        assert!(captured <= e.trace_norm_sq() * (1.0 + 1e-12));
        assert!(e.residual_norm() <= last + 1e-15);
        last = e.residual_norm();
    }
    assert!(last < 1e-5, "{last}");
}
