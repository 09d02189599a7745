use num_rational::BigRational;

use super::{angle_range, HalfBallFunction};
use crate::beta_poly::{
    generate, radial_leading_layer, sphere_norm, BetaPolynomial, HalfSphereMeasure,
};
use crate::error::{Error, Result};
use crate::poly::{rational_from_f64, Poly};

/// Lowest half-sphere quadrature order used for projections.
const PROJECTION_ORDER: usize = 40;

/// The `beta`-harmonic polynomials a field is expanded in: `h_q` with leading
/// layer `y^q` for `ell = 1`, and `|y|^q` (even `q`) for y-radial data.
pub fn mode_basis(ell: usize, beta: f64, max_degree: u32) -> Result<Vec<BetaPolynomial>> {
    let b = rational_from_f64(beta);
    let mut out = Vec::new();
    for q in 0..=max_degree {
        let p0 = if ell == 1 {
            Poly::monomial(1, vec![q], BigRational::from_integer(1.into()))
        } else if q % 2 == 0 {
            radial_leading_layer(ell, q)
        } else {
            continue;
        };
        out.push(generate(&b, ell, &p0)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub q: u32,
    /// `<u(rho .), h_q / N_q>` in `L^2(nu_+)`.
    pub coefficient: f64,
    /// `N_q = ||h_q||`.
    pub norm: f64,
}

/// Projection of a field onto normalized `beta`-harmonic polynomial traces at
/// one sampling radius.
#[derive(Debug, Clone)]
pub struct ModeExpansion {
    ell: usize,
    beta: f64,
    radius: f64,
    max_degree: u32,
    modes: Vec<Mode>,
    basis: Vec<BetaPolynomial>,
    trace_norm_sq: f64,
}

impl ModeExpansion {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn coefficient(&self, q: u32) -> f64 {
        self.modes
            .iter()
            .find(|m| m.q == q)
            .map_or(0.0, |m| m.coefficient)
    }

    /// `||u(rho .)||^2` in `L^2(nu_+)`.
    pub fn trace_norm_sq(&self) -> f64 {
        self.trace_norm_sq
    }

    /// `||u(rho .) - sum c_q h_q / N_q||`, the part beyond the truncation.
    pub fn residual_norm(&self) -> f64 {
        let captured: f64 = self
            .modes
            .iter()
            .map(|m| m.coefficient * m.coefficient)
            .sum();
        (self.trace_norm_sq - captured).max(0.0).sqrt()
    }

    /// Same expansion cut at a lower degree.
    pub fn truncated(&self, max_degree: u32) -> ModeExpansion {
        let keep: Vec<usize> = (0..self.modes.len())
            .filter(|&i| self.modes[i].q <= max_degree)
            .collect();
        ModeExpansion {
            max_degree: max_degree.min(self.max_degree),
            modes: keep.iter().map(|&i| self.modes[i]).collect(),
            basis: keep.iter().map(|&i| self.basis[i].clone()).collect(),
            ..self.clone()
        }
    }
}

impl HalfBallFunction for ModeExpansion {
    fn ell(&self) -> usize {
        self.ell
    }

    fn beta(&self) -> f64 {
        self.beta
    }

    fn value(&self, r: f64, y: &[f64]) -> f64 {
        self.modes
            .iter()
            .zip(&self.basis)
            .map(|(m, h)| m.coefficient / m.norm * self.radius.powi(-(m.q as i32)) * h.eval(r, y))
            .sum()
    }
}

/// Finite sum `sum c_q h_q` of `beta`-harmonic polynomials.
#[derive(Debug, Clone)]
pub struct ModeSum {
    ell: usize,
    beta: f64,
    terms: Vec<(f64, BetaPolynomial)>,
}

impl ModeSum {
    pub fn new(terms: Vec<(f64, BetaPolynomial)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::Invalid("a mode sum needs at least one term".into()));
        };
        let (ell, beta) = (first.ell(), first.beta().clone());
        if terms
            .iter()
            .any(|(_, h)| h.ell() != ell || h.beta() != &beta)
        {
            return Err(Error::Invalid("all modes must share ell and beta".into()));
        }
        Ok(ModeSum {
            ell,
            beta: first.beta_f64(),
            terms,
        })
    }

    pub fn terms(&self) -> &[(f64, BetaPolynomial)] {
        &self.terms
    }
}

impl HalfBallFunction for ModeSum {
    fn ell(&self) -> usize {
        self.ell
    }

    fn beta(&self) -> f64 {
        self.beta
    }

    fn value(&self, r: f64, y: &[f64]) -> f64 {
        self.terms.iter().map(|(c, h)| c * h.eval(r, y)).sum()
    }
}

/// Coefficients `<u(rho .), h_q / N_q>_{L^2(nu_+)}` for `q <= max_degree`.
pub fn expand_on_sphere(
    field: &dyn HalfBallFunction,
    rho: f64,
    max_degree: u32,
) -> Result<ModeExpansion> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::RadiusOutOfRange(rho));
    }
    let (ell, beta) = (field.ell(), field.beta());
    let basis = mode_basis(ell, beta, max_degree)?;
    let order = PROJECTION_ORDER.max(max_degree as usize + 8);
    let measure = HalfSphereMeasure::new(ell, beta, order)?;
    let rule = measure.rule();
    let samples: Vec<f64> = rule
        .points
        .iter()
        .map(|w| {
            field.value(
                rho * w[0],
                &w[1..].iter().map(|v| rho * v).collect::<Vec<_>>(),
            )
        })
        .collect();
    let trace_norm_sq = samples
        .iter()
        .zip(&rule.weights)
        .map(|(u, w)| w * u * u)
        .sum();
    let mut modes = Vec::with_capacity(basis.len());
    for h in &basis {
        let norm = sphere_norm(h)?;
        let ip: f64 = samples
            .iter()
            .zip(&rule.points)
            .zip(&rule.weights)
            .map(|((u, x), w)| w * u * h.eval_point(x))
            .sum();
        modes.push(Mode {
            q: h.degree(),
            coefficient: ip / norm,
            norm,
        });
    }
    Ok(ModeExpansion {
        ell,
        beta,
        radius: rho,
        max_degree,
        modes,
        basis,
        trace_norm_sq,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub values: Vec<f64>,
    /// `L^2(nu_+)` norm of the part of the sampled trace outside the kept modes.
    pub tail_bound: f64,
}

/// Evaluate `sum c_q rho^(-q) h_q / N_q` at points `[r, y_1, ..]`.
pub fn reconstruct(expansion: &ModeExpansion, points: &[Vec<f64>]) -> Result<Reconstruction> {
    let mut values = Vec::with_capacity(points.len());
    for x in points {
        if x.len() != expansion.ell + 1 {
            return Err(Error::VariableCount {
                expected: expansion.ell + 1,
                found: x.len(),
            });
        }
        values.push(expansion.value(x[0], &x[1..]));
    }
    Ok(Reconstruction {
        values,
        tail_bound: expansion.residual_norm(),
    })
}

/// `sup |a - b|` over an `n x n` polar sample of the closed half-ball `B_radius^+`.
pub fn sup_gap(a: &dyn HalfBallFunction, b: &dyn HalfBallFunction, radius: f64, n: usize) -> f64 {
    let ell = a.ell();
    let (lo, hi) = angle_range(ell);
    let n = n.max(2);
    let mut gap = 0.0f64;
    let mut y = vec![0.0; ell];
    for i in 0..n {
        let rho = radius * i as f64 / (n - 1) as f64;
        for k in 0..n {
            let t = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let r = (rho * t.cos()).max(0.0);
            y[0] = rho * t.sin();
            gap = gap.max((a.value(r, &y) - b.value(r, &y)).abs());
        }
    }
    gap
}
