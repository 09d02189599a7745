//! Homogeneous beta-harmonic polynomials on the weighted half-space.
//!
//! A function `h(r, y)` of `r > 0` and `y in R^ell` is beta-harmonic when
//!
//! ```text
//! Delta_beta h = r^(-1-beta) d/dr (r^(1+beta) dh/dr) + Delta_y h = 0.
//! ```
//!
//! For every homogeneous `p_0(y)` of degree `q` there is exactly one homogeneous
//! solution `h = sum_j r^(2j) p_j(y)` with leading layer `p_0`, where
//! `p_(j+1) = -Delta_y p_j / ((2j+2)(2j+2+beta))`. The `beta` dependence of
//! layer `j` is the single factor `1 / prod_(i=1..j) (2i + beta)`, so generation
//! runs once over `Q` and is then specialized (or left symbolic).
//!
//! Polynomials in `(r, y)` use variable 0 for `r` and `1..=ell` for `y`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::poly::{parse_rational, rational_to_f64, F64Poly, Poly};
use crate::quadrature::{gauss_jacobi_unit, half_ball_rule, sphere_rule, PointRule};

/// Agreement demanded between the quadrature and Gamma-moment inner products.
pub const INNER_PRODUCT_REL_TOL: f64 = 1e-9;

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Beta-harmonic polynomial with `beta` left as a symbol: layer `j` equals
/// `numerators[j] / prod_(i=1..j) (2i + beta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicBetaPolynomial {
    ell: usize,
    degree: u32,
    numerators: Vec<Poly>,
}

impl SymbolicBetaPolynomial {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `beta`-free numerator of layer `j`.
    pub fn numerator(&self, j: usize) -> &Poly {
        &self.numerators[j]
    }

    pub fn layer_count(&self) -> usize {
        self.numerators.len()
    }

    /// The shifts `2, 4, .., 2j` whose factors `(shift + beta)` divide layer `j`.
    pub fn denominator_shifts(j: usize) -> Vec<u32> {
        (1..=j as u32).map(|i| 2 * i).collect()
    }

    pub fn specialize(&self, beta: &BigRational) -> Result<BetaPolynomial> {
        if !beta.is_positive() {
            return Err(Error::NonPositiveBeta(rational_to_f64(beta)));
        }
        let mut denom = BigRational::one();
        let mut layers = Vec::with_capacity(self.numerators.len());
        for (j, num) in self.numerators.iter().enumerate() {
            if j > 0 {
                denom *= int(2 * j as i64) + beta;
            }
            layers.push(num.scale(&(BigRational::one() / &denom)));
        }
        Ok(BetaPolynomial::assemble(
            beta.clone(),
            self.ell,
            self.degree,
            layers,
        ))
    }
}

impl fmt::Display for SymbolicBetaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, num) in self.numerators.iter().enumerate() {
            if num.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", render_layer(num, self.ell))?;
            if j > 0 {
                write!(f, "*r^{}", 2 * j)?;
                write!(f, "/(")?;
                let shifts = Self::denominator_shifts(j);
                for (i, s) in shifts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "({s}+beta)")?;
                }
                write!(f, ")")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn render_layer(p: &Poly, ell: usize) -> String {
    // rename x_i -> y / y_i
    let s = p.to_string();
    if ell == 1 {
        s.replace("x0", "y")
    } else {
        let mut out = s;
        for i in (0..ell).rev() {
            out = out.replace(&format!("x{i}"), &format!("y{}", i + 1));
        }
        out
    }
}

/// Generate the symbolic beta-harmonic polynomial with leading layer `p0`.
pub fn generate_symbolic(ell: usize, p0: &Poly) -> Result<SymbolicBetaPolynomial> {
    if p0.nvars() != ell {
        return Err(Error::VariableCount {
            expected: ell,
            found: p0.nvars(),
        });
    }
    let degree = p0.homogeneous_degree()?;
    let mut numerators = vec![p0.clone()];
    loop {
        let j = numerators.len() - 1;
        let lap = numerators[j].laplacian();
        if lap.is_zero() {
            break;
        }
        numerators.push(lap.scale(&BigRational::new(
            BigInt::from(-1),
            BigInt::from(2 * j as i64 + 2),
        )));
    }
    Ok(SymbolicBetaPolynomial {
        ell,
        degree,
        numerators,
    })
}

/// The unique homogeneous beta-harmonic polynomial with leading layer `p0`.
pub fn generate(beta: &BigRational, ell: usize, p0: &Poly) -> Result<BetaPolynomial> {
    generate_symbolic(ell, p0)?.specialize(beta)
}

/// `h_q` for `ell = 1`, i.e. leading layer `y^q`.
pub fn h_q(beta: &BigRational, q: u32) -> BetaPolynomial {
    generate(beta, 1, &Poly::monomial(1, vec![q], BigRational::one())).expect("homogeneous")
}

/// Leading layer `|y|^q` (q even), the y-radially symmetric choice for `ell >= 2`.
pub fn radial_leading_layer(ell: usize, q: u32) -> Poly {
    assert!(q % 2 == 0, "|y|^q is polynomial only for even q");
    let mut sq = Poly::zero(ell);
    for i in 0..ell {
        let mut e = vec![0; ell];
        e[i] = 2;
        sq.add_term(e, BigRational::one());
    }
    let mut out = Poly::one(ell);
    for _ in 0..q / 2 {
        out = out.mul(&sq);
    }
    out
}

/// Homogeneous beta-harmonic polynomial with exact coefficients.
#[derive(Debug, Clone)]
pub struct BetaPolynomial {
    beta: BigRational,
    ell: usize,
    degree: u32,
    layers: Vec<Poly>,
    full: Poly,
    eval: F64Poly,
}

impl PartialEq for BetaPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.beta == other.beta
            && self.ell == other.ell
            && self.degree == other.degree
            && self.layers == other.layers
    }
}

impl BetaPolynomial {
    fn assemble(beta: BigRational, ell: usize, degree: u32, layers: Vec<Poly>) -> Self {
        let mut full = Poly::zero(ell + 1);
        for (j, layer) in layers.iter().enumerate() {
            full = full.add(&layer.lift(2 * j as u32));
        }
        let eval = full.to_f64();
        BetaPolynomial {
            beta,
            ell,
            degree,
            layers,
            full,
            eval,
        }
    }

    /// Rebuild from explicit layers, verifying homogeneity and the recursion.
    pub fn from_layers(
        beta: BigRational,
        ell: usize,
        degree: u32,
        layers: Vec<Poly>,
    ) -> Result<Self> {
        if !beta.is_positive() {
            return Err(Error::NonPositiveBeta(rational_to_f64(&beta)));
        }
        let Some(p0) = layers.first() else {
            return Err(Error::Invalid(
                "a beta-polynomial needs at least one layer".into(),
            ));
        };
        let expected = generate(&beta, ell, p0)?;
        if p0.is_zero() {
            return Ok(expected);
        }
        if expected.degree != degree || expected.layers != layers {
            return Err(Error::Invalid(
                "layers do not satisfy the beta-harmonic recursion".into(),
            ));
        }
        Ok(expected)
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn beta_f64(&self) -> f64 {
        rational_to_f64(&self.beta)
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn layers(&self) -> &[Poly] {
        &self.layers
    }

    pub fn leading_layer(&self) -> &Poly {
        &self.layers[0]
    }

    /// `h(r, y)` as a polynomial in `ell + 1` variables.
    pub fn full_poly(&self) -> &Poly {
        &self.full
    }

    pub fn is_zero(&self) -> bool {
        self.full.is_zero()
    }

    pub fn eval(&self, r: f64, y: &[f64]) -> f64 {
        let mut x = Vec::with_capacity(self.ell + 1);
        x.push(r);
        x.extend_from_slice(y);
        self.eval.eval(&x)
    }

    /// Evaluate at a point `[r, y_1, .., y_ell]`.
    pub fn eval_point(&self, x: &[f64]) -> f64 {
        self.eval.eval(x)
    }

    /// Exact coefficient of `r^a y^b`.
    pub fn coefficient(&self, r_power: u32, y_exps: &[u32]) -> BigRational {
        let mut e = Vec::with_capacity(y_exps.len() + 1);
        e.push(r_power);
        e.extend_from_slice(y_exps);
        self.full.coefficient(&e)
    }

    pub fn scaled(&self, c: &BigRational) -> BetaPolynomial {
        let layers = self.layers.iter().map(|l| l.scale(c)).collect();
        BetaPolynomial::assemble(self.beta.clone(), self.ell, self.degree, layers)
    }

    pub fn to_wire(&self) -> BetaPolynomialWire {
        BetaPolynomialWire {
            beta: self.beta.to_string(),
            ell: self.ell,
            q: self.degree,
            layers: self
                .layers
                .iter()
                .enumerate()
                .map(|(j, l)| LayerWire {
                    degree: self.degree.saturating_sub(2 * j as u32),
                    terms: poly_terms_wire(l),
                })
                .collect(),
        }
    }

    pub fn from_wire(wire: &BetaPolynomialWire) -> Result<Self> {
        let beta = parse_rational(&wire.beta)?;
        let layers = wire
            .layers
            .iter()
            .map(|l| poly_from_terms_wire(wire.ell, &l.terms))
            .collect::<Result<Vec<_>>>()?;
        Self::from_layers(beta, wire.ell, wire.q, layers)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: BetaPolynomialWire = serde_json::from_str(text)?;
        Self::from_wire(&wire)
    }
}

/// Serialized term: exponent vector with an exact rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermWire {
    pub multi_index: Vec<u32>,
    pub numerator: String,
    pub denominator: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerWire {
    pub degree: u32,
    pub terms: Vec<TermWire>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaPolynomialWire {
    pub beta: String,
    pub ell: usize,
    pub q: u32,
    pub layers: Vec<LayerWire>,
}

/// Plain polynomial in `y`, used for user-supplied leading layers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyWire {
    pub terms: Vec<TermWire>,
}

pub fn poly_terms_wire(p: &Poly) -> Vec<TermWire> {
    p.terms()
        .map(|(e, c)| TermWire {
            multi_index: e.clone(),
            numerator: c.numer().to_string(),
            denominator: c.denom().to_string(),
        })
        .collect()
}

pub fn poly_from_terms_wire(nvars: usize, terms: &[TermWire]) -> Result<Poly> {
    let parsed = terms
        .iter()
        .map(|t| {
            let n: BigInt = t
                .numerator
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator {:?}", t.numerator)))?;
            let d: BigInt = t
                .denominator
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator {:?}", t.denominator)))?;
            if d.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok((t.multi_index.clone(), BigRational::new(n, d)))
        })
        .collect::<Result<Vec<_>>>()?;
    Poly::from_terms(nvars, parsed)
}

/// `Delta_beta` applied to a polynomial in `(r, y)`; only even powers of `r`
/// are accepted since `r^(-1) d/dr` of an odd power leaves `r^(-1)`.
pub fn apply_beta_laplacian(h: &Poly, beta: &BigRational) -> Result<Poly> {
    let nv = h.nvars();
    if nv == 0 {
        return Err(Error::VariableCount {
            expected: 1,
            found: 0,
        });
    }
    let mut out = h.laplacian_from(1);
    for (e, c) in h.terms() {
        let a = e[0];
        if a % 2 == 1 {
            return Err(Error::OddRadialPower { power: a });
        }
        if a == 0 {
            continue;
        }
        // d_rr + (1+beta)/r d_r on r^a gives a(a+beta) r^(a-2)
        let factor = int(a as i64) * (int(a as i64) + beta);
        let mut e2 = e.clone();
        e2[0] -= 2;
        out.add_term(e2, c * factor);
    }
    Ok(out)
}

/// `dnu_+ = omega_1^(1+beta) dmu` on the open half-sphere `S^ell_+`.
///
/// Points are `[omega_1, y_1, .., y_ell]` with `omega_1 > 0`; built from a
/// Gauss-Jacobi rule in `s = omega_1^2` (weight `s^(beta/2) (1-s)^((ell-2)/2)`)
/// times a product rule on `S^(ell-1)` for the `y` direction.
#[derive(Debug, Clone)]
pub struct HalfSphereMeasure {
    ell: usize,
    beta: f64,
    order: usize,
    rule: PointRule,
}

impl HalfSphereMeasure {
    pub const DEFAULT_ORDER: usize = 24;

    pub fn new(ell: usize, beta: f64, order: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Invalid("ell must be positive".into()));
        }
        if !(beta > 0.0) {
            return Err(Error::NonPositiveBeta(beta));
        }
        let polar = gauss_jacobi_unit(order, beta / 2.0, (ell as f64 - 2.0) / 2.0);
        let shell = sphere_rule(ell - 1, order);
        let mut points = Vec::with_capacity(polar.len() * shell.len());
        let mut weights = Vec::with_capacity(points.capacity());
        for (&s, &ws) in polar.nodes.iter().zip(&polar.weights) {
            let w1 = s.sqrt();
            let c = (1.0 - s).max(0.0).sqrt();
            for (eta, &we) in shell.points.iter().zip(&shell.weights) {
                let mut x = Vec::with_capacity(ell + 1);
                x.push(w1);
                x.extend(eta.iter().map(|e| e * c));
                points.push(x);
                weights.push(0.5 * ws * we);
            }
        }
        Ok(HalfSphereMeasure {
            ell,
            beta,
            order,
            rule: PointRule { points, weights },
        })
    }

    pub fn with_default_order(ell: usize, beta: f64) -> Result<Self> {
        Self::new(ell, beta, Self::DEFAULT_ORDER)
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Largest total degree integrated exactly.
    pub fn exact_degree(&self) -> u32 {
        2 * self.order as u32 - 1
    }

    pub fn rule(&self) -> &PointRule {
        &self.rule
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.rule.integrate(f)
    }

    pub fn total_mass(&self) -> f64 {
        self.rule.weights.iter().sum()
    }

    /// Closed-form `int_{S^ell_+} omega_1^(1+beta) dmu`.
    pub fn analytic_mass(&self) -> f64 {
        monomial_moment(self.ell, self.beta, 0, &vec![0; self.ell])
    }
}

/// `int_{S^ell_+} omega_1^(r_power + 1 + beta) prod y_i^(y_exps_i) dmu` by
/// Gamma functions; zero whenever some `y` exponent is odd.
pub fn monomial_moment(ell: usize, beta: f64, r_power: u32, y_exps: &[u32]) -> f64 {
    debug_assert_eq!(y_exps.len(), ell);
    if y_exps.iter().any(|e| e % 2 == 1) {
        return 0.0;
    }
    let e0 = r_power as f64 + 1.0 + beta;
    let total: f64 = e0 + y_exps.iter().map(|&e| e as f64).sum::<f64>() + ell as f64 + 1.0;
    let mut lg = ln_gamma((e0 + 1.0) / 2.0) - ln_gamma(total / 2.0);
    for &e in y_exps {
        lg += ln_gamma((e as f64 + 1.0) / 2.0);
    }
    lg.exp()
}

/// The two evaluations of a weighted half-sphere inner product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerProduct {
    pub quadrature: f64,
    pub analytic: f64,
}

impl InnerProduct {
    pub fn value(&self) -> f64 {
        self.analytic
    }

    /// Agreement relative to `scale` (e.g. `N_p N_q`, or the value itself).
    pub fn agrees(&self, scale: f64, tol: f64) -> bool {
        (self.quadrature - self.analytic).abs() <= tol * scale.abs().max(f64::MIN_POSITIVE)
    }
}

/// `int_{S^ell_+} h1 h2 dnu_+` for polynomials in `(r, y)`.
pub fn sphere_inner_product(
    h1: &Poly,
    h2: &Poly,
    measure: &HalfSphereMeasure,
) -> Result<InnerProduct> {
    let nv = measure.ell + 1;
    for h in [h1, h2] {
        if h.nvars() != nv {
            return Err(Error::VariableCount {
                expected: nv,
                found: h.nvars(),
            });
        }
    }
    let prod = h1.mul(h2);
    let degree = prod.degree().unwrap_or(0);
    if degree > measure.exact_degree() {
        return Err(Error::Invalid(format!(
            "product degree {degree} exceeds the measure's exact degree {}",
            measure.exact_degree()
        )));
    }
    let mut analytic = 0.0;
    for (e, c) in prod.terms() {
        analytic += rational_to_f64(c) * monomial_moment(measure.ell, measure.beta, e[0], &e[1..]);
    }
    let (f1, f2) = (h1.to_f64(), h2.to_f64());
    let quadrature = measure.integrate(|x| f1.eval(x) * f2.eval(x));
    Ok(InnerProduct {
        quadrature,
        analytic,
    })
}

fn check_measure(h: &BetaPolynomial, measure: &HalfSphereMeasure) -> Result<()> {
    if h.ell != measure.ell {
        return Err(Error::VariableCount {
            expected: measure.ell,
            found: h.ell,
        });
    }
    let b = h.beta_f64();
    if (b - measure.beta).abs() > 1e-14 * b.max(1.0) {
        return Err(Error::Invalid(format!(
            "beta mismatch: polynomial {b}, measure {}",
            measure.beta
        )));
    }
    Ok(())
}

/// Inner product of two beta-polynomials (which must share `ell` and `beta`
/// with the measure).
pub fn beta_inner_product(
    h1: &BetaPolynomial,
    h2: &BetaPolynomial,
    measure: &HalfSphereMeasure,
) -> Result<InnerProduct> {
    check_measure(h1, measure)?;
    check_measure(h2, measure)?;
    sphere_inner_product(&h1.full, &h2.full, measure)
}

/// `N_q = ||h||_{L^2(nu_+)}` from the analytic moments.
pub fn sphere_norm(h: &BetaPolynomial) -> Result<f64> {
    let order = (h.degree as usize + 2).max(4);
    let m = HalfSphereMeasure::new(h.ell, h.beta_f64(), order)?;
    Ok(beta_inner_product(h, h, &m)?.value().max(0.0).sqrt())
}

/// Weighted half-ball norm `int_{B_R^+} h^2 r^(1+beta) dr dy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallL2 {
    /// `N_q^2 R^(ell+2+beta+2q) / (ell+2+beta+2q)`.
    pub analytic: f64,
    /// Cylindrical-coordinate quadrature of the same integral.
    pub direct: f64,
}

impl BallL2 {
    pub fn value(&self) -> f64 {
        self.analytic
    }

    pub fn relative_gap(&self) -> f64 {
        (self.analytic - self.direct).abs() / self.analytic.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn weighted_ball_l2(h: &BetaPolynomial, radius: f64) -> Result<BallL2> {
    if !(radius > 0.0) {
        return Err(Error::Invalid(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let beta = h.beta_f64();
    let n_sq = sphere_norm(h)?.powi(2);
    let exponent = h.ell as f64 + 2.0 + beta + 2.0 * h.degree as f64;
    let analytic = n_sq * radius.powf(exponent) / exponent;
    let rule = half_ball_rule(h.ell, 1.0 + beta, radius, h.degree as usize + 4);
    let direct = rule.integrate(|x| {
        let v = h.eval_point(x);
        v * v
    });
    Ok(BallL2 { analytic, direct })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenCheck {
    /// `q (q + ell + beta)`.
    pub eigenvalue: f64,
    /// Largest normalized defect over the test functions.
    pub max_residual: f64,
    pub test_count: usize,
}

/// Weak form of the half-sphere eigen-identity for the trace of `h`:
///
/// ```text
/// int omega_1^(1+beta) grad h . grad zeta dmu = q (q + ell + beta) int h zeta dnu_+
/// ```
///
/// for test functions `zeta = omega_1^(2a) y^b` of degree up to `q + 2`.
/// Defects are divided by `||h|| ||zeta|| max(1, eigenvalue)` in `L^2(nu_+)`.
pub fn spherical_eigen_check(h: &BetaPolynomial) -> Result<EigenCheck> {
    let ell = h.ell;
    let q = h.degree;
    let beta = h.beta_f64();
    let eigenvalue = q as f64 * (q as f64 + ell as f64 + beta);
    let measure = HalfSphereMeasure::new(ell, beta, q as usize + 6)?;
    let grad_h: Vec<F64Poly> = (0..=ell).map(|v| h.full.derivative(v).to_f64()).collect();
    let h_norm = measure.integrate(|x| h.eval_point(x).powi(2)).sqrt();

    let tests = test_monomials(ell, q + 2);
    let mut max_residual = 0.0f64;
    for zeta in &tests {
        let zf = zeta.to_f64();
        let grad_z: Vec<F64Poly> = (0..=ell).map(|v| zeta.derivative(v).to_f64()).collect();
        let stiffness = measure.integrate(|x| {
            let gh: Vec<f64> = grad_h.iter().map(|g| g.eval(x)).collect();
            let gz: Vec<f64> = grad_z.iter().map(|g| g.eval(x)).collect();
            let dot: f64 = gh.iter().zip(&gz).map(|(a, b)| a * b).sum();
            let nh: f64 = gh.iter().zip(x).map(|(a, b)| a * b).sum();
            let nz: f64 = gz.iter().zip(x).map(|(a, b)| a * b).sum();
            dot - nh * nz
        });
        let mass = measure.integrate(|x| h.eval_point(x) * zf.eval(x));
        let z_norm = measure.integrate(|x| zf.eval(x).powi(2)).sqrt();
        let scale = (h_norm * z_norm * eigenvalue.max(1.0)).max(f64::MIN_POSITIVE);
        let residual = if h_norm == 0.0 {
            0.0
        } else {
            (stiffness - eigenvalue * mass).abs() / scale
        };
        max_residual = max_residual.max(residual);
    }
    Ok(EigenCheck {
        eigenvalue,
        max_residual,
        test_count: tests.len(),
    })
}

/// Monomials `r^(2a) y^b` of total degree `<= max_degree`.
fn test_monomials(ell: usize, max_degree: u32) -> Vec<Poly> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; ell + 1];
    fn rec(v: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Poly>) {
        if v == exps.len() {
            let nv = exps.len();
            out.push(Poly::monomial(nv, exps.clone(), BigRational::one()));
            return;
        }
        let step = if v == 0 { 2 } else { 1 };
        let mut k = 0;
        while k <= left {
            exps[v] = k;
            rec(v + 1, left - k, exps, out);
            k += step;
        }
        exps[v] = 0;
    }
    rec(0, max_degree, &mut exps, &mut out);
    out
}
