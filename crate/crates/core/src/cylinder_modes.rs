//! Jacobi fields on the cylinder `C_0 x R^ell` assembled from separated modes
//! `v = sum_j r^(gamma_j) h_j(r, y) phi_j(omega)`.
//!
//! The cross-section eigenfunctions `phi_j` stay symbolic: every angular
//! integral reduces to `<phi_i, phi_j> = delta_ij`, so only the radial-`y`
//! components `v_j(r, y)` are evaluated.
//!
//! Pointwise residuals are taken on a logarithmic radial grid `s = log r`,
//! where `r^2 (v_rr + (n-1)/r v_r) = v_ss + (n-2) v_s` and
//! `r^2 (h_rr + (1+beta)/r h_r) = h_ss + beta h_s`, so homogeneous profiles
//! have the same relative resolution at every scale.

use std::io::Write;

use num_rational::BigRational;

use crate::beta_poly::{
    apply_beta_laplacian, beta_inner_product, generate, BetaPolynomial, HalfSphereMeasure,
};
use crate::beta_solver::HalfBallFunction;
use crate::cone_spectrum::{spectrum, ConeSpec, SpectralLine};
use crate::error::{Error, Result};
use crate::growth::GrowthProfile;
use crate::poly::{rational_from_f64, rational_to_f64, Poly};
use crate::quadrature::half_ball_rule;

/// Default inner radius of the evaluation annulus.
pub const DEFAULT_R_MIN: f64 = 1e-2;
pub const DEFAULT_R_MAX: f64 = 1.0;

/// `beta_j` of a real level as an exact rational, or the nearest dyadic rational.
pub fn level_beta(line: &SpectralLine) -> Result<BigRational> {
    if let Some(b) = line.exact_beta() {
        return Ok(b);
    }
    line.beta()
        .map(rational_from_f64)
        .ok_or_else(|| Error::Level {
            level: line.index,
            reason: "complex characteristic exponents".into(),
        })
}

fn level_line(cone: &ConeSpec, j: usize) -> Result<SpectralLine> {
    if j == 0 {
        return Err(Error::Level {
            level: 0,
            reason: "levels are numbered from 1".into(),
        });
    }
    let line = spectrum(cone, j).pop().expect("spectrum is infinite");
    if !line.is_real() {
        return Err(Error::Level {
            level: j,
            reason: "complex characteristic exponents".into(),
        });
    }
    Ok(line)
}

/// One term `amplitude * r^(gamma_j) h(r, y)` of level `j`.
#[derive(Debug, Clone)]
pub struct ModeSpec {
    pub level: usize,
    pub poly: BetaPolynomial,
    pub amplitude: f64,
}

impl ModeSpec {
    /// The `beta_j`-harmonic polynomial with leading layer `p0`.
    pub fn from_leading(
        cone: &ConeSpec,
        level: usize,
        ell: usize,
        p0: &Poly,
        amplitude: f64,
    ) -> Result<Self> {
        let line = level_line(cone, level)?;
        let poly = generate(&level_beta(&line)?, ell, p0)?;
        Ok(ModeSpec {
            level,
            poly,
            amplitude,
        })
    }

    /// `ell = 1` mode with leading layer `y^q`.
    pub fn h_q(cone: &ConeSpec, level: usize, q: u32, amplitude: f64) -> Result<Self> {
        let p0 = Poly::monomial(1, vec![q], BigRational::from_integer(1.into()));
        Self::from_leading(cone, level, 1, &p0, amplitude)
    }
}

#[derive(Debug, Clone)]
pub struct JacobiFieldSpec {
    cone: ConeSpec,
    ell: usize,
    levels: Vec<SpectralLine>,
    modes: Vec<ModeSpec>,
    r_range: (f64, f64),
}

impl JacobiFieldSpec {
    pub fn new(cone: ConeSpec, ell: usize, modes: Vec<ModeSpec>) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Invalid("ell must be positive".into()));
        }
        let top = modes.iter().map(|m| m.level).max().unwrap_or(1).max(1);
        let levels = spectrum(&cone, top);
        for m in &modes {
            let line = level_line(&cone, m.level)?;
            if m.poly.ell() != ell {
                return Err(Error::VariableCount {
                    expected: ell,
                    found: m.poly.ell(),
                });
            }
            if !m.amplitude.is_finite() {
                return Err(Error::Invalid(format!(
                    "amplitude {} is not finite",
                    m.amplitude
                )));
            }
            let matches = match line.exact_beta() {
                Some(b) => m.poly.beta() == &b,
                None => {
                    let b = line.beta().unwrap();
                    (m.poly.beta_f64() - b).abs() <= 1e-12 * b
                }
            };
            if !matches {
                return Err(Error::Level {
                    level: m.level,
                    reason: format!(
                        "polynomial has beta = {} but the level has beta = {}",
                        m.poly.beta(),
                        line.beta().unwrap()
                    ),
                });
            }
        }
        Ok(JacobiFieldSpec {
            cone,
            ell,
            levels,
            modes,
            r_range: (DEFAULT_R_MIN, DEFAULT_R_MAX),
        })
    }

    pub fn with_range(mut self, r_min: f64, r_max: f64) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min) {
            return Err(Error::Invalid(format!(
                "bad radius range [{r_min}, {r_max}]"
            )));
        }
        self.r_range = (r_min, r_max);
        Ok(self)
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn modes(&self) -> &[ModeSpec] {
        &self.modes
    }

    pub fn r_range(&self) -> (f64, f64) {
        self.r_range
    }

    pub fn level(&self, j: usize) -> &SpectralLine {
        &self.levels[j - 1]
    }
}

/// A function of `(r, y)` on `r > 0`.
pub trait ProfileFn {
    fn ell(&self) -> usize;
    fn value(&self, r: f64, y: &[f64]) -> f64;
    /// `r^(-gamma) v` as an exact polynomial, when known.
    fn exact_polynomial(&self) -> Option<Poly> {
        None
    }
}

/// A closure viewed as a profile.
pub struct FnProfile<F> {
    ell: usize,
    f: F,
}

impl<F: Fn(f64, &[f64]) -> f64> FnProfile<F> {
    pub fn new(ell: usize, f: F) -> Self {
        FnProfile { ell, f }
    }
}

impl<F: Fn(f64, &[f64]) -> f64> ProfileFn for FnProfile<F> {
    fn ell(&self) -> usize {
        self.ell
    }

    fn value(&self, r: f64, y: &[f64]) -> f64 {
        (self.f)(r, y)
    }
}

/// `v_j(r, y) = r^(gamma_j) sum amplitude * h(r, y)` for one level.
#[derive(Debug, Clone)]
pub struct Component {
    pub level: usize,
    pub gamma: f64,
    pub exact_gamma: Option<BigRational>,
    pub beta: BigRational,
    pub ell: usize,
    pub terms: Vec<(f64, BetaPolynomial)>,
}

impl Component {
    /// `sum amplitude * h` without the radial power.
    pub fn harmonic_part(&self, r: f64, y: &[f64]) -> f64 {
        self.terms.iter().map(|(a, h)| a * h.eval(r, y)).sum()
    }
}

impl ProfileFn for Component {
    fn ell(&self) -> usize {
        self.ell
    }

    fn value(&self, r: f64, y: &[f64]) -> f64 {
        if self.terms.is_empty() {
            return 0.0;
        }
        r.powf(self.gamma) * self.harmonic_part(r, y)
    }

    fn exact_polynomial(&self) -> Option<Poly> {
        let mut p = Poly::zero(self.ell + 1);
        for (a, h) in &self.terms {
            p = p.add(&h.full_poly().scale(&rational_from_f64(*a)));
        }
        Some(p)
    }
}

/// Per-level components of a synthesized Jacobi field.
#[derive(Debug, Clone)]
pub struct ModeProfile {
    ell: usize,
    components: Vec<Component>,
}

impl ModeProfile {
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, j: usize) -> Option<&Component> {
        self.components.iter().find(|c| c.level == j)
    }

    /// `v_j(r, y)`, zero for levels without modes.
    pub fn value(&self, j: usize, r: f64, y: &[f64]) -> f64 {
        self.component(j).map_or(0.0, |c| c.value(r, y))
    }

    /// `sum_j v_j^2`, the angular average of `v^2` by orthonormality.
    pub fn sum_of_squares(&self, r: f64, y: &[f64]) -> f64 {
        self.components.iter().map(|c| c.value(r, y).powi(2)).sum()
    }

    pub fn ell(&self) -> usize {
        self.ell
    }
}

/// Group modes by level, attaching `gamma_j^+`.
pub fn synthesize(spec: &JacobiFieldSpec) -> ModeProfile {
    let mut components: Vec<Component> = Vec::new();
    for m in &spec.modes {
        if let Some(c) = components.iter_mut().find(|c| c.level == m.level) {
            c.terms.push((m.amplitude, m.poly.clone()));
            continue;
        }
        let line = spec.level(m.level);
        components.push(Component {
            level: m.level,
            gamma: line.gamma_plus().expect("validated real level"),
            exact_gamma: line.exact_gamma_plus(),
            beta: m.poly.beta().clone(),
            ell: spec.ell,
            terms: vec![(m.amplitude, m.poly.clone())],
        });
    }
    components.sort_by_key(|c| c.level);
    ModeProfile {
        ell: spec.ell,
        components,
    }
}

/// Sampling of an annulus `r_min <= r <= r_max` with step `step` in `log r`
/// (and in each `y` direction).
#[derive(Debug, Clone, PartialEq)]
pub struct OdeGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub step: f64,
    /// Coordinates used along every `y` axis.
    pub y_samples: Vec<f64>,
}

impl OdeGrid {
    pub fn new(r_min: f64, r_max: f64, step: f64) -> Self {
        OdeGrid {
            r_min,
            r_max,
            step,
            y_samples: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0) {
            return Err(Error::AxisContact(self.r_min));
        }
        if !(self.r_max > self.r_min) || !(self.step > 0.0) || self.y_samples.is_empty() {
            return Err(Error::Invalid(format!("bad residual grid {self:?}")));
        }
        Ok(())
    }
}

impl Default for OdeGrid {
    fn default() -> Self {
        Self::new(DEFAULT_R_MIN, DEFAULT_R_MAX, 1e-3)
    }
}

const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const D2: [f64; 5] = [
    -1.0 / 12.0,
    16.0 / 12.0,
    -30.0 / 12.0,
    16.0 / 12.0,
    -1.0 / 12.0,
];

/// Normwise relative residual of `f_ss + c f_s - lambda f + r^2 Delta_y f`
/// with five-point fourth-order differences, scaled by the largest
/// `|f| + sum |term|` on the grid.
fn log_grid_residual(
    f: &dyn Fn(f64, &[f64]) -> f64,
    ell: usize,
    c: f64,
    lambda: f64,
    grid: &OdeGrid,
) -> Result<f64> {
    grid.validate()?;
    let h = grid.step;
    let (s0, s1) = (grid.r_min.ln(), grid.r_max.ln());
    let ns = ((s1 - s0) / h).floor() as usize + 1;
    let ny = grid.y_samples.len();
    let mut max_num = 0.0f64;
    let mut max_den = 0.0f64;
    let mut idx = vec![0usize; ell];
    let mut y = vec![0.0; ell];
    let mut yy = vec![0.0; ell];
    loop {
        for (d, &i) in idx.iter().enumerate() {
            y[d] = grid.y_samples[i];
        }
        for i in 0..ns {
            let s = s0 + i as f64 * h;
            let r = s.exp();
            let mut fs = 0.0;
            let mut fss = 0.0;
            let mut f0 = 0.0;
            for (k, off) in (-2i32..=2).enumerate() {
                let v = f((s + off as f64 * h).exp(), &y);
                fs += D1[k] * v;
                fss += D2[k] * v;
                if off == 0 {
                    f0 = v;
                }
            }
            fs /= h;
            fss /= h * h;
            let mut lap_y = 0.0;
            for d in 0..ell {
                yy.copy_from_slice(&y);
                let mut acc = 0.0;
                for (k, off) in (-2i32..=2).enumerate() {
                    yy[d] = y[d] + off as f64 * h;
                    acc += D2[k] * if off == 0 { f0 } else { f(r, &yy) };
                }
                lap_y += acc / (h * h);
            }
            let terms = [fss, c * fs, -lambda * f0, r * r * lap_y];
            max_num = max_num.max(terms.iter().sum::<f64>().abs());
            max_den = max_den.max(terms.iter().map(|t| t.abs()).sum::<f64>() + f0.abs());
        }
        // advance the y multi-index
        let mut d = 0;
        loop {
            if d == ell {
                return Ok(if max_den == 0.0 {
                    0.0
                } else {
                    max_num / max_den
                });
            }
            idx[d] += 1;
            if idx[d] < ny {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Residual of `r^(1-n) (r^(n-1) v')' + Delta_y v - lambda_j r^(-2) v = 0`,
/// relative to the size of its terms.
pub fn separated_ode_residual(
    vj: &dyn ProfileFn,
    cone: &ConeSpec,
    j: usize,
    grid: &OdeGrid,
) -> Result<f64> {
    let line = level_line(cone, j)?;
    let c = cone.n as f64 - 2.0;
    log_grid_residual(&|r, y| vj.value(r, y), vj.ell(), c, line.lambda_f64(), grid)
}

/// `h_j = r^(-gamma_j) v_j` with its `beta_j`.
pub struct BetaProfile<'a> {
    source: &'a dyn ProfileFn,
    pub level: usize,
    pub gamma: f64,
    pub beta: BigRational,
}

impl BetaProfile<'_> {
    pub fn beta_f64(&self) -> f64 {
        rational_to_f64(&self.beta)
    }

    /// Exact `Delta_beta h` when the source is polynomial.
    pub fn symbolic_laplacian(&self) -> Option<Result<Poly>> {
        self.source
            .exact_polynomial()
            .map(|p| apply_beta_laplacian(&p, &self.beta))
    }

    /// True when the exact `Delta_beta h` vanishes.
    pub fn symbolic_check(&self) -> Option<bool> {
        self.symbolic_laplacian()
            .map(|r| r.map(|p| p.is_zero()).unwrap_or(false))
    }

    /// Relative finite-difference residual of `Delta_beta h = 0`.
    pub fn laplacian_residual(&self, grid: &OdeGrid) -> Result<f64> {
        log_grid_residual(
            &|r, y| self.value(r, y),
            self.source.ell(),
            self.beta_f64(),
            0.0,
            grid,
        )
    }

    pub fn value(&self, r: f64, y: &[f64]) -> f64 {
        r.powf(-self.gamma) * self.source.value(r, y)
    }
}

impl HalfBallFunction for BetaProfile<'_> {
    fn ell(&self) -> usize {
        self.source.ell()
    }

    fn beta(&self) -> f64 {
        self.beta_f64()
    }

    fn value(&self, r: f64, y: &[f64]) -> f64 {
        BetaProfile::value(self, r, y)
    }
}

pub fn mode_projection_transform<'a>(
    vj: &'a dyn ProfileFn,
    cone: &ConeSpec,
    j: usize,
) -> Result<BetaProfile<'a>> {
    let line = level_line(cone, j)?;
    Ok(BetaProfile {
        source: vj,
        level: j,
        gamma: line.gamma_plus().expect("real level"),
        beta: level_beta(&line)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvintRow {
    pub rho: f64,
    pub analytic: f64,
    pub quadrature: f64,
    pub relative_gap: f64,
}

#[derive(Debug, Clone)]
pub struct AvintProfile {
    /// `sum b_i^2 rho^(2 q_i)` with `q_i = q + (beta_j - beta_1)/2`.
    pub profile: GrowthProfile,
    pub rows: Vec<AvintRow>,
}

impl AvintProfile {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "rho,avint_analytic,avint_quadrature,relative_gap")?;
        for r in &self.rows {
            writeln!(
                out,
                "{:?},{:?},{:?},{:?}",
                r.rho, r.analytic, r.quadrature, r.relative_gap
            )?;
        }
        Ok(())
    }

    /// Sampled profile built from the quadrature column.
    pub fn quadrature_samples(&self) -> Result<GrowthProfile> {
        GrowthProfile::sampled(
            self.rows.iter().map(|r| (r.rho, r.quadrature)).collect(),
            "avint quadrature",
        )
    }
}

/// `avint(rho) = rho^(-ell-2-beta_1) int_{C cap B_rho} v^2`, analytically from
/// the half-sphere norms and by direct quadrature of `sum_j v_j^2 r^(n-1)`.
pub fn avint_profile(spec: &JacobiFieldSpec, radii: &[f64]) -> Result<AvintProfile> {
    for w in radii.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Invalid("radii must be strictly ascending".into()));
        }
    }
    if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::Invalid("radii must be positive".into()));
    }
    let ell = spec.ell;
    let beta1_line = &spec.levels[0];
    let beta1 = beta1_line.beta().ok_or_else(|| Error::Level {
        level: 1,
        reason: "complex characteristic exponents".into(),
    })?;
    let beta1_exact = beta1_line.exact_beta();
    let fields = synthesize(spec);

    let mut terms: Vec<(f64, f64)> = Vec::new();
    for comp in fields.components() {
        let beta_j = rational_to_f64(&comp.beta);
        let mut degrees: Vec<u32> = comp.terms.iter().map(|(_, h)| h.degree()).collect();
        degrees.sort_unstable();
        degrees.dedup();
        for q in degrees {
            let group: Vec<&(f64, BetaPolynomial)> = comp
                .terms
                .iter()
                .filter(|(_, h)| h.degree() == q && !h.is_zero())
                .collect();
            let measure = HalfSphereMeasure::new(ell, beta_j, q as usize + 4)?;
            let mut b_sq = 0.0;
            for (a, ha) in &group {
                for (b, hb) in &group {
                    b_sq += a * b * beta_inner_product(ha, hb, &measure)?.value();
                }
            }
            let exponent = match (&beta1_exact, comp.beta == rational_from_f64(beta_j)) {
                (Some(b1), true) if spec.level(comp.level).exact_beta().is_some() => {
                    let half = BigRational::new(1.into(), 2.into());
                    rational_to_f64(
                        &(BigRational::from_integer(q.into()) + (&comp.beta - b1) * half),
                    )
                }
                _ => q as f64 + 0.5 * (beta_j - beta1),
            };
            let denom = ell as f64 + 2.0 + beta_j + 2.0 * q as f64;
            terms.push((exponent, b_sq.max(0.0) / denom));
        }
    }
    let profile = GrowthProfile::analytic(terms, "avint analytic")?;

    let n = spec.cone.n as f64;
    let max_q = spec
        .modes
        .iter()
        .map(|m| m.poly.degree())
        .max()
        .unwrap_or(0) as usize;
    let mut rows = Vec::with_capacity(radii.len());
    for &rho in radii {
        let mut total = 0.0;
        for comp in fields.components() {
            // r^(2 gamma_j) moves into the Jacobi weight r^(n-1)
            let kappa = n - 1.0 + 2.0 * comp.gamma;
            let rule = half_ball_rule(ell, kappa, rho, max_q + 4);
            total += rule.integrate(|x| comp.harmonic_part(x[0], &x[1..]).powi(2));
        }
        let quadrature = total * rho.powf(-(ell as f64) - 2.0 - beta1);
        let analytic = profile.value(rho);
        let relative_gap = if analytic == 0.0 && quadrature == 0.0 {
            0.0
        } else {
            (analytic - quadrature).abs() / analytic.abs().max(quadrature.abs())
        };
        rows.push(AvintRow {
            rho,
            analytic,
            quadrature,
            relative_gap,
        });
    }
    Ok(AvintProfile { profile, rows })
}
