//! Spectral data of the minimal cones over `S^p(a) x S^q(b)`.
//!
//! The cross-section `Sigma` is the product of spheres with `a^2 = p/(p+q)` and
//! `b^2 = q/(p+q)`, which is minimal in `S^n`, `n = p + q + 1`, and has
//! `|A_Sigma|^2 = n - 1`. Eigenvalues of `-L_Sigma = -Delta_Sigma - |A_Sigma|^2`
//! come from products of sphere harmonics of degrees `(k, m)`:
//!
//! ```text
//! lambda(k, m) = k(k+p-1)/a^2 + m(m+q-1)/b^2 - (n-1)
//! ```
//!
//! Everything closed-form is kept in exact rational arithmetic; square roots
//! are exact whenever the radicand is a rational square.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::rational_to_f64;
use crate::quadrature::composite_legendre;

/// Composite Gauss-Legendre density for radial integrals.
pub const RADIAL_NODES_PER_UNIT: usize = 64;
/// Relative slack allowed when comparing two radial quadratures.
pub const RADIAL_REL_TOL: f64 = 1e-10;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact square root of a nonnegative rational, when it is a rational square.
pub fn exact_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

/// The cone over `S^p(a) x S^q(b)` in `R^(n+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeSpec {
    pub p: u32,
    pub q: u32,
    pub n: u32,
    pub a_sq: BigRational,
    pub b_sq: BigRational,
    /// `|A_Sigma|^2`, constant on the cross-section.
    pub second_ff_sq: BigRational,
}

pub fn build_cone(p: u32, q: u32) -> Result<ConeSpec> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidCone { p, q });
    }
    let s = (p + q) as i64;
    let n = p + q + 1;
    Ok(ConeSpec {
        p,
        q,
        n,
        a_sq: rat(p as i64, s),
        b_sq: rat(q as i64, s),
        second_ff_sq: int(n as i64 - 1),
    })
}

impl ConeSpec {
    /// The Simons cone `{|x'|^2 = |x''|^2}` in `R^8`.
    pub fn simons() -> Self {
        build_cone(3, 3).expect("valid")
    }

    /// `((n-2)/2)^2`.
    pub fn hardy_constant(&self) -> BigRational {
        let h = rat(self.n as i64 - 2, 2);
        &h * &h
    }

    /// Eigenvalue of `-L_Sigma` on the level generated by harmonics of degrees `(k, m)`.
    pub fn level_eigenvalue(&self, k: u32, m: u32) -> BigRational {
        let (k, m) = (k as i64, m as i64);
        let first = int(k * (k + self.p as i64 - 1)) / &self.a_sq;
        let second = int(m * (m + self.q as i64 - 1)) / &self.b_sq;
        first + second - &self.second_ff_sq
    }

    /// `|A_Sigma|^2` recomputed from the principal curvatures of the product
    /// `S^p(a) x S^q(b)` inside `S^n`: `p` curvatures `b/a` and `q` curvatures `-a/b`.
    pub fn second_ff_from_curvatures(&self) -> BigRational {
        int(self.p as i64) * (&self.b_sq / &self.a_sq)
            + int(self.q as i64) * (&self.a_sq / &self.b_sq)
    }
}

/// Dimension of degree-`k` spherical harmonics on `S^d`.
pub fn harmonic_dimension(d: u32, k: u32) -> u64 {
    fn binom(n: u64, r: u64) -> u64 {
        if r > n {
            return 0;
        }
        let r = r.min(n - r);
        (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
    }
    let (d, k) = (d as u64, k as u64);
    let total = binom(k + d, d);
    if k >= 2 {
        total - binom(k - 2 + d, d)
    } else {
        total
    }
}

/// One eigen-level of `-L_Sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine {
    /// 1-based position in nondecreasing order of distinct eigenvalues.
    pub index: usize,
    pub lambda: BigRational,
    pub multiplicity: u64,
    /// `((n-2)/2)^2 + lambda`; negative for complex exponents.
    pub radicand: BigRational,
    /// Half the cone dimension shift, `(n-2)/2`.
    pub shift: BigRational,
    /// Harmonic degree pairs `(k, m)` producing this level, lexicographic.
    pub labels: Vec<(u32, u32)>,
}

impl SpectralLine {
    pub fn lambda_f64(&self) -> f64 {
        rational_to_f64(&self.lambda)
    }

    pub fn is_real(&self) -> bool {
        !self.radicand.is_negative()
    }

    /// `beta_j = 2 sqrt(((n-2)/2)^2 + lambda_j)` when it is rational.
    pub fn exact_beta(&self) -> Option<BigRational> {
        exact_sqrt(&self.radicand).map(|s| s * int(2))
    }

    pub fn beta(&self) -> Option<f64> {
        self.is_real()
            .then(|| 2.0 * rational_to_f64(&self.radicand).sqrt())
    }

    pub fn exact_gamma_plus(&self) -> Option<BigRational> {
        exact_sqrt(&self.radicand).map(|s| s - &self.shift)
    }

    pub fn exact_gamma_minus(&self) -> Option<BigRational> {
        exact_sqrt(&self.radicand).map(|s| -s - &self.shift)
    }

    pub fn gamma_plus(&self) -> Option<f64> {
        match self.exact_gamma_plus() {
            Some(g) => Some(rational_to_f64(&g)),
            None => self.beta().map(|b| 0.5 * b - rational_to_f64(&self.shift)),
        }
    }

    pub fn gamma_minus(&self) -> Option<f64> {
        match self.exact_gamma_minus() {
            Some(g) => Some(rational_to_f64(&g)),
            None => self.beta().map(|b| -0.5 * b - rational_to_f64(&self.shift)),
        }
    }

    /// Complex exponents `-(n-2)/2 +- i sqrt(-radicand)` for unstable levels.
    pub fn complex_exponents(&self) -> Option<(f64, f64)> {
        (!self.is_real()).then(|| {
            (
                -rational_to_f64(&self.shift),
                (-rational_to_f64(&self.radicand)).sqrt(),
            )
        })
    }
}

/// The first `count` distinct eigen-levels of `-L_Sigma`.
pub fn spectrum(cone: &ConeSpec, count: usize) -> Vec<SpectralLine> {
    let shift = rat(cone.n as i64 - 2, 2);
    let hardy = &shift * &shift;
    let mut heap = BinaryHeap::new();
    let mut seen = HashSet::new();
    heap.push(Reverse((cone.level_eigenvalue(0, 0), 0u32, 0u32)));
    seen.insert((0u32, 0u32));
    let mut lines: Vec<SpectralLine> = Vec::new();
    while let Some(Reverse((lambda, k, m))) = heap.pop() {
        let mult = harmonic_dimension(cone.p, k) * harmonic_dimension(cone.q, m);
        match lines.last_mut() {
            Some(last) if last.lambda == lambda => {
                last.multiplicity += mult;
                last.labels.push((k, m));
            }
            _ => {
                if lines.len() == count {
                    break;
                }
                lines.push(SpectralLine {
                    index: lines.len() + 1,
                    radicand: &hardy + &lambda,
                    lambda,
                    multiplicity: mult,
                    shift: shift.clone(),
                    labels: vec![(k, m)],
                });
            }
        }
        for next in [(k + 1, m), (k, m + 1)] {
            if seen.insert(next) {
                heap.push(Reverse((
                    cone.level_eigenvalue(next.0, next.1),
                    next.0,
                    next.1,
                )));
            }
        }
    }
    lines
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    StrictlyStable,
    Borderline,
    Unstable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub class: StabilityClass,
    /// `lambda_1 + ((n-2)/2)^2`.
    pub margin: BigRational,
}

pub fn strict_stability(cone: &ConeSpec) -> StabilityReport {
    let lambda1 = cone.level_eigenvalue(0, 0);
    let margin = lambda1 + cone.hardy_constant();
    let class = if margin.is_positive() {
        StabilityClass::StrictlyStable
    } else if margin.is_zero() {
        StabilityClass::Borderline
    } else {
        StabilityClass::Unstable
    };
    StabilityReport { class, margin }
}

/// A compactly supported radial function with its derivative.
pub trait RadialTestFunction {
    fn support(&self) -> (f64, f64);
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
    /// Points where the function is only piecewise smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Radial test function given by closures.
pub struct RadialFn<F, G> {
    pub support: (f64, f64),
    pub f: F,
    pub df: G,
}

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> RadialFn<F, G> {
    pub fn new(lo: f64, hi: f64, f: F, df: G) -> Self {
        RadialFn {
            support: (lo, hi),
            f,
            df,
        }
    }
}

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> RadialTestFunction for RadialFn<F, G> {
    fn support(&self) -> (f64, f64) {
        self.support
    }
    fn value(&self, r: f64) -> f64 {
        (self.f)(r)
    }
    fn derivative(&self, r: f64) -> f64 {
        (self.df)(r)
    }
}

/// Piecewise cubic Hermite interpolant of radial samples, with zero values
/// forced at both ends of the support.
#[derive(Debug, Clone)]
pub struct SampledRadial {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl SampledRadial {
    /// `knots` strictly increasing (at least 3); interior `values` are used as
    /// given, the end values are set to zero.
    pub fn new(knots: Vec<f64>, mut values: Vec<f64>) -> Result<Self> {
        if knots.len() < 3 || knots.len() != values.len() {
            return Err(Error::Invalid(
                "sampled radial function needs >= 3 knots with matching values".into(),
            ));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("knots must be strictly increasing".into()));
        }
        let last = values.len() - 1;
        values[0] = 0.0;
        values[last] = 0.0;
        let n = knots.len();
        let slopes = (0..n)
            .map(|i| {
                let (a, b) = if i == 0 {
                    (0, 1)
                } else if i == n - 1 {
                    (n - 2, n - 1)
                } else {
                    (i - 1, i + 1)
                };
                (values[b] - values[a]) / (knots[b] - knots[a])
            })
            .collect();
        Ok(SampledRadial {
            knots,
            values,
            slopes,
        })
    }

    fn segment(&self, r: f64) -> Option<usize> {
        let (lo, hi) = (self.knots[0], *self.knots.last().unwrap());
        if r < lo || r > hi {
            return None;
        }
        let idx = self.knots.partition_point(|&k| k <= r);
        Some(idx.clamp(1, self.knots.len() - 1) - 1)
    }

    fn hermite(&self, r: f64) -> (f64, f64) {
        let Some(i) = self.segment(r) else {
            return (0.0, 0.0);
        };
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let t = (r - x0) / h;
        let (y0, y1, m0, m1) = (
            self.values[i],
            self.values[i + 1],
            self.slopes[i] * h,
            self.slopes[i + 1] * h,
        );
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let dv = (6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1;
        (v, dv / h)
    }
}

impl RadialTestFunction for SampledRadial {
    fn support(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }
    fn value(&self, r: f64) -> f64 {
        self.hermite(r).0
    }
    fn derivative(&self, r: f64) -> f64 {
        self.hermite(r).1
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.knots.clone()
    }
}

fn radial_integral<F: Fn(f64) -> f64>(test: &dyn RadialTestFunction, f: F) -> f64 {
    let (lo, hi) = test.support();
    composite_legendre(lo, hi, RADIAL_NODES_PER_UNIT, &test.breakpoints(), f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyReport {
    /// `int r^(-p-2) f^2 r^(n-1) dr`
    pub lhs: f64,
    /// `int r^(-p) f'^2 r^(n-1) dr`
    pub rhs: f64,
    /// `lhs / rhs`, defined as 0 when both vanish.
    pub ratio: f64,
    /// Sharp constant `(2/(n-2-p))^2`.
    pub constant: f64,
}

impl HardyReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.constant * self.rhs * (1.0 + RADIAL_REL_TOL) + f64::MIN_POSITIVE
    }
}

/// Weighted Hardy inequality `int |x|^(-p-2) f^2 <= C int |x|^(-p) |f'|^2`
/// for radial `f` in `n` dimensions.
pub fn hardy_check(n: u32, p_exp: f64, test: &dyn RadialTestFunction) -> Result<HardyReport> {
    let bound = n as f64 - 2.0;
    if !(p_exp < bound) {
        return Err(Error::HardyExponent { p_exp, bound });
    }
    let nm1 = n as f64 - 1.0;
    let lhs = radial_integral(test, |r| {
        let v = test.value(r);
        if v == 0.0 {
            0.0
        } else {
            v * v * r.powf(nm1 - p_exp - 2.0)
        }
    });
    let rhs = radial_integral(test, |r| {
        let d = test.derivative(r);
        d * d * r.powf(nm1 - p_exp)
    });
    let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
    let constant = (2.0 / (bound - p_exp)).powi(2);
    Ok(HardyReport {
        lhs,
        rhs,
        ratio,
        constant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityCheck {
    /// `lambda int r^(n-3) zeta^2 dr`
    pub lhs: f64,
    /// `int (zeta'^2 - (n-1) r^(-2) zeta^2) r^(n-1) dr`
    pub rhs: f64,
    pub holds: bool,
}

/// The strict-stability inequality on the cone tested with a radial function;
/// the cross-section integral reduces to a common factor `|Sigma|`.
pub fn cone_stability_inequality(
    cone: &ConeSpec,
    test: &dyn RadialTestFunction,
    lambda_cand: f64,
) -> StabilityCheck {
    let n = cone.n as f64;
    let a_sq = rational_to_f64(&cone.second_ff_sq);
    let weighted = radial_integral(test, |r| {
        let v = test.value(r);
        v * v * r.powf(n - 3.0)
    });
    let gradient = radial_integral(test, |r| {
        let d = test.derivative(r);
        d * d * r.powf(n - 1.0)
    });
    let lhs = lambda_cand * weighted;
    let rhs = gradient - a_sq * weighted;
    let scale = lhs.abs() + gradient + a_sq * weighted;
    StabilityCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + RADIAL_REL_TOL * scale,
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "complex".into())
}

fn fmt_exact_or(exact: Option<BigRational>, approx: Option<f64>) -> String {
    match exact {
        Some(e) => e.to_string(),
        None => fmt_opt(approx),
    }
}

/// Columns `j,lambda,multiplicity,gamma_minus,gamma_plus,beta,k,m`; `(k, m)` is
/// the lexicographically first label of the level.
pub fn write_spectrum_csv<W: Write>(lines: &[SpectralLine], mut out: W) -> std::io::Result<()> {
    writeln!(out, "j,lambda,multiplicity,gamma_minus,gamma_plus,beta,k,m")?;
    for line in lines {
        let (k, m) = line.labels[0];
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            line.index,
            line.lambda,
            line.multiplicity,
            fmt_exact_or(line.exact_gamma_minus(), line.gamma_minus()),
            fmt_exact_or(line.exact_gamma_plus(), line.gamma_plus()),
            fmt_exact_or(line.exact_beta(), line.beta()),
            k,
            m
        )?;
    }
    Ok(())
}

impl SpectralLine {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "j": self.index,
            "lambda": self.lambda.to_string(),
            "multiplicity": self.multiplicity,
            "gamma_minus": fmt_exact_or(self.exact_gamma_minus(), self.gamma_minus()),
            "gamma_plus": fmt_exact_or(self.exact_gamma_plus(), self.gamma_plus()),
            "beta": fmt_exact_or(self.exact_beta(), self.beta()),
            "labels": self.labels.iter().map(|(k, m)| vec![*k, *m]).collect::<Vec<_>>(),
        })
    }
}

/// `true` when `x` equals one as an exact rational.
pub fn is_one(x: &BigRational) -> bool {
    x.is_one()
}
