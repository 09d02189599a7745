//! Growth of the averaged `L^2` profile `avint(rho) = sum_i b_i^2 rho^(2 q_i)`.
//!
//! `psi(t) = log avint(e^t)` is convex, dyadic ratios `avint(rho) / avint(rho/2)`
//! increase outward, and an exponent gap rules out two-sided polynomial bounds.

use std::fmt;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::cone_spectrum::SpectralLine;
use crate::error::{Error, Result};
use crate::poly::{parse_rational, rational_from_f64, rational_to_f64};

/// Exponents closer than this are one rung of the ladder.
pub const DEDUP_TOL: f64 = 1e-12;
/// Half-width of the excluded band around each `4^(q_i)`.
pub const GUARD_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileTerm {
    pub exponent: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileData {
    /// `sum weight * rho^(2 exponent)`, exponents strictly increasing.
    Analytic { terms: Vec<ProfileTerm> },
    /// `(rho, value)` pairs, `rho` strictly increasing.
    Sampled { points: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthProfile {
    pub data: ProfileData,
    pub provenance: String,
}

impl GrowthProfile {
    /// Sorts by exponent and merges exponents within [`DEDUP_TOL`].
    pub fn analytic(terms: Vec<(f64, f64)>, provenance: impl Into<String>) -> Result<Self> {
        let mut terms: Vec<ProfileTerm> = terms
            .into_iter()
            .map(|(exponent, weight)| ProfileTerm { exponent, weight })
            .collect();
        for t in &terms {
            if !t.exponent.is_finite() || !t.weight.is_finite() || t.weight < 0.0 {
                return Err(Error::Invalid(format!(
                    "profile term needs a finite exponent and a finite nonnegative weight, got {t:?}"
                )));
            }
        }
        terms.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        let mut merged: Vec<ProfileTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if (t.exponent - last.exponent).abs() <= DEDUP_TOL => {
                    last.weight += t.weight
                }
                _ => merged.push(t),
            }
        }
        Ok(GrowthProfile {
            data: ProfileData::Analytic { terms: merged },
            provenance: provenance.into(),
        })
    }

    pub fn sampled(points: Vec<(f64, f64)>, provenance: impl Into<String>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Invalid(
                "a sampled profile needs at least two points".into(),
            ));
        }
        for w in points.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::Invalid(
                    "sample radii must be strictly increasing".into(),
                ));
            }
        }
        for &(rho, v) in &points {
            if !(rho > 0.0) || !rho.is_finite() || !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Invalid(format!(
                    "sample ({rho}, {v}) needs rho > 0 and a finite nonnegative value"
                )));
            }
        }
        Ok(GrowthProfile {
            data: ProfileData::Sampled { points },
            provenance: provenance.into(),
        })
    }

    pub fn terms(&self) -> Option<&[ProfileTerm]> {
        match &self.data {
            ProfileData::Analytic { terms } => Some(terms),
            ProfileData::Sampled { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            ProfileData::Analytic { terms } => terms.iter().all(|t| t.weight == 0.0),
            ProfileData::Sampled { points } => points.iter().all(|p| p.1 == 0.0),
        }
    }

    /// Exponents carrying positive weight.
    pub fn active_exponents(&self) -> Vec<f64> {
        self.terms()
            .map(|ts| {
                ts.iter()
                    .filter(|t| t.weight > 0.0)
                    .map(|t| t.exponent)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// `psi(t) = log value(e^t)`; `-inf` where the profile vanishes.
    pub fn psi(&self, t: f64) -> f64 {
        match &self.data {
            ProfileData::Analytic { terms } => {
                let logs: Vec<f64> = terms
                    .iter()
                    .filter(|x| x.weight > 0.0)
                    .map(|x| x.weight.ln() + 2.0 * x.exponent * t)
                    .collect();
                log_sum_exp(&logs)
            }
            ProfileData::Sampled { points } => {
                // piecewise linear in (log rho, log value)
                let ts: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
                let ps: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
                let i = ts.partition_point(|&x| x < t).clamp(1, ts.len() - 1);
                let s = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
                ps[i - 1] + s * (ps[i] - ps[i - 1])
            }
        }
    }

    pub fn value(&self, rho: f64) -> f64 {
        match &self.data {
            ProfileData::Analytic { terms } => terms
                .iter()
                .map(|x| x.weight * rho.powf(2.0 * x.exponent))
                .sum(),
            ProfileData::Sampled { .. } => self.psi(rho.ln()).exp(),
        }
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// One merged homogeneity `q + (beta_j - beta_1) / 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderRung {
    pub exponent: f64,
    /// Exact value when every contributing `beta_j` is rational.
    #[serde(serialize_with = "ser_opt_rational")]
    pub exact: Option<BigRational>,
    /// `(j, q)` pairs with this homogeneity.
    pub sources: Vec<(usize, u32)>,
}

fn ser_opt_rational<S: serde::Serializer>(
    v: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Sorted distinct `{q + (beta_j - beta_1)/2 : j, 0 <= q <= max_q}`.
pub fn exponent_ladder(levels: &[SpectralLine], max_q: u32) -> Result<Vec<LadderRung>> {
    let Some(first) = levels.first() else {
        return Ok(Vec::new());
    };
    let beta1 = first.beta().ok_or_else(|| Error::Level {
        level: first.index,
        reason: "complex characteristic exponents".into(),
    })?;
    let beta1_exact = first.exact_beta();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut raw: Vec<LadderRung> = Vec::new();
    for line in levels {
        let Some(beta) = line.beta() else {
            return Err(Error::Level {
                level: line.index,
                reason: "complex characteristic exponents".into(),
            });
        };
        for q in 0..=max_q {
            let exact = match (line.exact_beta(), &beta1_exact) {
                (Some(b), Some(b1)) => Some(BigRational::from_integer(q.into()) + (b - b1) * &half),
                _ => None,
            };
            let exponent = exact
                .as_ref()
                .map(rational_to_f64)
                .unwrap_or(q as f64 + 0.5 * (beta - beta1));
            raw.push(LadderRung {
                exponent,
                exact,
                sources: vec![(line.index, q)],
            });
        }
    }
    raw.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
    let mut out: Vec<LadderRung> = Vec::new();
    for rung in raw {
        if let Some(last) = out.last_mut() {
            let same = match (&last.exact, &rung.exact) {
                (Some(a), Some(b)) => a == b,
                _ => (last.exponent - rung.exponent).abs() <= DEDUP_TOL,
            };
            if same {
                last.sources.extend(rung.sources);
                if rung.exact.is_none() {
                    last.exact = None;
                }
                continue;
            }
        }
        out.push(rung);
    }
    Ok(out)
}

/// Uniform grid of `t = log rho` values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
}

impl TGrid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.t_max - self.t_min) / self.step).floor() as usize;
        (0..=n).map(|i| self.t_min + i as f64 * self.step).collect()
    }
}

/// Smallest second difference of `psi`. Analytic profiles use
/// `psi(t+h) - 2 psi(t) + psi(t-h)` on the grid; sampled profiles use their
/// own nodes, rescaled to the uniform form.
pub fn psi_convexity(profile: &GrowthProfile, grid: Option<TGrid>) -> Result<f64> {
    if profile.is_zero() {
        return Err(Error::ZeroProfile);
    }
    let mut min = f64::INFINITY;
    match (&profile.data, grid) {
        (ProfileData::Analytic { .. }, Some(g)) => {
            if !(g.step > 0.0) || !(g.t_max > g.t_min) {
                return Err(Error::Invalid(
                    "t grid needs t_max > t_min and a positive step".into(),
                ));
            }
            let h = g.step;
            for t in g.points() {
                let d = profile.psi(t + h) - 2.0 * profile.psi(t) + profile.psi(t - h);
                min = min.min(d);
            }
        }
        (ProfileData::Analytic { .. }, None) => {
            return Err(Error::Invalid("analytic profiles need a t grid".into()));
        }
        (ProfileData::Sampled { points }, _) => {
            if points.iter().any(|p| p.1 == 0.0) {
                return Err(Error::ZeroProfile);
            }
            let ts: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
            let ps: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
            for i in 1..ts.len() - 1 {
                let left = (ps[i] - ps[i - 1]) / (ts[i] - ts[i - 1]);
                let right = (ps[i + 1] - ps[i]) / (ts[i + 1] - ts[i]);
                let half = 0.5 * (ts[i + 1] - ts[i - 1]);
                min = min.min((right - left) * half);
            }
        }
    }
    Ok(min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dichotomy {
    pub q_value: f64,
    pub rho: f64,
    /// `value(rho/2) / value(rho/4)`.
    pub ratio_small: f64,
    /// `value(rho) / value(rho/2)`.
    pub ratio_large: f64,
    pub premise_holds: bool,
    pub conclusion_holds: bool,
}

impl Dichotomy {
    /// The implication `premise => conclusion`.
    pub fn consistent(&self) -> bool {
        !self.premise_holds || self.conclusion_holds
    }
}

/// Reject `Q` within the guard band of `4^(q_i)` for an active exponent.
pub fn check_allowed_ratio(profile: &GrowthProfile, q_value: f64) -> Result<()> {
    if !(q_value > 0.0) || !q_value.is_finite() {
        return Err(Error::Invalid(format!("Q must be positive, got {q_value}")));
    }
    for e in profile.active_exponents() {
        let forbidden = 4f64.powf(e);
        if (q_value - forbidden).abs() <= GUARD_BAND * forbidden.max(1.0) {
            return Err(Error::ForbiddenRatio {
                q_value,
                exponent: e,
            });
        }
    }
    Ok(())
}

pub fn doubling_dichotomy(profile: &GrowthProfile, q_value: f64, rho: f64) -> Result<Dichotomy> {
    if profile.is_zero() {
        return Err(Error::ZeroProfile);
    }
    if !(rho > 0.0) {
        return Err(Error::Invalid(format!("rho must be positive, got {rho}")));
    }
    check_allowed_ratio(profile, q_value)?;
    let t = rho.ln();
    let l2 = std::f64::consts::LN_2;
    let (p0, p1, p2) = (
        profile.psi(t),
        profile.psi(t - l2),
        profile.psi(t - 2.0 * l2),
    );
    let ratio_large = (p0 - p1).exp();
    let ratio_small = (p1 - p2).exp();
    Ok(Dichotomy {
        q_value,
        rho,
        ratio_small,
        ratio_large,
        premise_holds: ratio_small >= q_value,
        conclusion_holds: ratio_large > q_value,
    })
}

/// The two dyadic increments `psi(t) - psi(t - log 2)` and
/// `psi(t - log 2) - psi(t - 2 log 2)`.
pub fn dyadic_increments(profile: &GrowthProfile, t: f64) -> (f64, f64) {
    let l2 = std::f64::consts::LN_2;
    let (p0, p1, p2) = (
        profile.psi(t),
        profile.psi(t - l2),
        profile.psi(t - 2.0 * l2),
    );
    (p0 - p1, p1 - p2)
}

/// When the dyadic increments agree within `tol`, the single active exponent
/// `q` with common increment `log 4^q`.
pub fn equality_case(profile: &GrowthProfile, t: f64, tol: f64) -> Option<f64> {
    let (a, b) = dyadic_increments(profile, t);
    if (a - b).abs() > tol {
        return None;
    }
    let q = a / (2.0 * std::f64::consts::LN_2);
    Some(q)
}

pub fn write_dichotomy_csv<W: Write>(rows: &[Dichotomy], mut out: W) -> std::io::Result<()> {
    writeln!(out, "Q,rho,ratio_small,ratio_large,premise,conclusion")?;
    for r in rows {
        writeln!(
            out,
            "{:?},{:?},{:?},{:?},{},{}",
            r.q_value, r.rho, r.ratio_small, r.ratio_large, r.premise_holds, r.conclusion_holds
        )?;
    }
    Ok(())
}

/// Exponent `alpha` of the two-sided bound, kept exact when given as a decimal or fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct Alpha(BigRational);

impl Alpha {
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_rational(text)?)
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::AlphaOutOfRange(x.to_string()));
        }
        Self::new(rational_from_f64(x))
    }

    pub fn new(a: BigRational) -> Result<Self> {
        if !a.is_positive() || a >= BigRational::one() {
            return Err(Error::AlphaOutOfRange(a.to_string()));
        }
        Ok(Alpha(a))
    }

    pub fn exact(&self) -> &BigRational {
        &self.0
    }

    pub fn value(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSample {
    pub r: f64,
    /// `R^(-alpha)`.
    pub lower: f64,
    /// `R^(-2+alpha)`.
    pub upper: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiouvilleReport {
    pub alpha: String,
    /// `2 - 2 alpha` as an exact fraction.
    pub margin_exact: String,
    pub margin: f64,
    /// `R^(-alpha) <= R^(-2+alpha)` fails for every `R > 1`.
    pub infeasible_beyond_one: bool,
    pub samples: Vec<GapSample>,
}

impl LiouvilleReport {
    pub fn feasible_radii(&self) -> Vec<f64> {
        self.samples
            .iter()
            .filter(|s| s.feasible)
            .map(|s| s.r)
            .collect()
    }

    pub fn summary(&self) -> String {
        if self.infeasible_beyond_one {
            format!("infeasible for R>1, margin {:?}", self.margin)
        } else {
            format!("feasible for some R>1, margin {:?}", self.margin)
        }
    }
}

/// Where `R^(-alpha) <= R^(-2+alpha)`, i.e. `R^(2-2alpha) <= 1`, can hold.
pub fn liouville_gap(alpha: &Alpha, radii: &[f64]) -> Result<LiouvilleReport> {
    let a = alpha.value();
    let margin_exact =
        BigRational::from_integer(2.into()) - alpha.exact() * BigRational::from_integer(2.into());
    let mut samples = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Invalid(format!("radius must be positive, got {r}")));
        }
        let lower = r.powf(-a);
        let upper = r.powf(-2.0 + a);
        // R^(2-2alpha) <= 1 decided on the exponent, free of rounding
        let feasible = r <= 1.0;
        samples.push(GapSample {
            r,
            lower,
            upper,
            feasible,
        });
    }
    Ok(LiouvilleReport {
        alpha: alpha.to_string(),
        margin: rational_to_f64(&margin_exact),
        infeasible_beyond_one: margin_exact.is_positive(),
        margin_exact: margin_exact.to_string(),
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub exponents: Vec<f64>,
    /// Fitted `b_i^2 >= 0`.
    pub weights: Vec<f64>,
    /// `|| (model - data) / data ||_2 / sqrt(samples)`.
    pub residual: f64,
}

impl ExponentFit {
    pub fn profile(&self, provenance: impl Into<String>) -> Result<GrowthProfile> {
        GrowthProfile::analytic(
            self.exponents
                .iter()
                .copied()
                .zip(self.weights.iter().copied())
                .collect(),
            provenance,
        )
    }
}

/// Largest condition number of the column-scaled basis accepted by the fit.
pub const FIT_MAX_CONDITION: f64 = 1e12;

/// Nonnegative least squares of sampled values in the basis `rho^(2 q_i)`,
/// rows weighted by `1 / value`.
pub fn fit_exponents(samples: &GrowthProfile, ladder: &[f64]) -> Result<ExponentFit> {
    let ProfileData::Sampled { points } = &samples.data else {
        return Err(Error::Invalid(
            "fit_exponents needs a sampled profile".into(),
        ));
    };
    if ladder.is_empty() {
        return Err(Error::Invalid("empty exponent ladder".into()));
    }
    if points.len() < 2 * ladder.len() {
        return Err(Error::IllConditioned(format!(
            "{} samples for {} exponents; need at least twice as many",
            points.len(),
            ladder.len()
        )));
    }
    let span = points.last().unwrap().0 / points[0].0;
    if span < 2.0 {
        return Err(Error::IllConditioned(format!(
            "radii span a factor {span:.3}; need at least one doubling"
        )));
    }
    if points.iter().any(|p| p.1 == 0.0) && !points.iter().all(|p| p.1 == 0.0) {
        return Err(Error::Invalid(
            "sampled values must be all positive or all zero".into(),
        ));
    }
    if points.iter().all(|p| p.1 == 0.0) {
        return Ok(ExponentFit {
            exponents: ladder.to_vec(),
            weights: vec![0.0; ladder.len()],
            residual: 0.0,
        });
    }
    let (m, n) = (points.len(), ladder.len());
    let mut a = DMatrix::<f64>::zeros(m, n);
    let mut b = DVector::<f64>::zeros(m);
    for (i, &(rho, v)) in points.iter().enumerate() {
        for (j, &q) in ladder.iter().enumerate() {
            a[(i, j)] = rho.powf(2.0 * q) / v;
        }
        b[i] = 1.0;
    }
    let scale: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    for j in 0..n {
        if !(scale[j] > 0.0) || !scale[j].is_finite() {
            return Err(Error::IllConditioned(format!(
                "basis column {j} is degenerate"
            )));
        }
        a.column_mut(j).scale_mut(1.0 / scale[j]);
    }
    let sv = a.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 0.0) || smax / smin > FIT_MAX_CONDITION {
        return Err(Error::IllConditioned(format!(
            "scaled basis condition number {:.3e}",
            smax / smin
        )));
    }
    let x = nnls(&a, &b)?;
    let weights: Vec<f64> = x.iter().zip(&scale).map(|(xi, s)| xi / s).collect();
    let r = &a * &x - &b;
    Ok(ExponentFit {
        exponents: ladder.to_vec(),
        weights,
        residual: r.norm() / (m as f64).sqrt(),
    })
}

/// Lawson-Hanson active-set nonnegative least squares.
fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let tol = 10.0 * f64::EPSILON * a.norm() * (n.max(a.nrows()) as f64);
    let solve_passive = |passive: &[bool]| -> Result<DVector<f64>> {
        let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let sub = DMatrix::from_fn(a.nrows(), idx.len(), |i, k| a[(i, idx[k])]);
        let sol = sub
            .svd(true, true)
            .solve(b, 1e-14)
            .map_err(|e| Error::IllConditioned(e.to_string()))?;
        let mut z = DVector::<f64>::zeros(n);
        for (k, &j) in idx.iter().enumerate() {
            z[j] = sol[k];
        }
        Ok(z)
    };
    for _outer in 0..3 * n + 10 {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(t) = candidate else {
            return Ok(x);
        };
        passive[t] = true;
        loop {
            let z = solve_passive(&passive)?;
            if (0..n).filter(|&j| passive[j]).all(|j| z[j] > 0.0) {
                x = z;
                break;
            }
            let mut alpha = f64::INFINITY;
            for j in 0..n {
                if passive[j] && z[j] <= 0.0 {
                    alpha = alpha.min(x[j] / (x[j] - z[j]));
                }
            }
            for j in 0..n {
                x[j] += alpha * (z[j] - x[j]);
                if passive[j] && x[j].abs() <= tol {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
        }
    }
    Ok(x)
}

/// Zero-weighted exponents are allowed; weights are validated as nonnegative.
pub fn ladder_profile(
    exponents: &[f64],
    weights: &[f64],
    provenance: impl Into<String>,
) -> Result<GrowthProfile> {
    if exponents.len() != weights.len() {
        return Err(Error::Invalid(
            "exponent and weight lists differ in length".into(),
        ));
    }
    GrowthProfile::analytic(
        exponents
            .iter()
            .copied()
            .zip(weights.iter().copied())
            .collect(),
        provenance,
    )
}
