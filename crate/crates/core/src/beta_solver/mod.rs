//! Weighted Dirichlet problem `Delta_beta u = 0` on the half-ball `B_1^+`.
//!
//! The energy `int (u_r^2 + |u_y|^2) r^(1+beta) dr dy` is minimized over
//! cell-centred finite volumes in spherical coordinates `(rho, t)` with
//! `r = rho cos t`:
//!
//! * `ell = 1`: `t in (-pi/2, pi/2)` and `y = rho sin t`; angular weight `cos^(1+beta) t`.
//! * `ell >= 2`: y-radial data only, `t in (0, pi/2)` and `|y| = rho sin t`;
//!   angular weight `|S^(ell-1)| cos^(1+beta) t sin^(ell-1) t`.
//!
//! In both cases the radial weight is `rho^(ell+1+beta)`, the outer sphere is a
//! grid line and no cell face lies on a degenerate axis.

mod cg;
mod expansion;
mod field;

use std::f64::consts::FRAC_PI_2;

pub use cg::CgStats;
pub use expansion::{
    expand_on_sphere, mode_basis, reconstruct, sup_gap, Mode, ModeExpansion, ModeSum,
    Reconstruction,
};
pub use field::{AxisRegularity, FieldHardy, HalfBallField};

use crate::beta_poly::BetaPolynomial;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, sphere_area};

/// Relative residual demanded of the linear solve.
pub const SOLVER_REL_TOL: f64 = 1e-10;
/// Smallest accepted number of cells per direction.
pub const MIN_CELLS: usize = 8;

/// A function on the closed half-ball, evaluated at `(r, y)` with `r >= 0`.
pub trait HalfBallFunction {
    fn ell(&self) -> usize;
    /// Weight exponent of the measure the function is expanded against.
    fn beta(&self) -> f64;
    fn value(&self, r: f64, y: &[f64]) -> f64;
}

/// A closure viewed as a function on the half-ball.
pub struct FnField<F> {
    ell: usize,
    beta: f64,
    f: F,
}

impl<F: Fn(f64, &[f64]) -> f64> FnField<F> {
    pub fn new(ell: usize, beta: f64, f: F) -> Self {
        FnField { ell, beta, f }
    }
}

impl<F: Fn(f64, &[f64]) -> f64> HalfBallFunction for FnField<F> {
    fn ell(&self) -> usize {
        self.ell
    }

    fn beta(&self) -> f64 {
        self.beta
    }

    fn value(&self, r: f64, y: &[f64]) -> f64 {
        (self.f)(r, y)
    }
}

impl HalfBallFunction for BetaPolynomial {
    fn ell(&self) -> usize {
        BetaPolynomial::ell(self)
    }

    fn beta(&self) -> f64 {
        self.beta_f64()
    }

    fn value(&self, r: f64, y: &[f64]) -> f64 {
        self.eval(r, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub n_rho: usize,
    pub n_angle: usize,
}

impl GridSpec {
    pub fn new(n_rho: usize, n_angle: usize) -> Result<Self> {
        let g = GridSpec { n_rho, n_angle };
        g.validate()?;
        Ok(g)
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rho < MIN_CELLS || self.n_angle < MIN_CELLS {
            return Err(Error::DegenerateGrid(format!(
                "{}x{} cells; at least {MIN_CELLS} per direction required",
                self.n_rho, self.n_angle
            )));
        }
        Ok(())
    }

    pub fn cells(&self) -> usize {
        self.n_rho * self.n_angle
    }
}

/// Angular interval of the coordinate `t` for a given `ell`.
pub fn angle_range(ell: usize) -> (f64, f64) {
    if ell == 1 {
        (-FRAC_PI_2, FRAC_PI_2)
    } else {
        (0.0, FRAC_PI_2)
    }
}

/// Point `[omega_1, y_1, .., y_ell]` on the unit half-sphere at angle `t`;
/// for `ell >= 2` the `y` direction is the first axis.
pub fn sphere_point(ell: usize, t: f64) -> Vec<f64> {
    let mut w = vec![0.0; ell + 1];
    w[0] = t.cos().max(0.0);
    w[1] = t.sin();
    w
}

/// Coordinate geometry of the `(rho, t)` grid.
#[derive(Debug, Clone)]
pub(crate) struct Geometry {
    pub ell: usize,
    pub beta: f64,
    pub grid: GridSpec,
    /// Radial weight exponent `ell + 1 + beta`.
    pub e: f64,
    pub t_lo: f64,
    pub d_rho: f64,
    pub d_t: f64,
    shell: f64,
}

impl Geometry {
    pub fn new(ell: usize, beta: f64, grid: GridSpec) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Invalid("ell must be positive".into()));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::NonPositiveBeta(beta));
        }
        grid.validate()?;
        let (t_lo, t_hi) = angle_range(ell);
        Ok(Geometry {
            ell,
            beta,
            grid,
            e: ell as f64 + 1.0 + beta,
            t_lo,
            d_rho: 1.0 / grid.n_rho as f64,
            d_t: (t_hi - t_lo) / grid.n_angle as f64,
            shell: if ell == 1 { 1.0 } else { sphere_area(ell - 1) },
        })
    }

    pub fn rho(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.d_rho
    }

    /// Cell-centre angle; also defined for ghost indices outside the grid.
    pub fn t(&self, k: isize) -> f64 {
        self.t_lo + (k as f64 + 0.5) * self.d_t
    }

    pub fn weight(&self, t: f64) -> f64 {
        let c = t.cos().max(0.0).powf(1.0 + self.beta);
        if self.ell == 1 {
            c
        } else {
            self.shell * c * t.sin().max(0.0).powi(self.ell as i32 - 1)
        }
    }

    /// `int w(t) dt` over angular cell `k`.
    pub fn weight_integral(&self, k: usize) -> f64 {
        let rule = gauss_legendre(8);
        let (a, b) = (
            self.t_lo + k as f64 * self.d_t,
            self.t_lo + (k + 1) as f64 * self.d_t,
        );
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        half * rule.integrate(|x| self.weight(mid + half * x))
    }

    /// `int rho^p d rho` over radial cell `i`.
    pub fn rho_power_integral(&self, i: usize, p: f64) -> f64 {
        let (a, b) = (i as f64 * self.d_rho, (i + 1) as f64 * self.d_rho);
        (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0)
    }

    pub fn cell_volume(&self, i: usize, k: usize) -> f64 {
        self.rho_power_integral(i, self.e) * self.weight_integral(k)
    }

    pub fn stencil(&self) -> cg::Stencil {
        let (nr, na) = (self.grid.n_rho, self.grid.n_angle);
        let w_cell: Vec<f64> = (0..na).map(|k| self.weight_integral(k)).collect();
        let mut radial = Vec::with_capacity((nr - 1) * na);
        for i in 0..nr - 1 {
            let rf = (i + 1) as f64 * self.d_rho;
            let factor = rf.powf(self.e) / self.d_rho;
            radial.extend(w_cell.iter().map(|w| factor * w));
        }
        let outer = w_cell.iter().map(|w| w / (0.5 * self.d_rho)).collect();
        let mut angular = Vec::with_capacity(nr * (na - 1));
        for i in 0..nr {
            // d_t u vanishes linearly at the origin, so rho^(e-2) is averaged against rho / rho_i
            let ri = self.rho_power_integral(i, self.e - 1.0) / self.rho(i);
            for k in 0..na - 1 {
                let tf = self.t_lo + (k + 1) as f64 * self.d_t;
                angular.push(ri * self.weight(tf) / self.d_t);
            }
        }
        cg::Stencil {
            n_rho: nr,
            n_angle: na,
            radial,
            outer,
            angular,
        }
    }
}

/// Boundary data on the half-sphere given as samples along the angle `t`;
/// piecewise cubic between samples, mirrored across the ends of the interval.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    ell: usize,
    angles: Vec<f64>,
    values: Vec<f64>,
}

impl BoundaryTrace {
    pub const DEFAULT_SAMPLES: usize = 96;

    pub fn new(ell: usize, angles: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Invalid("ell must be positive".into()));
        }
        if angles.len() != values.len() || angles.len() < 4 {
            return Err(Error::Invalid(
                "a boundary trace needs at least 4 (angle, value) samples".into(),
            ));
        }
        let (lo, hi) = angle_range(ell);
        if angles.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Invalid(
                "trace angles must be strictly increasing".into(),
            ));
        }
        if angles[0] <= lo || *angles.last().unwrap() >= hi {
            return Err(Error::Invalid(format!(
                "trace angles must lie in the open interval ({lo}, {hi})"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("trace values must be finite".into()));
        }
        Ok(BoundaryTrace {
            ell,
            angles,
            values,
        })
    }

    /// Sample `f(omega)` at `n` Gauss-Legendre nodes of the angle interval.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(ell: usize, n: usize, f: F) -> Result<Self> {
        let (lo, hi) = angle_range(ell);
        let rule = gauss_legendre(n.max(4));
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let angles: Vec<f64> = rule.nodes.iter().map(|x| mid + half * x).collect();
        let values = angles.iter().map(|&t| f(&sphere_point(ell, t))).collect();
        Self::new(ell, angles, values)
    }

    pub fn from_function(f: &dyn HalfBallFunction, n: usize) -> Result<Self> {
        let ell = f.ell();
        Self::from_fn(ell, n, |w| f.value(w[0], &w[1..]))
    }

    pub fn constant(ell: usize, c: f64) -> Self {
        Self::from_fn(ell, 8, |_| c).expect("valid constant trace")
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (lo, hi) = angle_range(self.ell);
        let n = self.angles.len() as isize;
        // extended node j: mirror images beyond either end
        let node = |j: isize| -> (f64, f64) {
            if j < 0 {
                let m = (-1 - j) as usize;
                (2.0 * lo - self.angles[m], self.values[m])
            } else if j >= n {
                let m = (2 * n - 1 - j) as usize;
                (2.0 * hi - self.angles[m], self.values[m])
            } else {
                (self.angles[j as usize], self.values[j as usize])
            }
        };
        let pos = self.angles.partition_point(|&a| a < t) as isize;
        let start = (pos - 2).clamp(-3, n - 1);
        let nodes: Vec<(f64, f64)> = (start..start + 4).map(node).collect();
        lagrange(&nodes, t)
    }

    /// Text form: one `angle,value` row per sample after a header.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# ell={}\nangle,value\n", self.ell);
        for (a, v) in self.angles.iter().zip(&self.values) {
            s.push_str(&format!("{a:.16e},{v:.16e}\n"));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut ell = None;
        let mut angles = Vec::new();
        let mut values = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix('#') {
                for kv in rest.split_whitespace() {
                    if let Some(v) = kv.strip_prefix("ell=") {
                        ell = Some(
                            v.parse()
                                .map_err(|_| Error::Parse(format!("bad ell {v:?}")))?,
                        );
                    }
                }
                continue;
            }
            if line.starts_with("angle") {
                continue;
            }
            let mut it = line.split(',');
            let (Some(a), Some(v), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse(format!(
                    "expected 'angle,value', got {line:?}"
                )));
            };
            angles.push(
                a.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad angle {a:?}")))?,
            );
            values.push(
                v.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad value {v:?}")))?,
            );
        }
        let ell = ell.ok_or_else(|| Error::Parse("missing '# ell=' header".into()))?;
        Self::new(ell, angles, values)
    }
}

/// Lagrange interpolation through `(x, y)` nodes, exact on constant data.
pub(crate) fn lagrange(nodes: &[(f64, f64)], x: f64) -> f64 {
    let base = nodes[0].1;
    let mut s = 0.0;
    for (i, &(xi, yi)) in nodes.iter().enumerate().skip(1) {
        let mut l = 1.0;
        for (j, &(xj, _)) in nodes.iter().enumerate() {
            if i != j {
                l *= (x - xj) / (xi - xj);
            }
        }
        s += l * (yi - base);
    }
    base + s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub rel_tol: f64,
    /// Iteration cap; `None` means `50 sqrt(unknowns)`.
    pub max_iterations: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rel_tol: SOLVER_REL_TOL,
            max_iterations: None,
        }
    }
}

/// Minimize the weighted energy among grid functions with the given trace.
pub fn solve_dirichlet(
    beta: f64,
    ell: usize,
    trace: &BoundaryTrace,
    grid: GridSpec,
) -> Result<HalfBallField> {
    solve_dirichlet_with(beta, ell, trace, grid, SolveOptions::default())
}

pub fn solve_dirichlet_with(
    beta: f64,
    ell: usize,
    trace: &BoundaryTrace,
    grid: GridSpec,
    options: SolveOptions,
) -> Result<HalfBallField> {
    if trace.ell != ell {
        return Err(Error::VariableCount {
            expected: ell,
            found: trace.ell,
        });
    }
    let geo = Geometry::new(ell, beta, grid)?;
    let (nr, na) = (grid.n_rho, grid.n_angle);
    let boundary: Vec<f64> = (0..na).map(|k| trace.eval(geo.t(k as isize))).collect();
    let stencil = geo.stencil();
    let mut b = vec![0.0; nr * na];
    for k in 0..na {
        b[(nr - 1) * na + k] = stencil.outer[k] * boundary[k];
    }
    // rays carry the trace inward
    let mut u: Vec<f64> = (0..nr).flat_map(|_| boundary.iter().copied()).collect();
    let cap = options
        .max_iterations
        .unwrap_or_else(|| (50.0 * (grid.cells() as f64).sqrt()).ceil() as usize);
    let stats = cg::solve(&stencil, &b, &mut u, options.rel_tol, cap)?;
    Ok(HalfBallField::from_parts(geo, u, boundary, Some(stats)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta_poly::h_q;
    use num_rational::BigRational;

    #[test]
    fn grid_rejects_coarse_resolution() {
        assert!(matches!(
            GridSpec::new(4, 16),
            Err(Error::DegenerateGrid(_))
        ));
        assert!(GridSpec::square(8).is_ok());
    }

    #[test]
    fn trace_interpolation_is_cubic_exact() {
        // even in r, so the mirror images continue it smoothly
        let tr = BoundaryTrace::from_fn(1, 48, |w| w[1].powi(3) - w[0] * w[0]).unwrap();
        for t in [-1.5f64, -0.3, 0.0, 0.77, 1.55] {
            let want = t.sin().powi(3) - t.cos().powi(2);
            assert!(
                (tr.eval(t) - want).abs() < 1e-4,
                "t={t} {}",
                tr.eval(t) - want
            );
        }
        let back = BoundaryTrace::from_csv(&tr.to_csv()).unwrap();
        assert_eq!(back, tr);
    }

    #[test]
    fn constant_trace_gives_constant_field() {
        let f = solve_dirichlet(
            1.0,
            1,
            &BoundaryTrace::constant(1, 1.0),
            GridSpec::square(16).unwrap(),
        )
        .unwrap();
        assert!(f.values().iter().all(|&v| v == 1.0));
        let f2 = solve_dirichlet(
            0.5,
            3,
            &BoundaryTrace::constant(3, 1.0),
            GridSpec::square(16).unwrap(),
        )
        .unwrap();
        assert!(f2.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn h2_solution_is_close() {
        let h = h_q(&BigRational::from_integer(1.into()), 2);
        let tr = BoundaryTrace::from_function(&h, 64).unwrap();
        let f = solve_dirichlet(1.0, 1, &tr, GridSpec::square(32).unwrap()).unwrap();
        assert!(f.max_error(&h) < 5e-3, "{}", f.max_error(&h));
        assert!(f.weak_form_residual() <= 1e-10);
    }

    #[test]
    fn trace_ell_mismatch() {
        let tr = BoundaryTrace::constant(2, 1.0);
        assert!(solve_dirichlet(1.0, 1, &tr, GridSpec::square(8).unwrap()).is_err());
    }
}
