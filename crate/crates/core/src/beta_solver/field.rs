use super::cg::{CgStats, Stencil};
use super::{lagrange, Geometry, GridSpec, HalfBallFunction};
use crate::error::{Error, Result};

/// Cell-centred grid function on the half-ball with its boundary values.
#[derive(Debug, Clone)]
pub struct HalfBallField {
    geo: Geometry,
    values: Vec<f64>,
    boundary: Vec<f64>,
    stats: Option<CgStats>,
}

/// One-sided behaviour of the field at the axis `r = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRegularity {
    /// Largest difference quotient in `r` between the two cell layers nearest the axis.
    pub max_radial_slope: f64,
    /// Largest `|d_r u(0+, y)|` from a three-cell extrapolation; zero for even extensions.
    pub even_extension_defect: f64,
}

/// `int r^(-2) u^2 dmu_+` against `int u_r^2 dmu_+` on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldHardy {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `4 / beta^2`.
    pub constant: f64,
}

impl HalfBallField {
    pub(crate) fn from_parts(
        geo: Geometry,
        values: Vec<f64>,
        boundary: Vec<f64>,
        stats: Option<CgStats>,
    ) -> Self {
        HalfBallField {
            geo,
            values,
            boundary,
            stats,
        }
    }

    /// Sample `f` at the cell centres and on the outer sphere.
    pub fn from_function(beta: f64, grid: GridSpec, f: &dyn HalfBallFunction) -> Result<Self> {
        let geo = Geometry::new(f.ell(), beta, grid)?;
        let (nr, na) = (grid.n_rho, grid.n_angle);
        let mut values = Vec::with_capacity(nr * na);
        for i in 0..nr {
            for k in 0..na {
                let x = geo_point(&geo, geo.rho(i), geo.t(k as isize));
                values.push(f.value(x[0], &x[1..]));
            }
        }
        let boundary = (0..na)
            .map(|k| {
                let x = geo_point(&geo, 1.0, geo.t(k as isize));
                f.value(x[0], &x[1..])
            })
            .collect();
        Ok(Self::from_parts(geo, values, boundary, None))
    }

    /// Same grid and boundary values with new interior values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::Invalid(format!(
                "expected {} values, got {}",
                self.values.len(),
                values.len()
            )));
        }
        Ok(Self::from_parts(
            self.geo.clone(),
            values,
            self.boundary.clone(),
            None,
        ))
    }

    pub fn beta(&self) -> f64 {
        self.geo.beta
    }

    pub fn grid(&self) -> GridSpec {
        self.geo.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Trace values at the angular cell centres on `rho = 1`.
    pub fn boundary(&self) -> &[f64] {
        &self.boundary
    }

    pub fn solver_stats(&self) -> Option<CgStats> {
        self.stats
    }

    /// Radial and angular spacing.
    pub fn spacing(&self) -> (f64, f64) {
        (self.geo.d_rho, self.geo.d_t)
    }

    /// `(rho, t)` of cell `(i, k)`.
    pub fn cell_center(&self, i: usize, k: usize) -> (f64, f64) {
        (self.geo.rho(i), self.geo.t(k as isize))
    }

    /// `[r, y_1, ..]` of cell `(i, k)`.
    pub fn cell_point(&self, i: usize, k: usize) -> Vec<f64> {
        geo_point(&self.geo, self.geo.rho(i), self.geo.t(k as isize))
    }

    pub fn cell_value(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.geo.grid.n_angle + k]
    }

    /// Largest deviation from `f` over the cell centres.
    pub fn max_error(&self, f: &dyn HalfBallFunction) -> f64 {
        let (nr, na) = (self.geo.grid.n_rho, self.geo.grid.n_angle);
        let mut m = 0.0f64;
        for i in 0..nr {
            for k in 0..na {
                let x = self.cell_point(i, k);
                m = m.max((self.cell_value(i, k) - f.value(x[0], &x[1..])).abs());
            }
        }
        m
    }

    /// Discrete weighted Dirichlet energy including the boundary faces.
    pub fn energy(&self) -> f64 {
        let s = self.geo.stencil();
        let (nr, na) = (s.n_rho, s.n_angle);
        let u = &self.values;
        let mut e = 0.0;
        for i in 0..nr - 1 {
            for k in 0..na {
                let d = u[(i + 1) * na + k] - u[i * na + k];
                e += s.radial[i * na + k] * d * d;
            }
        }
        for k in 0..na {
            let d = self.boundary[k] - u[(nr - 1) * na + k];
            e += s.outer[k] * d * d;
        }
        for i in 0..nr {
            for k in 0..na - 1 {
                let d = u[i * na + k + 1] - u[i * na + k];
                e += s.angular[i * (na - 1) + k] * d * d;
            }
        }
        e
    }

    /// `int u^2 r^(1+beta) dr dy` by the cell midpoint rule.
    pub fn weighted_l2(&self) -> f64 {
        let (nr, na) = (self.geo.grid.n_rho, self.geo.grid.n_angle);
        let mut s = 0.0;
        for i in 0..nr {
            for k in 0..na {
                s += self.geo.cell_volume(i, k) * self.cell_value(i, k).powi(2);
            }
        }
        s
    }

    fn stencil_and_rhs(&self) -> (Stencil, Vec<f64>) {
        let s = self.geo.stencil();
        let (nr, na) = (s.n_rho, s.n_angle);
        let mut b = vec![0.0; nr * na];
        for k in 0..na {
            b[(nr - 1) * na + k] = s.outer[k] * self.boundary[k];
        }
        (s, b)
    }

    /// `max_i |(A u - b)_i| / max_i (sum_j |A_ij u_j| + |b_i|)` over all cell hats.
    pub fn weak_form_residual(&self) -> f64 {
        let (s, b) = self.stencil_and_rhs();
        let n = s.len();
        let mut au = vec![0.0; n];
        let mut scale = vec![0.0; n];
        s.apply(&self.values, &mut au);
        s.abs_apply(&self.values, &mut scale);
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in 0..n {
            num = num.max((au[i] - b[i]).abs());
            den = den.max(scale[i] + b[i].abs());
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    fn row_value(&self, row: usize, k: usize) -> f64 {
        let na = self.geo.grid.n_angle;
        if row == self.geo.grid.n_rho {
            self.boundary[k]
        } else {
            self.values[row * na + k]
        }
    }

    /// Even reflection of angular index `k` across the interval ends.
    fn reflect(&self, k: isize) -> usize {
        let na = self.geo.grid.n_angle as isize;
        let m = if k < 0 {
            -1 - k
        } else if k >= na {
            2 * na - 1 - k
        } else {
            k
        };
        m.clamp(0, na - 1) as usize
    }

    fn interp_angle(&self, row: usize, t: f64) -> f64 {
        let g = &self.geo;
        let k0 = ((t - g.t_lo) / g.d_t - 0.5).floor() as isize;
        let nodes: Vec<(f64, f64)> = (k0 - 1..=k0 + 2)
            .map(|k| (g.t(k), self.row_value(row, self.reflect(k))))
            .collect();
        lagrange(&nodes, t)
    }

    /// Tensor cubic interpolation in `(rho, t)`; the outer sphere is the last radial node.
    pub fn eval_polar(&self, rho: f64, t: f64) -> f64 {
        let nr = self.geo.grid.n_rho;
        let radial = |j: usize| if j == nr { 1.0 } else { self.geo.rho(j) };
        let pos = ((rho / self.geo.d_rho) - 0.5).floor().max(-1.0) as isize + 1;
        let start = (pos - 2).clamp(0, nr as isize + 1 - 4) as usize;
        let nodes: Vec<(f64, f64)> = (start..start + 4)
            .map(|j| (radial(j), self.interp_angle(j, t)))
            .collect();
        lagrange(&nodes, rho.min(1.0))
    }

    /// Axis behaviour from the cells next to `r = 0`.
    pub fn axis_regularity(&self) -> AxisRegularity {
        let g = &self.geo;
        let (nr, na) = (g.grid.n_rho, g.grid.n_angle);
        // (nearest, next, next-next) angular indices at each axis end
        let mut ends = vec![(na - 1, na - 2, na - 3)];
        if g.ell == 1 {
            ends.push((0, 1, 2));
        }
        // d/d delta at delta = 0 through nodes h/2, 3h/2, 5h/2
        let h = g.d_t;
        let xs = [0.5 * h, 1.5 * h, 2.5 * h];
        let dw: Vec<f64> = (0..3)
            .map(|i| {
                let others: Vec<f64> = (0..3).filter(|&j| j != i).map(|j| xs[j]).collect();
                let den = (xs[i] - others[0]) * (xs[i] - others[1]);
                (-(others[0]) - others[1]) / den
            })
            .collect();
        let mut slope = 0.0f64;
        let mut defect = 0.0f64;
        for i in 0..nr {
            let rho = g.rho(i);
            for &(a, b, c) in &ends {
                let (ua, ub, uc) = (
                    self.cell_value(i, a),
                    self.cell_value(i, b),
                    self.cell_value(i, c),
                );
                let ra = rho * g.t(a as isize).cos();
                let rb = rho * g.t(b as isize).cos();
                slope = slope.max((ub - ua).abs() / (rb - ra).abs());
                let d = dw[1] * (ub - ua) + dw[2] * (uc - ua);
                defect = defect.max(d.abs() / rho);
            }
        }
        AxisRegularity {
            max_radial_slope: slope,
            even_extension_defect: defect,
        }
    }

    /// Weighted Hardy quotient with `u_r = cos t u_rho - sin t u_t / rho` from
    /// centred differences.
    pub fn hardy(&self) -> FieldHardy {
        let g = &self.geo;
        let (nr, na) = (g.grid.n_rho, g.grid.n_angle);
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for i in 0..nr {
            let rho = g.rho(i);
            for k in 0..na {
                let t = g.t(k as isize);
                let u = self.cell_value(i, k);
                let du_rho = if i == 0 {
                    (self.row_value(1, k) - u) / g.d_rho
                } else {
                    let (x0, x1, x2) = (
                        g.rho(i - 1),
                        rho,
                        if i + 1 == nr { 1.0 } else { g.rho(i + 1) },
                    );
                    let (u0, u2) = (self.row_value(i - 1, k), self.row_value(i + 1, k));
                    // three-point derivative on a possibly uneven stencil
                    let (h0, h1) = (x1 - x0, x2 - x1);
                    (-h1 / (h0 * (h0 + h1))) * u0
                        + ((h1 - h0) / (h0 * h1)) * u
                        + (h0 / (h1 * (h0 + h1))) * u2
                };
                let up = self.row_value(i, self.reflect(k as isize + 1));
                let um = self.row_value(i, self.reflect(k as isize - 1));
                let du_t = (up - um) / (2.0 * g.d_t);
                let du_r = t.cos() * du_rho - t.sin() * du_t / rho;
                let r = rho * t.cos();
                let vol = g.cell_volume(i, k);
                lhs += vol * u * u / (r * r);
                rhs += vol * du_r * du_r;
            }
        }
        FieldHardy {
            lhs,
            rhs,
            ratio: if rhs == 0.0 { 0.0 } else { lhs / rhs },
            constant: 4.0 / (g.beta * g.beta),
        }
    }

    /// Text export with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let g = &self.geo;
        let (nr, na) = (g.grid.n_rho, g.grid.n_angle);
        let coords = if g.ell == 1 { "polar" } else { "polar-radial" };
        let mut s = format!(
            "# ell={} beta={:?} n_rho={nr} n_angle={na} coords={coords}\nrho,angle,value\n",
            g.ell, g.beta
        );
        for i in 0..=nr {
            let rho = if i == nr { 1.0 } else { g.rho(i) };
            for k in 0..na {
                s.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e}\n",
                    rho,
                    g.t(k as isize),
                    self.row_value(i, k)
                ));
            }
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix('#'))
            .ok_or_else(|| Error::Parse("missing '#' header line".into()))?;
        let mut ell = None;
        let mut beta = None;
        let mut n_rho = None;
        let mut n_angle = None;
        for kv in header.split_whitespace() {
            let Some((k, v)) = kv.split_once('=') else {
                continue;
            };
            let bad = || Error::Parse(format!("bad header entry {kv:?}"));
            match k {
                "ell" => ell = Some(v.parse::<usize>().map_err(|_| bad())?),
                "beta" => beta = Some(v.parse::<f64>().map_err(|_| bad())?),
                "n_rho" => n_rho = Some(v.parse::<usize>().map_err(|_| bad())?),
                "n_angle" => n_angle = Some(v.parse::<usize>().map_err(|_| bad())?),
                _ => {}
            }
        }
        let missing = |what: &str| Error::Parse(format!("header lacks {what}"));
        let ell = ell.ok_or_else(|| missing("ell"))?;
        let beta = beta.ok_or_else(|| missing("beta"))?;
        let grid = GridSpec::new(
            n_rho.ok_or_else(|| missing("n_rho"))?,
            n_angle.ok_or_else(|| missing("n_angle"))?,
        )?;
        let geo = Geometry::new(ell, beta, grid)?;
        let (nr, na) = (grid.n_rho, grid.n_angle);
        let mut all = Vec::with_capacity((nr + 1) * na);
        for line in lines {
            if line.starts_with("rho") {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("expected 3 columns, got {line:?}")));
            }
            let v: f64 = cols[2]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad value {:?}", cols[2])))?;
            all.push(v);
        }
        if all.len() != (nr + 1) * na {
            return Err(Error::Parse(format!(
                "expected {} rows, found {}",
                (nr + 1) * na,
                all.len()
            )));
        }
        let boundary = all.split_off(nr * na);
        Ok(Self::from_parts(geo, all, boundary, None))
    }
}

impl PartialEq for HalfBallField {
    fn eq(&self, other: &Self) -> bool {
        self.geo.ell == other.geo.ell
            && self.geo.beta.to_bits() == other.geo.beta.to_bits()
            && self.geo.grid == other.geo.grid
            && self.values == other.values
            && self.boundary == other.boundary
    }
}

fn geo_point(geo: &Geometry, rho: f64, t: f64) -> Vec<f64> {
    let mut x = vec![0.0; geo.ell + 1];
    x[0] = rho * t.cos().max(0.0);
    x[1] = rho * t.sin();
    x
}

impl HalfBallFunction for HalfBallField {
    fn ell(&self) -> usize {
        self.geo.ell
    }

    fn beta(&self) -> f64 {
        self.geo.beta
    }

    fn value(&self, r: f64, y: &[f64]) -> f64 {
        let s = if self.geo.ell == 1 {
            y[0]
        } else {
            y.iter().map(|v| v * v).sum::<f64>().sqrt()
        };
        let rho = r.hypot(s);
        let t = s.atan2(r.max(0.0));
        self.eval_polar(rho, t)
    }
}
