//! Gauss-type quadrature rules.
//!
//! Gauss-Jacobi rules are built from the Jacobi-matrix eigenproblem and then
//! polished with Newton steps on the orthonormal recurrence, with weights taken
//! from the Christoffel function. Product rules for spheres, balls and the
//! weighted half-ball are assembled from them.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

/// Nodes and weights on `[-1, 1]` (or a mapped interval).
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn recurrence(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = a + b;
    let diag = (0..n)
        .map(|k| {
            if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let s = 2.0 * k as f64 + ab;
                (b * b - a * a) / (s * (s + 2.0))
            }
        })
        .collect();
    // off[k] = sqrt(beta_{k+1}), couples p_k and p_{k+1}
    let off = (1..n)
        .map(|k| {
            let kf = k as f64;
            let beta = if k == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * kf + ab;
                4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            beta.sqrt()
        })
        .collect();
    (diag, off)
}

/// Total mass of `(1-x)^a (1+x)^b` on `[-1, 1]`.
pub fn jacobi_mass(a: f64, b: f64) -> f64 {
    ((a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(a + b + 2.0))
    .exp()
}

/// Gauss-Jacobi rule with `n` nodes for the weight `(1-x)^a (1+x)^b`, `a, b > -1`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Rule {
    assert!(
        n >= 1 && a > -1.0 && b > -1.0,
        "invalid Gauss-Jacobi parameters"
    );
    let mass = jacobi_mass(a, b);
    let (diag, off) = recurrence(n + 1, a, b);
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jm[(k, k)] = diag[k];
        if k + 1 < n {
            jm[(k, k + 1)] = off[k];
            jm[(k + 1, k)] = off[k];
        }
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jm)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());

    // orthonormal values p_0..p_n at x, with derivative of p_n
    let eval = |x: f64| -> (Vec<f64>, f64) {
        let mut p = vec![0.0; n + 1];
        let mut dp = vec![0.0; n + 1];
        p[0] = 1.0 / mass.sqrt();
        for k in 0..n {
            let prev = if k > 0 { p[k - 1] } else { 0.0 };
            let dprev = if k > 0 { dp[k - 1] } else { 0.0 };
            let back = if k > 0 { off[k - 1] } else { 0.0 };
            p[k + 1] = ((x - diag[k]) * p[k] - back * prev) / off[k];
            dp[k + 1] = (p[k] + (x - diag[k]) * dp[k] - back * dprev) / off[k];
        }
        let d = dp[n];
        (p, d)
    };

    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, d) = eval(*x);
            if d == 0.0 {
                break;
            }
            let step = p[n] / d;
            let candidate = *x - step;
            if !(-1.0..=1.0).contains(&candidate) || step.abs() > 1e-6 {
                break;
            }
            *x = candidate;
        }
        let (p, _) = eval(*x);
        let christoffel: f64 = p[..n].iter().map(|v| v * v).sum();
        weights.push(1.0 / christoffel);
    }
    Rule { nodes, weights }
}

pub fn gauss_legendre(n: usize) -> Rule {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Gauss-Jacobi rule on `[0, 1]` for the weight `s^a (1-s)^b`.
pub fn gauss_jacobi_unit(n: usize, a: f64, b: f64) -> Rule {
    let base = gauss_jacobi(n, b, a);
    let scale = 0.5f64.powf(a + b + 1.0);
    Rule {
        nodes: base.nodes.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights: base.weights.iter().map(|w| w * scale).collect(),
    }
}

/// Composite Gauss-Legendre integration over `[lo, hi]` with `per_unit` nodes
/// per unit length (at least one panel). Extra breakpoints split panels.
pub fn composite_legendre<F: Fn(f64) -> f64>(
    lo: f64,
    hi: f64,
    per_unit: usize,
    breakpoints: &[f64],
    f: F,
) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let base = gauss_legendre(per_unit);
    let mut cuts: Vec<f64> = vec![lo];
    let panels = (hi - lo).ceil().max(1.0) as usize;
    for k in 1..panels {
        cuts.push(lo + (hi - lo) * k as f64 / panels as f64);
    }
    cuts.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
    cuts.push(hi);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        total += half * base.integrate(|x| f(mid + half * x));
    }
    total
}

/// A weighted point set in `R^d`.
#[derive(Debug, Clone)]
pub struct PointRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl PointRule {
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(x, &w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Product rule on the unit sphere `S^dim` in `R^(dim+1)`, exact for
/// polynomials of degree `<= 2*order - 1`.
pub fn sphere_rule(dim: usize, order: usize) -> PointRule {
    match dim {
        0 => PointRule {
            points: vec![vec![1.0], vec![-1.0]],
            weights: vec![1.0, 1.0],
        },
        1 => {
            let m = 2 * order;
            let w = 2.0 * std::f64::consts::PI / m as f64;
            let points = (0..m)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect();
            PointRule {
                points,
                weights: vec![w; m],
            }
        }
        d => {
            let e = (d as f64 - 2.0) / 2.0;
            let polar = gauss_jacobi(order, e, e);
            let lower = sphere_rule(d - 1, order);
            let mut points = Vec::with_capacity(polar.len() * lower.len());
            let mut weights = Vec::with_capacity(points.capacity());
            for (&t, &wt) in polar.nodes.iter().zip(&polar.weights) {
                let s = (1.0 - t * t).max(0.0).sqrt();
                for (p, &wp) in lower.points.iter().zip(&lower.weights) {
                    let mut x: Vec<f64> = p.iter().map(|c| c * s).collect();
                    x.push(t);
                    points.push(x);
                    weights.push(wt * wp);
                }
            }
            PointRule { points, weights }
        }
    }
}

/// Product rule on the closed unit ball of `R^dim`.
pub fn unit_ball_rule(dim: usize, order: usize) -> PointRule {
    if dim == 1 {
        let gl = gauss_legendre(order);
        return PointRule {
            points: gl.nodes.iter().map(|&x| vec![x]).collect(),
            weights: gl.weights,
        };
    }
    // t^(dim-1) dt on (0,1)
    let radial = gauss_jacobi_unit(order, dim as f64 - 1.0, 0.0);
    let shell = sphere_rule(dim - 1, order);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (&t, &wt) in radial.nodes.iter().zip(&radial.weights) {
        for (p, &wp) in shell.points.iter().zip(&shell.weights) {
            points.push(p.iter().map(|c| c * t).collect());
            weights.push(wt * wp);
        }
    }
    PointRule { points, weights }
}

/// Cylindrical-coordinate rule for `int_{B_R^+} f(r, y) r^kappa dr dy`, where
/// `B_R^+ = {r > 0, r^2 + |y|^2 < R^2}` and `y` ranges over `R^ell`.
///
/// Points are stored as `[r, y_1, .., y_ell]`; the weight `r^kappa` is folded
/// into the weights, so callers integrate `f` alone. Exact for `f` polynomial
/// in `(r^2, y)` up to the rule order.
pub fn half_ball_rule(ell: usize, kappa: f64, radius: f64, order: usize) -> PointRule {
    assert!(kappa > -1.0);
    let r2 = radius * radius;
    // u = r^2 in (0, R^2): r^kappa dr = u^((kappa-1)/2) du / 2, and the y-ball of
    // radius a = sqrt(R^2 - u) contributes a^ell.
    let ea = (kappa - 1.0) / 2.0;
    let eb = ell as f64 / 2.0;
    let outer = gauss_jacobi_unit(order, ea, eb);
    let outer_scale = 0.5 * r2.powf(ea + eb + 1.0);
    let inner = unit_ball_rule(ell, order);
    let mut points = Vec::with_capacity(outer.len() * inner.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for (&s, &ws) in outer.nodes.iter().zip(&outer.weights) {
        let u = s * r2;
        let r = u.sqrt();
        let a = (r2 - u).max(0.0).sqrt();
        for (z, &wz) in inner.points.iter().zip(&inner.weights) {
            let mut x = Vec::with_capacity(ell + 1);
            x.push(r);
            x.extend(z.iter().map(|c| c * a));
            points.push(x);
            weights.push(ws * outer_scale * wz);
        }
    }
    PointRule { points, weights }
}

/// Surface measure of the unit sphere `S^dim`.
pub fn sphere_area(dim: usize) -> f64 {
    let k = (dim as f64 + 1.0) / 2.0;
    2.0 * (k * std::f64::consts::PI.ln() - ln_gamma(k)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let rule = gauss_legendre(8);
        for k in 0..16 {
            let got = rule.integrate(|x| x.powi(k));
            let want = if k % 2 == 1 {
                0.0
            } else {
                2.0 / (k as f64 + 1.0)
            };
            assert!((got - want).abs() < 1e-14, "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn jacobi_moments_match_beta_function() {
        // int_0^1 s^a (1-s)^b s^k ds = B(a+k+1, b+1)
        for &(a, b) in &[(0.5, -0.5), (1.25, 0.0), (0.0, 1.5), (2.5, 0.5)] {
            let rule = gauss_jacobi_unit(12, a, b);
            for k in 0..20 {
                let got = rule.integrate(|s| s.powi(k));
                let kf = k as f64;
                let want =
                    (ln_gamma(a + kf + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + kf + 2.0)).exp();
                assert!(
                    ((got - want) / want).abs() < 1e-12,
                    "a={a} b={b} k={k} {got} {want}"
                );
            }
        }
    }

    #[test]
    fn sphere_areas() {
        for dim in 0..5 {
            let rule = sphere_rule(dim, 6);
            let got: f64 = rule.weights.iter().sum();
            assert!((got - sphere_area(dim)).abs() < 1e-12 * got, "dim {dim}");
        }
        // second moment of x_1 on S^2 is 4 pi / 3
        let rule = sphere_rule(2, 6);
        let m = rule.integrate(|x| x[0] * x[0]);
        assert!((m - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn half_ball_volume() {
        // int_{B_1^+} r^kappa dr dy for ell = 1 equals
        // int_0^pi/2.. = B((kappa+1)/2, 3/2) (see polar form)
        let kappa = 2.0;
        let rule = half_ball_rule(1, kappa, 1.0, 10);
        let got: f64 = rule.weights.iter().sum();
        // polar: int_0^1 rho^(kappa+1) drho * int cos^kappa = (1/(kappa+2)) * sqrt(pi) G((k+1)/2)/G(k/2+1)
        let ang = (0.5 * std::f64::consts::PI.ln() + ln_gamma((kappa + 1.0) / 2.0)
            - ln_gamma(kappa / 2.0 + 1.0))
        .exp();
        let want = ang / (kappa + 2.0);
        assert!((got - want).abs() < 1e-13);
    }

    #[test]
    fn composite_handles_breakpoints() {
        let v = composite_legendre(0.0, 2.0, 16, &[0.7], |x| (x - 0.7).abs());
        let want = 0.5 * 0.7 * 0.7 + 0.5 * 1.3 * 1.3;
        assert!((v - want).abs() < 1e-14);
    }
}
