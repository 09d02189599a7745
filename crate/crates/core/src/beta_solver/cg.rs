//! Jacobi-preconditioned conjugate gradients for the five-point energy Hessian.

use crate::error::{Error, Result};

/// Symmetric five-point operator on an `n_rho x n_angle` cell grid, stored as
/// face transmissibilities. Index `i * n_angle + k`.
#[derive(Debug, Clone)]
pub(crate) struct Stencil {
    pub n_rho: usize,
    pub n_angle: usize,
    /// Face between `(i, k)` and `(i + 1, k)`; length `(n_rho - 1) * n_angle`.
    pub radial: Vec<f64>,
    /// Face between the last cell `(n_rho - 1, k)` and the boundary node.
    pub outer: Vec<f64>,
    /// Face between `(i, k)` and `(i, k + 1)`; length `n_rho * (n_angle - 1)`.
    pub angular: Vec<f64>,
}

impl Stencil {
    pub fn len(&self) -> usize {
        self.n_rho * self.n_angle
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let (nr, na) = (self.n_rho, self.n_angle);
        let mut d = vec![0.0; nr * na];
        for i in 0..nr {
            for k in 0..na {
                let idx = i * na + k;
                let mut s = 0.0;
                if i > 0 {
                    s += self.radial[(i - 1) * na + k];
                }
                if i + 1 < nr {
                    s += self.radial[i * na + k];
                } else {
                    s += self.outer[k];
                }
                if k > 0 {
                    s += self.angular[i * (na - 1) + k - 1];
                }
                if k + 1 < na {
                    s += self.angular[i * (na - 1) + k];
                }
                d[idx] = s;
            }
        }
        d
    }

    /// `out = A u`, accumulated in fixed index order.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let (nr, na) = (self.n_rho, self.n_angle);
        for i in 0..nr {
            for k in 0..na {
                let idx = i * na + k;
                let c = u[idx];
                let mut s = 0.0;
                if i > 0 {
                    s += self.radial[(i - 1) * na + k] * (c - u[idx - na]);
                }
                if i + 1 < nr {
                    s += self.radial[i * na + k] * (c - u[idx + na]);
                } else {
                    s += self.outer[k] * c;
                }
                if k > 0 {
                    s += self.angular[i * (na - 1) + k - 1] * (c - u[idx - 1]);
                }
                if k + 1 < na {
                    s += self.angular[i * (na - 1) + k] * (c - u[idx + 1]);
                }
                out[idx] = s;
            }
        }
    }

    /// `sum_j |A_ij| |u_j|` per row, the scale of each weak-form equation.
    pub fn abs_apply(&self, u: &[f64], out: &mut [f64]) {
        let (nr, na) = (self.n_rho, self.n_angle);
        let diag = self.diagonal();
        for i in 0..nr {
            for k in 0..na {
                let idx = i * na + k;
                let mut s = diag[idx] * u[idx].abs();
                if i > 0 {
                    s += self.radial[(i - 1) * na + k] * u[idx - na].abs();
                }
                if i + 1 < nr {
                    s += self.radial[i * na + k] * u[idx + na].abs();
                }
                if k > 0 {
                    s += self.angular[i * (na - 1) + k - 1] * u[idx - 1].abs();
                }
                if k + 1 < na {
                    s += self.angular[i * (na - 1) + k] * u[idx + 1].abs();
                }
                out[idx] = s;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solve `A x = b` from the initial guess `x`, stopping on the true relative
/// residual `||b - A x|| / ||b|| <= tol`.
pub(crate) fn solve(
    a: &Stencil,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgStats> {
    let n = a.len();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgStats {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut ax = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut iterations = 0;

    loop {
        a.apply(x, &mut ax);
        for i in 0..n {
            r[i] = b[i] - ax[i];
        }
        let rel = norm(&r) / b_norm;
        if rel <= tol {
            return Ok(CgStats {
                iterations,
                relative_residual: rel,
            });
        }
        if iterations >= max_iter {
            return Err(Error::SolverDiverged {
                iterations,
                residual: rel,
            });
        }
        // restart from the true residual
        for i in 0..n {
            z[i] = inv_diag[i] * r[i];
        }
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        while iterations < max_iter {
            a.apply(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            iterations += 1;
            if norm(&r) / b_norm <= 0.1 * tol {
                break;
            }
            for i in 0..n {
                z[i] = inv_diag[i] * r[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(nr: usize, na: usize, t: f64) -> Stencil {
        Stencil {
            n_rho: nr,
            n_angle: na,
            radial: vec![t; (nr - 1) * na],
            outer: vec![2.0 * t; na],
            angular: vec![t; nr * (na - 1)],
        }
    }

    #[test]
    fn constant_boundary_gives_constant_solution() {
        let a = uniform(6, 5, 1.0);
        let b: Vec<f64> = (0..30)
            .map(|i| if i >= 25 { 2.0 * 3.0 } else { 0.0 })
            .collect();
        let mut x = vec![0.0; 30];
        let stats = solve(&a, &b, &mut x, 1e-12, 1000).unwrap();
        assert!(stats.relative_residual <= 1e-12);
        for v in x {
            assert!((v - 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn iteration_cap_is_reported() {
        let a = uniform(10, 10, 1.0);
        let b: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        let mut x = vec![0.0; 100];
        match solve(&a, &b, &mut x, 1e-14, 2) {
            Err(Error::SolverDiverged { iterations, .. }) => assert_eq!(iterations, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
