//! Matrix-free GMRES with full orthogonalisation and no restarts.
//!
//! The Arnoldi basis is built with modified Gram–Schmidt and the small
//! least-squares problem is kept triangular with complex Givens rotations,
//! which makes the residual norm available at every step without forming
//! the iterate.

use num_complex::Complex64;

/// Stopping rule for [`gmres`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresConfig {
    /// Target relative residual `‖b - Ax‖/‖b‖`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 200,
        }
    }
}

/// Outcome of a GMRES run.
#[derive(Debug, Clone)]
pub struct GmresResult {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    /// Relative residual before the first step and after each step.
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

impl GmresResult {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&0.0)
    }
}

fn dotc(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Solves `A x = b` starting from `x = 0`.
///
/// `apply(v, out)` must write `A v` into `out`.
pub fn gmres<F>(mut apply: F, b: &[Complex64], config: GmresConfig) -> GmresResult
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    let n = b.len();
    let zero = Complex64::new(0.0, 0.0);
    let beta = norm(b);
    if beta == 0.0 {
        return GmresResult {
            x: vec![zero; n],
            iterations: 0,
            residual_history: vec![0.0],
            converged: true,
        };
    }
    let mut basis: Vec<Vec<Complex64>> = vec![b.iter().map(|v| v / beta).collect()];
    let mut h_cols: Vec<Vec<Complex64>> = Vec::new();
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<Complex64> = Vec::new();
    let mut g = vec![Complex64::new(beta, 0.0)];
    let mut history = vec![1.0];
    let mut converged = false;
    let mut w = vec![zero; n];
    for k in 0..config.max_iter {
        apply(&basis[k], &mut w);
        let mut h = vec![zero; k + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij = dotc(v, &w);
            h[i] = hij;
            for (wj, vj) in w.iter_mut().zip(v) {
                *wj -= hij * vj;
            }
        }
        let h_next = norm(&w);
        h[k + 1] = Complex64::new(h_next, 0.0);
        for i in 0..k {
            let (a, b2) = (h[i], h[i + 1]);
            h[i] = cs[i] * a + sn[i] * b2;
            h[i + 1] = -sn[i].conj() * a + cs[i] * b2;
        }
        let (a, b2) = (h[k], h[k + 1]);
        let denom = (a.norm_sqr() + b2.norm_sqr()).sqrt();
        let (c, s) = if denom == 0.0 {
            (1.0, zero)
        } else if a.norm() == 0.0 {
            (0.0, b2.conj() / b2.norm())
        } else {
            let c = a.norm() / denom;
            (c, (a / a.norm()) * b2.conj() / denom)
        };
        h[k] = c * a + s * b2;
        h[k + 1] = zero;
        cs.push(c);
        sn.push(s);
        let gk = g[k];
        g[k] = c * gk;
        g.push(-s.conj() * gk);
        h_cols.push(h);
        let rel = g[k + 1].norm() / beta;
        history.push(rel);
        let breakdown = h_next <= 1e-14 * beta;
        if rel <= config.tol {
            converged = true;
            break;
        }
        if breakdown {
            break;
        }
        basis.push(w.iter().map(|v| v / h_next).collect());
    }
    // Back substitution on the triangular system.
    let m = h_cols.len();
    let mut y = vec![zero; m];
    for i in (0..m).rev() {
        let mut acc = g[i];
        for j in i + 1..m {
            acc -= h_cols[j][i] * y[j];
        }
        y[i] = acc / h_cols[i][i];
    }
    let mut x = vec![zero; n];
    for (yj, v) in y.iter().zip(&basis) {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += yj * vi;
        }
    }
    GmresResult {
        x,
        iterations: m,
        residual_history: history,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_nonsymmetric_system() {
        let a = [
            [Complex64::new(4.0, 1.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)],
            [Complex64::new(0.5, 0.0), Complex64::new(3.0, -2.0), Complex64::new(1.0, 1.0)],
            [Complex64::new(0.0, 2.0), Complex64::new(-1.0, 0.0), Complex64::new(5.0, 0.0)],
        ];
        let b = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(2.0, -1.0)];
        let res = gmres(
            |v, out| {
                for i in 0..3 {
                    out[i] = (0..3).map(|j| a[i][j] * v[j]).sum();
                }
            },
            &b,
            GmresConfig {
                tol: 1e-13,
                max_iter: 10,
            },
        );
        assert!(res.converged);
        assert!(res.iterations <= 3);
        for i in 0..3 {
            let ax: Complex64 = (0..3).map(|j| a[i][j] * res.x[j]).sum();
            assert!((ax - b[i]).norm() < 1e-12);
        }
        assert!(res.residual_history.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn reports_non_convergence() {
        // Cyclic shift: GMRES makes no progress until the last step.
        let n = 12;
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        b[0] = Complex64::new(1.0, 0.0);
        let res = gmres(
            |v, out| {
                for i in 0..n {
                    out[(i + 1) % n] = v[i];
                }
            },
            &b,
            GmresConfig { tol: 1e-10, max_iter: 5 },
        );
        assert!(!res.converged);
        assert_eq!(res.residual_history.len(), 6);
    }
}
