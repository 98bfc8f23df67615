//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use eit3d_core::cgo::Grid3;
use eit3d_core::dnmap::DnSpectrum;
use eit3d_core::phantom::{RadialProfile, ShellPhantom};
use num_complex::Complex64;

/// Closed form of `t^exp` for a radial conductivity:
/// `4π Σ_{l≤L} (λ_l - l) (-s²)^l / (2l+1)!`, independent of `ζ`.
pub fn texp_closed_form(spectrum: &DnSpectrum, s: f64, truncation: usize) -> f64 {
    let mut total = 0.0;
    let mut term = 1.0;
    for l in 0..=truncation {
        if l > 0 {
            term *= -s * s / ((2 * l) * (2 * l + 1)) as f64;
        }
        total += spectrum.excess(l).unwrap() * term;
    }
    4.0 * PI * total
}

/// `λ_l` of a shell phantom by RK4 shooting on the flux form
/// `R' = F/(γr²)`, `F' = l(l+1)γR`, integrating each shell separately.
pub fn shell_eigen_ode(phantom: &ShellPhantom, l: usize, step: f64) -> f64 {
    let lf = l as f64;
    let ll1 = lf * (lf + 1.0);
    let r0 = 1e-4;
    let mut edges = vec![r0];
    edges.extend(phantom.radii().iter().copied().filter(|r| *r > r0));
    edges.push(1.0);
    let g0 = phantom.values()[0];
    // R = r^l, F = γ r² l r^{l-1}, scaled by r0^{-l}.
    let mut y = [1.0, g0 * lf * r0];
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let g = phantom.gamma(0.5 * (a + b));
        let rhs = |r: f64, y: [f64; 2]| [y[1] / (g * r * r), ll1 * g * y[0]];
        let steps = ((b - a) / step).ceil().max(1.0) as usize;
        let h = (b - a) / steps as f64;
        let mut r = a;
        for _ in 0..steps {
            let k1 = rhs(r, y);
            let k2 = rhs(r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = rhs(r + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for c in 0..2 {
                y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            r += h;
            let s = y[0].abs().max(y[1].abs());
            y = [y[0] / s, y[1] / s];
        }
    }
    // λ = γ(1) R'(1)/R(1) = F(1)/R(1).
    y[1] / y[0]
}

/// Second-order finite-difference solve of `Δw = q(w + 1)`, `w'(0) = 0`,
/// `w(1) = 0` on the profile's uniform nodes; returns `γ = (1 + w)²`.
pub fn fd_conductivity(q: &RadialProfile) -> RadialProfile {
    let m = q.len();
    let h = 1.0 / (m - 1) as f64;
    // Unknowns w_0..w_{m-2}; w_{m-1} = 0.
    let n = m - 1;
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let qi = q.values[i];
        if i == 0 {
            // Δw(0) = 3w''(0) ≈ 6(w_1 - w_0)/h².
            diag[0] = -6.0 / (h * h) - qi;
            upper[0] = 6.0 / (h * h);
        } else {
            let r = i as f64 * h;
            let rm = r - 0.5 * h;
            let rp = r + 0.5 * h;
            let c = 1.0 / (r * r * h * h);
            lower[i] = c * rm * rm;
            upper[i] = c * rp * rp;
            diag[i] = -c * (rm * rm + rp * rp) - qi;
        }
        rhs[i] = qi;
    }
    // Thomas algorithm.
    for i in 1..n {
        let f = lower[i] / diag[i - 1];
        diag[i] -= f * upper[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    let mut w = vec![0.0; m];
    w[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        w[i] = (rhs[i] - upper[i] * w[i + 1]) / diag[i];
    }
    RadialProfile {
        r: q.r.clone(),
        values: w.iter().map(|v| (1.0 + v) * (1.0 + v)).collect(),
    }
}

/// `h³ Σ_i Σ_j g(x_i - x_j) φ(x_j)` by direct summation over the periodic grid.
pub fn brute_force_convolution(grid: &Grid3, g: &[Complex64], phi: &[Complex64]) -> Vec<Complex64> {
    let h3 = grid.h().powi(3);
    (0..grid.len())
        .map(|i| {
            let ni = grid.node(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, pj) in phi.iter().enumerate() {
                let nj = grid.node(j);
                let k = [
                    grid.wrap(ni[0] - nj[0]),
                    grid.wrap(ni[1] - nj[1]),
                    grid.wrap(ni[2] - nj[2]),
                ];
                acc += g[grid.flat(k)] * pj;
            }
            acc * h3
        })
        .collect()
}

/// Midpoint Riemann sum of `∫ e^{-ix·ξ} q(|x|) dx` over `[-1, 1]³` with `n` cells per axis.
pub fn riemann_fourier_3d(q: &dyn Fn(f64) -> f64, xi: [f64; 3], n: usize) -> Complex64 {
    let h = 2.0 / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..n {
        let x = -1.0 + (a as f64 + 0.5) * h;
        for b in 0..n {
            let y = -1.0 + (b as f64 + 0.5) * h;
            for c in 0..n {
                let z = -1.0 + (c as f64 + 0.5) * h;
                let r = (x * x + y * y + z * z).sqrt();
                let v = q(r);
                if v != 0.0 {
                    acc += Complex64::from_polar(v, -(x * xi[0] + y * xi[1] + z * xi[2]));
                }
            }
        }
    }
    acc * h * h * h
}

/// Spherical Bessel functions `j_0 … j_lmax` at `x > 0` by Miller's backward recurrence.
pub fn spherical_bessel(lmax: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut v = vec![0.0; lmax + 1];
        v[0] = 1.0;
        return v;
    }
    let start = lmax + 20 + (2.0 * x) as usize;
    let mut vals = vec![0.0; start + 2];
    vals[start + 1] = 0.0;
    vals[start] = 1e-300;
    for l in (1..=start).rev() {
        vals[l - 1] = (2 * l + 1) as f64 / x * vals[l] - vals[l + 1];
        if vals[l - 1].abs() > 1e250 {
            for v in vals.iter_mut().skip(l - 1) {
                *v *= 1e-250;
            }
        }
    }
    let j0 = x.sin() / x;
    let j1 = x.sin() / (x * x) - x.cos() / x;
    // Normalise on whichever of j0, j1 is larger to avoid dividing by a zero.
    let scale = if j0.abs() > j1.abs() { j0 / vals[0] } else { j1 / vals[1] };
    vals.truncate(lmax + 1);
    vals.iter().map(|v| v * scale).collect()
}
