//! Faddeev's Green's function `g_ζ`.
//!
//! `g_ζ` is the fundamental solution of `Δ + 2iζ·∇` that stays bounded
//! against `e^{-ix·ζ}`. At the reference frequency `ζ₀ = e₁ + i e₂`
//!
//! ```text
//! g(x) = e^{-r+x₂-ix₁}/(4πr) - (1/4π) ∫_s^1 e^{-r(u-s)} e^{-ix₁} J₁(r√(1-u²))/√(1-u²) du
//! ```
//!
//! with `r = |x|`, `s = x₂/r`. Every admissible `ζ = κ(k_⊥ + ik)` reduces to the
//! reference through `g_ζ(x) = κ g(κRx)`, with `R` the rotation taking
//! `(k_⊥, k)` to `(e₁, e₂)`.
//!
//! The default quadrature substitutes `u = cos θ`, which turns the integrand
//! into the analytic `e^{-r(cos θ - s)} J₁(r sin θ)`, skips the part of the
//! interval where the exponential weight is below `e^{-cut}`, and applies
//! composite 8-point Gauss–Legendre panels. Midpoint rules in `θ` and in `u`
//! are kept as alternatives.

mod bessel;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

pub use bessel::bessel_j1;

use crate::cgo::Grid3;
use crate::geometry::{decompose_zeta, mat_vec, norm, scale, ComplexFrequency, GeometryError, Vec3, ZetaDecomposition};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FaddeevError {
    #[error("the Green's function is singular at the origin")]
    SingularPoint,
    #[error("quadrature needs at least 16 nodes, got {0}")]
    TooFewNodes(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Quadrature rule for the one-dimensional integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    /// Midpoint rule in `u` over `[s, 1]`.
    UMidpoint,
    /// Midpoint rule in `θ = arccos u`, truncated where the weight underflows.
    AngularMidpoint,
    /// Composite 8-point Gauss–Legendre in `θ`, truncated likewise.
    AngularGauss,
}

const GAUSS_NODES: [f64; 4] = [0.18343464249564978, 0.525532409916329, 0.7966664774136267, 0.9602898564975362];
const GAUSS_WEIGHTS: [f64; 4] = [0.36268378337836177, 0.31370664587788705, 0.22238103445337434, 0.10122853629037669];

/// Quadrature settings for [`g_reference`].
///
/// The node count is `max(n_quad, ceil(density · r · L))`, where `L` is the
/// length of the integration interval, so that the oscillation scale `1/r` of
/// the Bessel factor stays resolved. Gauss panels hold 8 nodes each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenEvalConfig {
    pub n_quad: usize,
    pub density: f64,
    /// Exponent below which the weight `e^{-r(u-s)}` is treated as zero.
    pub underflow_cut: f64,
    pub rule: QuadratureRule,
}

impl Default for GreenEvalConfig {
    fn default() -> Self {
        Self {
            n_quad: 32,
            density: 2.0,
            underflow_cut: 40.0,
            rule: QuadratureRule::AngularGauss,
        }
    }
}

impl GreenEvalConfig {
    /// Literal midpoint rule in `u` with a fixed node count.
    pub fn u_midpoint(n_quad: usize) -> Self {
        Self {
            n_quad,
            density: 0.0,
            underflow_cut: f64::INFINITY,
            rule: QuadratureRule::UMidpoint,
        }
    }

    fn validate(&self) -> Result<(), FaddeevError> {
        if self.n_quad < 16 {
            Err(FaddeevError::TooFewNodes(self.n_quad))
        } else {
            Ok(())
        }
    }

    fn nodes(&self, r: f64, length: f64) -> usize {
        let adaptive = (self.density * r * length).ceil();
        if adaptive.is_finite() && adaptive > self.n_quad as f64 {
            adaptive as usize
        } else {
            self.n_quad
        }
    }
}

/// `J₁(t)/t`, continuous at zero.
fn j1_over_t(t: f64) -> f64 {
    if t < 1e-4 {
        0.5 - t * t / 16.0
    } else {
        bessel_j1(t) / t
    }
}

/// `g_{e₁+ie₂}(x)` at a nonzero point.
pub fn g_reference(x: Vec3, cfg: &GreenEvalConfig) -> Result<Complex64, FaddeevError> {
    cfg.validate()?;
    let r = norm(x);
    if r == 0.0 {
        return Err(FaddeevError::SingularPoint);
    }
    let s = (x[1] / r).clamp(-1.0, 1.0);
    let phase = Complex64::from_polar(1.0, -x[0]);
    let leading = (-r * (1.0 - s)).exp() / (4.0 * PI * r);
    let integral = match cfg.rule {
        QuadratureRule::UMidpoint => {
            let n = cfg.nodes(r, 1.0 - s);
            let h = (1.0 - s) / n as f64;
            let mut acc = 0.0;
            for j in 0..n {
                let u = s + (j as f64 + 0.5) * h;
                let t = r * (1.0 - u * u).max(0.0).sqrt();
                acc += (-r * (u - s)).exp() * r * j1_over_t(t);
            }
            acc * h
        }
        QuadratureRule::AngularMidpoint | QuadratureRule::AngularGauss => {
            let theta_s = s.acos();
            let theta_lo = (s + cfg.underflow_cut / r).min(1.0).acos();
            let length = theta_s - theta_lo;
            let f = |theta: f64| {
                let (st, ct) = theta.sin_cos();
                (-r * (ct - s)).exp() * bessel_j1(r * st)
            };
            if length <= 0.0 {
                0.0
            } else if cfg.rule == QuadratureRule::AngularMidpoint {
                let n = cfg.nodes(r, length);
                let h = length / n as f64;
                (0..n).map(|j| f(theta_lo + (j as f64 + 0.5) * h)).sum::<f64>() * h
            } else {
                let panels = cfg.nodes(r, length).div_ceil(8);
                let h = length / panels as f64;
                let mut acc = 0.0;
                for p in 0..panels {
                    let mid = theta_lo + (p as f64 + 0.5) * h;
                    for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
                        acc += w * (f(mid - 0.5 * h * x) + f(mid + 0.5 * h * x));
                    }
                }
                acc * 0.5 * h
            }
        }
    };
    Ok(phase * (leading - integral / (4.0 * PI)))
}

/// Evaluates `g_ζ` at `x` using a precomputed decomposition of `ζ`.
pub fn g_decomposed(
    x: Vec3,
    dec: &ZetaDecomposition,
    cfg: &GreenEvalConfig,
) -> Result<Complex64, FaddeevError> {
    let y = scale(mat_vec(&dec.rotation, x), dec.kappa);
    Ok(g_reference(y, cfg)? * dec.kappa)
}

/// `g_ζ(x) = κ g_{e₁+ie₂}(κRx)`.
pub fn g_zeta(x: Vec3, zeta: &ComplexFrequency, cfg: &GreenEvalConfig) -> Result<Complex64, FaddeevError> {
    let dec = decompose_zeta(zeta)?;
    g_decomposed(x, &dec, cfg)
}

/// Where the periodised kernel is allowed to be nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum KernelSupport {
    /// Every node of the period cube `[-2, 2)³` except the origin.
    #[default]
    FullCube,
    /// Only nodes with `|x| ≤ radius`.
    Ball { radius: f64 },
}

/// Samples `g_ζ` on the periodic grid in FFT order; the origin is set to 0.
pub fn sample_g_periodic(
    zeta: &ComplexFrequency,
    grid: &Grid3,
    cfg: &GreenEvalConfig,
    support: KernelSupport,
) -> Result<Vec<Complex64>, FaddeevError> {
    cfg.validate()?;
    let dec = decompose_zeta(zeta)?;
    let values = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let x = grid.position(idx);
            let r = norm(x);
            let inside = match support {
                KernelSupport::FullCube => true,
                KernelSupport::Ball { radius } => r <= radius,
            };
            if r == 0.0 || !inside {
                Complex64::new(0.0, 0.0)
            } else {
                g_decomposed(x, &dec, cfg).expect("nonzero point with validated config")
            }
        })
        .collect();
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ray_value() {
        for cfg in [GreenEvalConfig::default(), GreenEvalConfig::u_midpoint(64)] {
            let g = g_reference([0.0, 1.0, 0.0], &cfg).unwrap();
            assert!((g.re - 1.0 / (4.0 * PI)).abs() < 1e-15);
            assert!(g.im.abs() < 1e-15);
            let g = g_reference([0.0, 3.0, 0.0], &cfg).unwrap();
            assert!((g.re - 1.0 / (12.0 * PI)).abs() < 1e-15);
        }
    }

    #[test]
    fn singular_origin_and_config() {
        let cfg = GreenEvalConfig::default();
        assert_eq!(g_reference([0.0; 3], &cfg), Err(FaddeevError::SingularPoint));
        let bad = GreenEvalConfig::u_midpoint(8);
        assert_eq!(g_reference([1.0, 0.0, 0.0], &bad), Err(FaddeevError::TooFewNodes(8)));
    }

    #[test]
    fn angular_rule_matches_fine_u_midpoint() {
        let fine = GreenEvalConfig::u_midpoint(1 << 16);
        let gauss = GreenEvalConfig::default();
        let midpoint = GreenEvalConfig {
            n_quad: 256,
            density: 64.0,
            rule: QuadratureRule::AngularMidpoint,
            ..GreenEvalConfig::default()
        };
        for x in [[1.0, 0.0, 0.0], [0.3, -0.8, 0.5], [-2.0, -1.0, 1.5], [0.1, 0.05, -0.02]] {
            let a = g_reference(x, &fine).unwrap();
            let scale = 1.0 / (4.0 * PI * norm(x));
            let b = g_reference(x, &gauss).unwrap();
            assert!((a - b).norm() < 1e-8 * scale, "{x:?}: {a} vs {b}");
            let c = g_reference(x, &midpoint).unwrap();
            assert!((a - c).norm() < 1e-5 * scale, "{x:?}: {a} vs {c}");
        }
    }
}
