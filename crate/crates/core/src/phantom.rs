//! Radial test conductivities and their Schrödinger potentials.
//!
//! The smooth bump is `γ(r) = (αΨ(r) + 1)²` with the compactly supported
//! `Ψ(r) = exp(-r²/(r² - d²)²)` for `r < d`, so that `√γ = αΨ + 1` and the
//! potential `q = Δ√γ/√γ = αΔΨ/(1 + αΨ)` are available in closed form.

use thiserror::Error;

use crate::cgo::Grid3;
use num_complex::Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhantomError {
    #[error("amplitude alpha = {0} must be finite and greater than -1")]
    InvalidAlpha(f64),
    #[error("support radius d = {0} must lie in (0, 1]")]
    InvalidSupport(f64),
    #[error("shell radii must be strictly increasing inside (0, 1)")]
    InvalidRadii,
    #[error("expected {expected} shell values, found {found}")]
    ShellCount { expected: usize, found: usize },
    #[error("shell conductivities must be positive and finite")]
    NonPositiveConductivity,
    #[error("the outermost shell must have conductivity 1, found {0}")]
    BoundaryValue(f64),
    #[error("radial profile requires at least two nodes")]
    TooFewNodes,
}

/// The compactly supported bump `Ψ(r)`.
pub fn psi(r: f64, d: f64) -> f64 {
    let r = r.abs();
    if r >= d {
        return 0.0;
    }
    let den = r * r - d * d;
    (-(r * r) / (den * den)).exp()
}

/// `Ψ'(r)`.
pub fn psi_prime(r: f64, d: f64) -> f64 {
    if r.abs() >= d {
        return 0.0;
    }
    let den = r * r - d * d;
    let phi1 = 2.0 * r * (r * r + d * d) / (den * den * den);
    psi(r, d) * phi1
}

/// `ΔΨ(r)` in three dimensions, evaluated in a form that is regular at the origin.
pub fn laplacian_psi(r: f64, d: f64) -> f64 {
    let r = r.abs();
    if r >= d {
        return 0.0;
    }
    let r2 = r * r;
    let d2 = d * d;
    let den = r2 - d2;
    let den3 = den * den * den;
    let phi1 = 2.0 * r * (r2 + d2) / den3;
    let phi2 = 2.0 * (3.0 * r2 + d2) / den3 - 12.0 * r2 * (r2 + d2) / (den3 * den);
    // (2/r)·φ' written without the division.
    let radial = 4.0 * (r2 + d2) / den3;
    psi(r, d) * (phi2 + phi1 * phi1 + radial)
}

/// The smooth radial bump conductivity with amplitude `α` and support `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothBump {
    alpha: f64,
    d: f64,
}

impl SmoothBump {
    pub fn new(alpha: f64, d: f64) -> Result<Self, PhantomError> {
        if !alpha.is_finite() || alpha <= -1.0 {
            return Err(PhantomError::InvalidAlpha(alpha));
        }
        if !(d > 0.0 && d <= 1.0) {
            return Err(PhantomError::InvalidSupport(d));
        }
        Ok(Self { alpha, d })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn support(&self) -> f64 {
        self.d
    }

    /// `√γ(r) = αΨ(r) + 1`.
    pub fn sqrt_gamma(&self, r: f64) -> f64 {
        self.alpha * psi(r, self.d) + 1.0
    }

    pub fn gamma(&self, r: f64) -> f64 {
        let s = self.sqrt_gamma(r);
        s * s
    }

    pub fn gamma_prime(&self, r: f64) -> f64 {
        2.0 * self.sqrt_gamma(r) * self.alpha * psi_prime(r, self.d)
    }

    /// Schrödinger potential `q(r) = αΔΨ/(1 + αΨ)`.
    pub fn q(&self, r: f64) -> f64 {
        if r.abs() >= self.d || self.alpha == 0.0 {
            return 0.0;
        }
        self.alpha * laplacian_psi(r, self.d) / self.sqrt_gamma(r)
    }

    /// `q(|x|)` at each node of the periodic grid; zero outside the support.
    pub fn sample_q_on_cube(&self, grid: &Grid3) -> Vec<Complex64> {
        (0..grid.len())
            .map(|idx| {
                let x = grid.position(idx);
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                Complex64::new(self.q(r), 0.0)
            })
            .collect()
    }
}

/// Piecewise-constant conductivity on concentric shells.
///
/// `radii = [r₁ < … < r_{N-1}]` partition `[0, 1]` into `N` shells; `values[j]`
/// is the conductivity on the `j`-th shell counted from the centre. The last
/// value must be 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellPhantom {
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl ShellPhantom {
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self, PhantomError> {
        let increasing = radii.windows(2).all(|w| w[0] < w[1]);
        let inside = radii.iter().all(|&r| r > 0.0 && r < 1.0);
        if !increasing || !inside {
            return Err(PhantomError::InvalidRadii);
        }
        if values.len() != radii.len() + 1 {
            return Err(PhantomError::ShellCount {
                expected: radii.len() + 1,
                found: values.len(),
            });
        }
        if values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(PhantomError::NonPositiveConductivity);
        }
        let last = *values.last().expect("at least one shell");
        if last != 1.0 {
            return Err(PhantomError::BoundaryValue(last));
        }
        Ok(Self { radii, values })
    }

    /// The homogeneous unit conductivity as a single shell.
    pub fn constant() -> Self {
        Self {
            radii: Vec::new(),
            values: vec![1.0],
        }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shell_count(&self) -> usize {
        self.values.len()
    }

    /// Conductivity at radius `r` (shells are closed on the inside).
    pub fn gamma(&self, r: f64) -> f64 {
        let j = self.radii.partition_point(|&b| b <= r);
        self.values[j]
    }
}

/// Samples of a radial function on nodes in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialProfile {
    /// `m` equispaced nodes `0, 1/(m-1), …, 1`.
    pub fn uniform_nodes(m: usize) -> Result<Vec<f64>, PhantomError> {
        if m < 2 {
            return Err(PhantomError::TooFewNodes);
        }
        Ok((0..m).map(|i| i as f64 / (m - 1) as f64).collect())
    }

    pub fn from_fn(r: Vec<f64>, f: impl Fn(f64) -> f64) -> Self {
        let values = r.iter().map(|&x| f(x)).collect();
        Self { r, values }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `max_i |a_i - b_i| / max_i |b_i|`.
    pub fn sup_relative_error(&self, truth: &RadialProfile) -> f64 {
        let num = self
            .values
            .iter()
            .zip(&truth.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let den = truth.values.iter().map(|b| b.abs()).fold(0.0, f64::max);
        num / den
    }
}
