//! Dirichlet-to-Neumann eigenvalues of radial conductivities.
//!
//! For a radial `γ` with `γ = 1` near the boundary, the DN map is diagonal in
//! spherical harmonics: `Λ_γ Y_lm = λ_l Y_lm`, with `λ_l = l` for `γ ≡ 1`.
//! Piecewise-constant conductivities are handled exactly by propagating the
//! coefficient ratio of the two radial solutions `r^l` and `r^{-(l+1)}` outward
//! shell by shell. The ratio is kept in projective form so that the infinite
//! value in the innermost shell needs no special casing.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::phantom::ShellPhantom;
use crate::sphharm::HarmonicCoeffs;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DnError {
    #[error("conductivity must be positive, found {0} at r = {1}")]
    NonPositive(f64, f64),
    #[error("the outermost staircase shell must equal 1 (found {0}); the conductivity is not 1 near the boundary")]
    NotUnitAtBoundary(f64),
    #[error("a staircase needs at least two shells, got {0}")]
    TooFewShells(usize),
    #[error("linear system for the shell coefficients is singular")]
    Singular,
    #[error("harmonic degree {requested} exceeds the spectrum length {available}")]
    DegreeOutOfRange { requested: usize, available: usize },
    #[error("non-finite value encountered while integrating the radial equation")]
    NonFinite,
}

/// A ratio `num/den` where `den = 0` encodes infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveRatio {
    pub num: f64,
    pub den: f64,
}

impl ProjectiveRatio {
    pub const INFINITY: Self = Self { num: 1.0, den: 0.0 };

    fn normalized(num: f64, den: f64) -> Self {
        let s = num.abs().max(den.abs());
        if s == 0.0 || !s.is_finite() {
            Self { num, den }
        } else {
            Self {
                num: num / s,
                den: den / s,
            }
        }
    }
}

/// Eigenvalue of the unit conductivity.
pub fn eigen_constant(l: usize) -> f64 {
    l as f64
}

/// `λ_l` for a layered conductivity by the outward ratio recursion.
///
/// Inside shell `j` the radial factor is `A_j r^l + B_j r^{-(l+1)}` with
/// `B_1 = 0`. The recursion tracks `D_j = (A_{j+1}/B_{j+1}) r_j^{2l+1}`, which
/// stays bounded where the raw ratio would overflow.
pub fn eigen_shells(phantom: &ShellPhantom, l: usize) -> f64 {
    if l == 0 {
        return 0.0;
    }
    let radii = phantom.radii();
    let gamma = phantom.values();
    let lf = l as f64;
    let beta = (lf + 1.0) / lf;
    let p = 2 * l as i32 + 1;
    let mut d = ProjectiveRatio::INFINITY;
    for j in 0..radii.len() {
        // shrink = (r_{j-1}/r_j)^{2l+1}, zero for the innermost interface.
        let shrink = if j == 0 {
            0.0
        } else {
            (radii[j - 1] / radii[j]).powi(p)
        };
        let rho_n = d.num + d.den * shrink;
        let rho_d = d.num - beta * d.den * shrink;
        let (g_in, g_out) = (gamma[j], gamma[j + 1]);
        d = ProjectiveRatio::normalized(
            beta * g_out * rho_n + g_in * rho_d,
            g_out * rho_n - g_in * rho_d,
        );
    }
    match radii.last() {
        None => lf,
        Some(&r_last) => {
            let s = r_last.powi(p);
            lf - (2.0 * lf + 1.0) * d.den * s / (d.den * s + d.num)
        }
    }
}

/// `λ_l` for a layered conductivity from the dense interface system.
///
/// Independent of [`eigen_shells`]: all continuity and flux conditions are
/// assembled into one matrix and solved with partial-pivoting LU.
pub fn eigen_shells_oracle(phantom: &ShellPhantom, l: usize) -> Result<f64, DnError> {
    let radii = phantom.radii();
    let gamma = phantom.values();
    let n = gamma.len();
    let lf = l as f64;
    let p = 2 * l as i32 + 1;
    // Unknowns: A_1..A_N at 0..N, scaled B̃_2..B̃_N at N..2N-1, where
    // B_j = B̃_j r_{j-1}^{2l+1}.
    let size = 2 * n - 1;
    let b_idx = |j: usize| n + j - 1;
    let mut m = DMatrix::<f64>::zeros(size, size);
    let mut rhs = DVector::<f64>::zeros(size);
    for j in 0..n - 1 {
        let shrink = if j == 0 {
            0.0
        } else {
            (radii[j - 1] / radii[j]).powi(p)
        };
        let row_c = 2 * j;
        let row_f = 2 * j + 1;
        m[(row_c, j)] = 1.0;
        m[(row_c, j + 1)] = -1.0;
        m[(row_c, b_idx(j + 1))] = -1.0;
        m[(row_f, j)] = gamma[j] * lf;
        m[(row_f, j + 1)] = -gamma[j + 1] * lf;
        m[(row_f, b_idx(j + 1))] = gamma[j + 1] * (lf + 1.0);
        if j > 0 {
            m[(row_c, b_idx(j))] = shrink;
            m[(row_f, b_idx(j))] = -gamma[j] * (lf + 1.0) * shrink;
        }
    }
    let last = size - 1;
    let outer = radii.last().map_or(0.0, |r| r.powi(p));
    m[(last, n - 1)] = 1.0;
    if n > 1 {
        m[(last, b_idx(n - 1))] = outer;
    }
    rhs[last] = 1.0;
    let sol = m.lu().solve(&rhs).ok_or(DnError::Singular)?;
    let a_n = sol[n - 1];
    let b_n = if n > 1 { sol[b_idx(n - 1)] * outer } else { 0.0 };
    Ok(lf * a_n - (lf + 1.0) * b_n)
}

/// Which staircase approximation of a smooth profile to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Staircase {
    /// Value at the shell midpoint.
    Midpoint,
    /// Infimum over the shell.
    Lower,
    /// Supremum over the shell.
    Upper,
}

/// Samples per shell used to estimate the infimum and supremum.
const ENVELOPE_SAMPLES: usize = 16;

/// `M`-shell staircase of `γ` on the uniform partition of `[0, 1]`.
pub fn staircase(
    gamma: &dyn Fn(f64) -> f64,
    shells: usize,
    kind: Staircase,
) -> Result<ShellPhantom, DnError> {
    if shells < 2 {
        return Err(DnError::TooFewShells(shells));
    }
    let h = 1.0 / shells as f64;
    let mut values = Vec::with_capacity(shells);
    for j in 0..shells {
        let a = j as f64 * h;
        let v = match kind {
            Staircase::Midpoint => gamma(a + 0.5 * h),
            Staircase::Lower | Staircase::Upper => {
                let samples = (0..=ENVELOPE_SAMPLES)
                    .map(|k| gamma(a + h * k as f64 / ENVELOPE_SAMPLES as f64));
                if kind == Staircase::Lower {
                    samples.fold(f64::INFINITY, f64::min)
                } else {
                    samples.fold(f64::NEG_INFINITY, f64::max)
                }
            }
        };
        if !(v > 0.0 && v.is_finite()) {
            return Err(DnError::NonPositive(v, a + 0.5 * h));
        }
        values.push(v);
    }
    let last = *values.last().expect("non-empty");
    if last != 1.0 {
        return Err(DnError::NotUnitAtBoundary(last));
    }
    let radii = (1..shells).map(|j| j as f64 * h).collect();
    ShellPhantom::new(radii, values).map_err(|_| DnError::NotUnitAtBoundary(last))
}

/// `λ_l` of a smooth radial conductivity through its midpoint staircase.
pub fn eigen_smooth(gamma: &dyn Fn(f64) -> f64, l: usize, shells: usize) -> Result<f64, DnError> {
    Ok(eigen_shells(&staircase(gamma, shells, Staircase::Midpoint)?, l))
}

/// `(λ_l^L, λ_l^U)` from the infimum and supremum staircases.
///
/// The DN eigenvalues are monotone in `γ`, so the pair brackets `λ_l(γ)`.
pub fn eigen_bounds(
    gamma: &dyn Fn(f64) -> f64,
    l: usize,
    shells: usize,
) -> Result<(f64, f64), DnError> {
    let lower = staircase(gamma, shells, Staircase::Lower)?;
    let upper = staircase(gamma, shells, Staircase::Upper)?;
    Ok((eigen_shells(&lower, l), eigen_shells(&upper, l)))
}

/// Configuration of the shooting oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeConfig {
    pub r0: f64,
    pub step: f64,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self {
            r0: 1e-4,
            step: 1e-4,
        }
    }
}

/// `λ_l` by integrating `γr²R'' + (2rγ + r²γ')R' - l(l+1)γR = 0` with RK4.
///
/// The regular solution is started as `r^l` (rescaled to unit size) and the
/// eigenvalue is read off as `R'(1)/R(1)`.
pub fn eigen_ode(
    gamma: &dyn Fn(f64) -> f64,
    gamma_prime: &dyn Fn(f64) -> f64,
    l: usize,
    config: OdeConfig,
) -> Result<f64, DnError> {
    let lf = l as f64;
    let ll1 = lf * (lf + 1.0);
    let rhs = |r: f64, y: [f64; 2]| -> [f64; 2] {
        let g = gamma(r);
        let gp = gamma_prime(r);
        let acc = (ll1 * g * y[0] - (2.0 * r * g + r * r * gp) * y[1]) / (g * r * r);
        [y[1], acc]
    };
    let steps = ((1.0 - config.r0) / config.step).round() as usize;
    let h = (1.0 - config.r0) / steps as f64;
    let mut y = [1.0, lf / config.r0];
    let mut r = config.r0;
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
        if !s.is_finite() {
            return Err(DnError::NonFinite);
        }
        if !(1e-100..=1e100).contains(&s) {
            y = [y[0] / s, y[1] / s];
        }
    }
    Ok(gamma(1.0) * y[1] / y[0])
}

/// DN eigenvalues `λ_0, …, λ_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct DnSpectrum {
    lambdas: Vec<f64>,
}

impl DnSpectrum {
    pub fn new(lambdas: Vec<f64>) -> Self {
        Self { lambdas }
    }

    pub fn constant(lmax: usize) -> Self {
        Self::new((0..=lmax).map(eigen_constant).collect())
    }

    pub fn from_shells(phantom: &ShellPhantom, lmax: usize) -> Self {
        Self::new((0..=lmax).map(|l| eigen_shells(phantom, l)).collect())
    }

    /// Midpoint-staircase spectrum of a smooth profile.
    pub fn from_smooth(
        gamma: &dyn Fn(f64) -> f64,
        lmax: usize,
        shells: usize,
    ) -> Result<Self, DnError> {
        let stairs = staircase(gamma, shells, Staircase::Midpoint)?;
        Ok(Self::from_shells(&stairs, lmax))
    }

    pub fn lmax(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn lambda(&self, l: usize) -> Result<f64, DnError> {
        self.lambdas
            .get(l)
            .copied()
            .ok_or(DnError::DegreeOutOfRange {
                requested: l,
                available: self.lambdas.len(),
            })
    }

    /// `λ_l - l`, the part of the spectrum carrying information about `γ - 1`.
    pub fn excess(&self, l: usize) -> Result<f64, DnError> {
        Ok(self.lambda(l)? - l as f64)
    }
}

/// Applies `Λ_γ - Λ_1` to spherical-harmonic coefficients.
pub fn apply_dn_minus_free(
    spectrum: &DnSpectrum,
    coeffs: &HarmonicCoeffs,
) -> Result<HarmonicCoeffs, DnError> {
    let lmax = coeffs.lmax();
    if lmax > spectrum.lmax() {
        return Err(DnError::DegreeOutOfRange {
            requested: lmax,
            available: spectrum.lambdas.len(),
        });
    }
    let mut out = coeffs.clone();
    for l in 0..=lmax {
        let e = spectrum.excess(l)?;
        for m in -(l as i64)..=(l as i64) {
            let c = out.get(l, m);
            out.set(l, m, c * e);
        }
    }
    Ok(out)
}
