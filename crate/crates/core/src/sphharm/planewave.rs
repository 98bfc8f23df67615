//! Harmonic coefficients of exponentials `e^{i x·w}` restricted to the sphere.
//!
//! For `|Im w|` of a few tens the samples grow like `e^{|Im w|}` while the
//! low-degree coefficients of interest stay of order one, so the transform is
//! usually run in double-double precision.

use num_complex::{Complex, Complex64};

use super::{HarmonicCoeffs, ShtPlan};
use crate::geometry::{add, ComplexFrequency, Vec3, Xi};
use crate::numeric::Real;

/// Coefficients of a sampled exponential together with sampling diagnostics.
#[derive(Debug, Clone)]
pub struct PlaneWaveExpansion<T: Real> {
    coeffs: Vec<Complex<T>>,
    lmax: usize,
    overflow: bool,
    max_abs_sample: f64,
    abs_mass: f64,
}

impl<T: Real> PlaneWaveExpansion<T> {
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    /// True if any sample overflowed; the coefficients are then meaningless.
    pub fn overflow(&self) -> bool {
        self.overflow
    }

    pub fn max_abs_sample(&self) -> f64 {
        self.max_abs_sample
    }

    /// Quadrature approximation of `∫ |e^{i x·w}| dσ`.
    pub fn abs_mass(&self) -> f64 {
        self.abs_mass
    }

    pub fn to_harmonic(&self) -> HarmonicCoeffs {
        let data = self
            .coeffs
            .iter()
            .map(|c| Complex64::new(c.re.to_f64(), c.im.to_f64()))
            .collect();
        HarmonicCoeffs::from_vec(data).expect("square coefficient count")
    }

    fn conj(mut self) -> Self {
        for c in &mut self.coeffs {
            *c = c.conj();
        }
        self
    }
}

/// Coefficients `∫ e^{i x·w} Y*_lm dσ` with `w = w_re + i w_im`.
pub fn expansion_of_exponential<T: Real>(
    plan: &ShtPlan<T>,
    w_re: Vec3,
    w_im: Vec3,
) -> PlaneWaveExpansion<T> {
    let grid = plan.grid();
    let wr = w_re.map(T::from_f64);
    let wi = w_im.map(T::from_f64);
    let mut samples = Vec::with_capacity(grid.len());
    let mut overflow = false;
    let mut max_abs = 0.0f64;
    let mut mass = 0.0f64;
    for j in 0..grid.n_theta() {
        let w = plan.weight(j).to_f64();
        for k in 0..grid.n_phi() {
            let x = plan.point(j, k);
            let phase = x[0] * wr[0] + x[1] * wr[1] + x[2] * wr[2];
            let growth = -(x[0] * wi[0] + x[1] * wi[1] + x[2] * wi[2]);
            let modulus = growth.exp();
            let (s, c) = phase.sin_cos();
            let m = modulus.to_f64();
            if !modulus.is_finite() {
                overflow = true;
            }
            max_abs = max_abs.max(m);
            mass += w * m;
            samples.push(Complex::new(modulus * c, modulus * s));
        }
    }
    let coeffs = plan
        .forward(&samples)
        .expect("sample count matches the plan grid");
    PlaneWaveExpansion {
        coeffs,
        lmax: plan.lmax(),
        overflow,
        max_abs_sample: max_abs,
        abs_mass: mass,
    }
}

/// `b_lm = ∫ e^{i x·ζ} Y*_lm dσ`.
pub fn planewave_coeffs<T: Real>(plan: &ShtPlan<T>, zeta: &ComplexFrequency) -> PlaneWaveExpansion<T> {
    expansion_of_exponential(plan, zeta.re, zeta.im)
}

/// `a*_lm = ∫ e^{-i x·(ξ+ζ)} Y_lm dσ`.
///
/// Computed as the conjugate of the forward transform of
/// `conj(e^{-i x·(ξ+ζ)}) = e^{i x·(ξ + ζ_R - iζ_I)}`.
pub fn conj_pair_coeffs<T: Real>(
    plan: &ShtPlan<T>,
    xi: &Xi,
    zeta: &ComplexFrequency,
) -> PlaneWaveExpansion<T> {
    let w_re = add(xi.vector(), zeta.re);
    let w_im = zeta.im.map(|c| -c);
    expansion_of_exponential(plan, w_re, w_im).conj()
}
