//! Spherical harmonics on the unit sphere.
//!
//! Conventions: `Y_lm(θ, φ) = N_lm P_l^m(cos θ) e^{imφ}` with the
//! Condon–Shortley phase, orthonormal in `L²(S²)`, and
//! `Y_{l,-m} = (-1)^m conj(Y_lm)`. Coefficients are stored densely with
//! `(l, m)` at index `l² + l + m`.

mod planewave;
mod transform;

use num_complex::Complex64;
use thiserror::Error;

pub use planewave::{conj_pair_coeffs, expansion_of_exponential, planewave_coeffs, PlaneWaveExpansion};
pub use transform::{sht_forward, sht_inverse, ShtPlan, SphereGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShtError {
    #[error("invalid harmonic index: l = {l}, m = {m}")]
    InvalidIndex { l: usize, m: i64 },
    #[error("bandwidth must be at least 1")]
    ZeroBandwidth,
    #[error("degree {lmax} cannot be resolved with bandwidth {bandwidth} (need lmax < bandwidth)")]
    DegreeTooLarge { lmax: usize, bandwidth: usize },
    #[error("expected {expected} samples, found {found}")]
    SampleCount { expected: usize, found: usize },
    #[error("coefficient vector has degree {found}, plan expects {expected}")]
    CoefficientDegree { expected: usize, found: usize },
}

/// Dense table of spherical-harmonic coefficients up to degree `lmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoeffs {
    lmax: usize,
    data: Vec<Complex64>,
}

impl HarmonicCoeffs {
    pub fn zeros(lmax: usize) -> Self {
        Self {
            lmax,
            data: vec![Complex64::new(0.0, 0.0); (lmax + 1) * (lmax + 1)],
        }
    }

    /// Wraps a coefficient vector of length `(lmax+1)²`.
    pub fn from_vec(data: Vec<Complex64>) -> Result<Self, ShtError> {
        let lmax = (data.len() as f64).sqrt().round() as usize;
        if lmax == 0 || lmax * lmax != data.len() {
            return Err(ShtError::CoefficientDegree {
                expected: lmax.saturating_sub(1),
                found: data.len(),
            });
        }
        Ok(Self {
            lmax: lmax - 1,
            data,
        })
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        self.data[lm_index(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, value: Complex64) {
        self.data[lm_index(l, m)] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Euclidean norm of the degree-`l` block.
    pub fn degree_norm(&self, l: usize) -> f64 {
        (-(l as i64)..=l as i64)
            .map(|m| self.get(l, m).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Dense index of `(l, m)`.
#[inline]
pub fn lm_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Normalised associated Legendre values `N_lm P_l^m(cos θ)` for `m ≥ 0`.
///
/// Returns a table indexed by `l(l+1)/2 + m`, computed with the standard
/// stable three-term recurrences in degree.
pub(crate) fn normalized_legendre<T: crate::numeric::Real>(lmax: usize, cos_t: T, sin_t: T) -> Vec<T> {
    let tri = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut p = vec![T::zero(); (lmax + 1) * (lmax + 2) / 2];
    let four_pi = T::from_f64(4.0) * T::pi();
    p[0] = T::one() / four_pi.sqrt();
    for m in 1..=lmax {
        let f = (T::from_f64((2 * m + 1) as f64) / T::from_f64((2 * m) as f64)).sqrt();
        p[tri(m, m)] = -(f * sin_t * p[tri(m - 1, m - 1)]);
    }
    for m in 0..lmax {
        let f = T::from_f64((2 * m + 3) as f64).sqrt();
        p[tri(m + 1, m)] = f * cos_t * p[tri(m, m)];
    }
    for m in 0..=lmax {
        for l in (m + 2)..=lmax {
            let l2 = (l * l) as f64;
            let m2 = (m * m) as f64;
            let a = (T::from_f64(4.0 * l2 - 1.0) / T::from_f64(l2 - m2)).sqrt();
            let lm1 = ((l - 1) * (l - 1)) as f64;
            let b = (T::from_f64(lm1 - m2) / T::from_f64(4.0 * lm1 - 1.0)).sqrt();
            p[tri(l, m)] = a * (cos_t * p[tri(l - 1, m)] - b * p[tri(l - 2, m)]);
        }
    }
    p
}

/// `Y_lm(θ, φ)`.
pub fn ylm(l: usize, m: i64, theta: f64, phi: f64) -> Result<Complex64, ShtError> {
    if m.unsigned_abs() as usize > l {
        return Err(ShtError::InvalidIndex { l, m });
    }
    let ma = m.unsigned_abs() as usize;
    let table = normalized_legendre(l, theta.cos(), theta.sin());
    let p = table[l * (l + 1) / 2 + ma];
    let phase = Complex64::from_polar(1.0, ma as f64 * phi);
    let y = phase * p;
    if m < 0 {
        let sign = if ma % 2 == 0 { 1.0 } else { -1.0 };
        Ok(y.conj() * sign)
    } else {
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn low_degree_closed_forms() {
        let (t, p) = (0.7, 1.1);
        let y00 = ylm(0, 0, t, p).unwrap();
        assert!((y00.re - 0.5 / PI.sqrt()).abs() < 1e-15);
        let y10 = ylm(1, 0, t, p).unwrap();
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt() * t.cos()).abs() < 1e-15);
        let y11 = ylm(1, 1, t, p).unwrap();
        let expect = Complex64::from_polar(-(3.0 / (8.0 * PI)).sqrt() * t.sin(), p);
        assert!((y11 - expect).norm() < 1e-15);
        let y1m1 = ylm(1, -1, t, p).unwrap();
        assert!((y1m1 + y11.conj()).norm() < 1e-15);
        let y22 = ylm(2, 2, t, p).unwrap();
        let expect = Complex64::from_polar(0.25 * (15.0 / (2.0 * PI)).sqrt() * t.sin().powi(2), 2.0 * p);
        assert!((y22 - expect).norm() < 1e-15);
    }

    #[test]
    fn invalid_index() {
        assert!(ylm(2, 3, 0.1, 0.2).is_err());
    }

    #[test]
    fn coefficient_indexing() {
        let mut c = HarmonicCoeffs::zeros(3);
        c.set(2, -1, Complex64::new(1.0, 2.0));
        assert_eq!(lm_index(2, -1), 5);
        assert_eq!(c.as_slice()[5], Complex64::new(1.0, 2.0));
        assert_eq!(c.get(2, -1), Complex64::new(1.0, 2.0));
    }
}
