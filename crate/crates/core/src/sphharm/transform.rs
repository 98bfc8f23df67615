//! Discrete spherical-harmonic transform on the equiangular grid.
//!
//! The grid has `2B` colatitudes `θ_j = π(2j+1)/(4B)` and `2B` longitudes
//! `φ_k = πk/B`. With the Driscoll–Healy weights
//! `w_j = (2/B) sin θ_j Σ_{k<B} sin((2k+1)θ_j)/(2k+1)` the quadrature
//! `Σ_{j,k} (π/B) w_j f(θ_j, φ_k)` integrates band-limited functions of degree
//! below `2B` exactly, so the forward transform recovers every coefficient of
//! degree `l < B`. The transform is separable: a Fourier sum along each
//! latitude row followed by a Legendre sum in `θ`.

use num_complex::{Complex, Complex64};
use rayon::prelude::*;

use super::{lm_index, normalized_legendre, HarmonicCoeffs, ShtError};
use crate::numeric::Real;

/// Equiangular grid of bandwidth `B` on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphereGrid {
    bandwidth: usize,
}

impl SphereGrid {
    pub fn new(bandwidth: usize) -> Result<Self, ShtError> {
        if bandwidth == 0 {
            return Err(ShtError::ZeroBandwidth);
        }
        Ok(Self { bandwidth })
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn n_theta(&self) -> usize {
        2 * self.bandwidth
    }

    pub fn n_phi(&self) -> usize {
        2 * self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn theta(&self, j: usize) -> f64 {
        std::f64::consts::PI * (2 * j + 1) as f64 / (4 * self.bandwidth) as f64
    }

    pub fn phi(&self, k: usize) -> f64 {
        std::f64::consts::PI * k as f64 / self.bandwidth as f64
    }

    /// Unit vector of node `(j, k)`.
    pub fn point(&self, j: usize, k: usize) -> [f64; 3] {
        let (st, ct) = self.theta(j).sin_cos();
        let (sp, cp) = self.phi(k).sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Precomputed tables for transforms up to degree `lmax` in scalar type `T`.
///
/// Plans are immutable once built and may be shared between threads.
#[derive(Debug, Clone)]
pub struct ShtPlan<T: Real> {
    grid: SphereGrid,
    lmax: usize,
    cos_theta: Vec<T>,
    sin_theta: Vec<T>,
    cos_phi: Vec<T>,
    sin_phi: Vec<T>,
    /// Area weights including the longitude spacing `π/B`.
    weights: Vec<T>,
    /// Row-major `[j][l(l+1)/2 + m]`, `m ≥ 0`.
    legendre: Vec<T>,
    /// `e^{2πi n/(2B)}` for `n < 2B`.
    twiddle: Vec<Complex<T>>,
}

fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl<T: Real> ShtPlan<T> {
    pub fn new(bandwidth: usize, lmax: usize) -> Result<Self, ShtError> {
        let grid = SphereGrid::new(bandwidth)?;
        if lmax >= bandwidth {
            return Err(ShtError::DegreeTooLarge { lmax, bandwidth });
        }
        let b = bandwidth;
        let pi = T::pi();
        let nt = grid.n_theta();
        let np = grid.n_phi();
        let mut cos_theta = Vec::with_capacity(nt);
        let mut sin_theta = Vec::with_capacity(nt);
        let mut weights = Vec::with_capacity(nt);
        let dphi = pi / T::from_f64(b as f64);
        for j in 0..nt {
            let theta = pi * T::from_f64((2 * j + 1) as f64) / T::from_f64((4 * b) as f64);
            let (s, c) = theta.sin_cos();
            let mut acc = T::zero();
            for k in 0..b {
                let odd = T::from_f64((2 * k + 1) as f64);
                acc = acc + (odd * theta).sin_cos().0 / odd;
            }
            weights.push(T::from_f64(2.0) / T::from_f64(b as f64) * s * acc * dphi);
            cos_theta.push(c);
            sin_theta.push(s);
        }
        let mut cos_phi = Vec::with_capacity(np);
        let mut sin_phi = Vec::with_capacity(np);
        let mut twiddle = Vec::with_capacity(np);
        for k in 0..np {
            let (s, c) = (dphi * T::from_f64(k as f64)).sin_cos();
            cos_phi.push(c);
            sin_phi.push(s);
            twiddle.push(Complex::new(c, s));
        }
        let ntri = tri(lmax, lmax) + 1;
        let mut legendre = Vec::with_capacity(nt * ntri);
        for j in 0..nt {
            legendre.extend(normalized_legendre(lmax, cos_theta[j], sin_theta[j]));
        }
        Ok(Self {
            grid,
            lmax,
            cos_theta,
            sin_theta,
            cos_phi,
            sin_phi,
            weights,
            legendre,
            twiddle,
        })
    }

    pub fn grid(&self) -> SphereGrid {
        self.grid
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn n_coeffs(&self) -> usize {
        (self.lmax + 1) * (self.lmax + 1)
    }

    /// Quadrature weight of node `(j, ·)` (the same for every longitude).
    pub fn weight(&self, j: usize) -> T {
        self.weights[j]
    }

    /// Unit vector of node `(j, k)` in the plan's precision.
    pub fn point(&self, j: usize, k: usize) -> [T; 3] {
        let st = self.sin_theta[j];
        [st * self.cos_phi[k], st * self.sin_phi[k], self.cos_theta[j]]
    }

    fn legendre_row(&self, j: usize) -> &[T] {
        let ntri = tri(self.lmax, self.lmax) + 1;
        &self.legendre[j * ntri..(j + 1) * ntri]
    }

    /// `c_lm = ∫ f Y*_lm dσ` for samples stored row-major in `(θ_j, φ_k)`.
    pub fn forward(&self, samples: &[Complex<T>]) -> Result<Vec<Complex<T>>, ShtError> {
        let nt = self.grid.n_theta();
        let np = self.grid.n_phi();
        if samples.len() != nt * np {
            return Err(ShtError::SampleCount {
                expected: nt * np,
                found: samples.len(),
            });
        }
        let lmax = self.lmax as i64;
        let nm = (2 * lmax + 1) as usize;
        // Fourier coefficients per latitude row, m = -lmax..=lmax.
        let rows: Vec<Vec<Complex<T>>> = (0..nt)
            .into_par_iter()
            .map(|j| {
                let row = &samples[j * np..(j + 1) * np];
                (-lmax..=lmax)
                    .map(|m| {
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for (k, &f) in row.iter().enumerate() {
                            let n = (m * k as i64).rem_euclid(np as i64) as usize;
                            acc = acc + f * self.twiddle[n].conj();
                        }
                        acc * self.weights[j]
                    })
                    .collect()
            })
            .collect();
        let per_m: Vec<Vec<Complex<T>>> = (0..nm)
            .into_par_iter()
            .map(|mi| {
                let m = mi as i64 - lmax;
                let ma = m.unsigned_abs() as usize;
                let sign = if m < 0 && ma % 2 == 1 { -T::one() } else { T::one() };
                (ma..=self.lmax)
                    .map(|l| {
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for (j, row) in rows.iter().enumerate() {
                            acc = acc + row[mi] * self.legendre_row(j)[tri(l, ma)];
                        }
                        acc * sign
                    })
                    .collect()
            })
            .collect();
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.n_coeffs()];
        for (mi, col) in per_m.into_iter().enumerate() {
            let m = mi as i64 - lmax;
            let ma = m.unsigned_abs() as usize;
            for (offset, v) in col.into_iter().enumerate() {
                out[lm_index(ma + offset, m)] = v;
            }
        }
        Ok(out)
    }

    /// Evaluates `Σ c_lm Y_lm` on the grid.
    pub fn inverse(&self, coeffs: &[Complex<T>]) -> Result<Vec<Complex<T>>, ShtError> {
        if coeffs.len() != self.n_coeffs() {
            return Err(ShtError::SampleCount {
                expected: self.n_coeffs(),
                found: coeffs.len(),
            });
        }
        let nt = self.grid.n_theta();
        let np = self.grid.n_phi();
        let lmax = self.lmax as i64;
        let rows: Vec<Vec<Complex<T>>> = (0..nt)
            .into_par_iter()
            .map(|j| {
                let leg = self.legendre_row(j);
                let g: Vec<Complex<T>> = (-lmax..=lmax)
                    .map(|m| {
                        let ma = m.unsigned_abs() as usize;
                        let sign = if m < 0 && ma % 2 == 1 { -T::one() } else { T::one() };
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for l in ma..=self.lmax {
                            acc = acc + coeffs[lm_index(l, m)] * leg[tri(l, ma)];
                        }
                        acc * sign
                    })
                    .collect();
                (0..np)
                    .map(|k| {
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for (mi, &gm) in g.iter().enumerate() {
                            let m = mi as i64 - lmax;
                            let n = (m * k as i64).rem_euclid(np as i64) as usize;
                            acc = acc + gm * self.twiddle[n];
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(rows.into_iter().flatten().collect())
    }
}

/// Forward transform of double-precision samples.
pub fn sht_forward(plan: &ShtPlan<f64>, samples: &[Complex64]) -> Result<HarmonicCoeffs, ShtError> {
    HarmonicCoeffs::from_vec(plan.forward(samples)?)
}

/// Inverse transform to double-precision samples.
pub fn sht_inverse(plan: &ShtPlan<f64>, coeffs: &HarmonicCoeffs) -> Result<Vec<Complex64>, ShtError> {
    if coeffs.lmax() != plan.lmax() {
        return Err(ShtError::CoefficientDegree {
            expected: plan.lmax(),
            found: coeffs.lmax(),
        });
    }
    plan.inverse(coeffs.as_slice())
}
