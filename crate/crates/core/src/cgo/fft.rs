//! Three-dimensional FFTs built from one-dimensional passes.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{CgoError, Grid3};

/// Forward and inverse plans for an `n³` grid.
///
/// The forward transform is unnormalised; the inverse divides by `n³`, so
/// `inverse(forward(x)) = x`.
#[derive(Clone)]
pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    pub fn new(grid: &Grid3) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    fn check(&self, data: &[Complex64]) -> Result<(), CgoError> {
        let expected = self.n * self.n * self.n;
        if data.len() != expected {
            return Err(CgoError::SizeMismatch {
                expected,
                found: data.len(),
            });
        }
        Ok(())
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        // Last axis is contiguous.
        fft.process_with_scratch(data, &mut scratch);
        let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
        for stride in [n, n * n] {
            let bases = (0..n * n).map(|t| {
                if stride == n {
                    (t / n) * n * n + t % n
                } else {
                    t
                }
            });
            let bases: Vec<usize> = bases.collect();
            for (line, &base) in bases.iter().enumerate() {
                for k in 0..n {
                    lines[line * n + k] = data[base + k * stride];
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            for (line, &base) in bases.iter().enumerate() {
                for k in 0..n {
                    data[base + k * stride] = lines[line * n + k];
                }
            }
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) -> Result<(), CgoError> {
        self.check(data)?;
        self.transform(data, &self.forward);
        Ok(())
    }

    pub fn inverse(&self, data: &mut [Complex64]) -> Result<(), CgoError> {
        self.check(data)?;
        self.transform(data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
        Ok(())
    }
}

/// `h³ · IFFT(ĝ ⊙ FFT(φ))`, the quadrature of the periodic convolution `g * φ`.
pub fn periodic_convolve(
    fft: &Fft3,
    g_hat: &[Complex64],
    phi: &[Complex64],
    grid: &Grid3,
) -> Result<Vec<Complex64>, CgoError> {
    if g_hat.len() != grid.len() || phi.len() != grid.len() {
        return Err(CgoError::SizeMismatch {
            expected: grid.len(),
            found: if g_hat.len() != grid.len() {
                g_hat.len()
            } else {
                phi.len()
            },
        });
    }
    let mut work = phi.to_vec();
    fft.forward(&mut work)?;
    for (w, g) in work.iter_mut().zip(g_hat) {
        *w *= g;
    }
    fft.inverse(&mut work)?;
    let h3 = grid.h().powi(3);
    for w in work.iter_mut() {
        *w *= h3;
    }
    Ok(work)
}
