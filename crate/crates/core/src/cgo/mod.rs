//! Complex geometrical optics solutions by periodic collocation.
//!
//! The normalised CGO solution `μ = e^{-ix·ζ}ψ` solves the Faddeev–Lippmann–
//! Schwinger equation `μ + g_ζ * (qμ) = 1`. Because `q` vanishes outside the
//! unit ball, only differences `x - y ∈ [-2, 2]³` enter, and the convolution is
//! replaced by a cyclic one on the period cube `[-2, 2)³`. The discrete system
//! `μ_N + h³ g_N ⊛ (q_N μ_N) = 1` is diagonalised by the FFT and solved with
//! GMRES.

mod fft;
mod gmres;
mod grid;

use num_complex::Complex64;
use thiserror::Error;

pub use fft::{periodic_convolve, Fft3};
pub use gmres::{gmres, GmresConfig, GmresResult};
pub use grid::{Grid3, PERIOD};

use crate::faddeev::{sample_g_periodic, FaddeevError, GreenEvalConfig, KernelSupport};
use crate::geometry::{ComplexFrequency, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CgoError {
    #[error("grid size {0} must be a power of two and at least 4")]
    InvalidGrid(usize),
    #[error("field has {found} entries, expected {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("GMRES did not reach the tolerance after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        residual_history: Vec<f64>,
    },
    #[error(transparent)]
    Green(#[from] FaddeevError),
}

/// The discretised operator `φ ↦ φ + h³ g_N ⊛ (q φ)` for one `ζ`.
///
/// Building it samples `g_ζ` on the grid and transforms it once; the problem
/// can then be solved for any potential on the same grid.
#[derive(Debug, Clone)]
pub struct CgoProblem {
    grid: Grid3,
    zeta: ComplexFrequency,
    fft: Fft3,
    g_hat: Vec<Complex64>,
}

impl CgoProblem {
    pub fn new(
        grid: Grid3,
        zeta: ComplexFrequency,
        green: &GreenEvalConfig,
        support: KernelSupport,
    ) -> Result<Self, CgoError> {
        let fft = Fft3::new(&grid);
        let mut g_hat = sample_g_periodic(&zeta, &grid, green, support)?;
        fft.forward(&mut g_hat)?;
        Ok(Self {
            grid,
            zeta,
            fft,
            g_hat,
        })
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn zeta(&self) -> &ComplexFrequency {
        &self.zeta
    }

    pub fn kernel_spectrum(&self) -> &[Complex64] {
        &self.g_hat
    }

    /// `h³ g_N ⊛ φ`.
    pub fn convolve(&self, phi: &[Complex64]) -> Result<Vec<Complex64>, CgoError> {
        periodic_convolve(&self.fft, &self.g_hat, phi, &self.grid)
    }

    /// Applies `φ + h³ g_N ⊛ (q φ)`.
    pub fn apply(&self, q: &[Complex64], phi: &[Complex64]) -> Result<Vec<Complex64>, CgoError> {
        let qphi: Vec<Complex64> = q.iter().zip(phi).map(|(a, b)| a * b).collect();
        let mut out = self.convolve(&qphi)?;
        for (o, p) in out.iter_mut().zip(phi) {
            *o += p;
        }
        Ok(out)
    }

    /// Solves for `μ_N` given the sampled potential.
    pub fn solve(&self, q: &[Complex64], config: GmresConfig) -> Result<CgoSolution, CgoError> {
        if q.len() != self.grid.len() {
            return Err(CgoError::SizeMismatch {
                expected: self.grid.len(),
                found: q.len(),
            });
        }
        let ones = vec![Complex64::new(1.0, 0.0); self.grid.len()];
        if q.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            return Ok(CgoSolution {
                grid: self.grid,
                zeta: self.zeta,
                mu: ones,
                residual: 0.0,
                iterations: 0,
                residual_history: vec![0.0],
            });
        }
        let result = gmres(
            |v, out| {
                let av = self.apply(q, v).expect("sizes checked above");
                out.copy_from_slice(&av);
            },
            &ones,
            config,
        );
        if !result.converged {
            return Err(CgoError::NotConverged {
                iterations: result.iterations,
                residual: result.final_residual(),
                residual_history: result.residual_history,
            });
        }
        Ok(CgoSolution {
            grid: self.grid,
            zeta: self.zeta,
            residual: result.final_residual(),
            iterations: result.iterations,
            residual_history: result.residual_history,
            mu: result.x,
        })
    }
}

/// A converged discrete CGO solution.
#[derive(Debug, Clone)]
pub struct CgoSolution {
    pub grid: Grid3,
    pub zeta: ComplexFrequency,
    pub mu: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
}

/// `μ` at the grid nodes inside the closed unit ball.
#[derive(Debug, Clone)]
pub struct BallField {
    pub indices: Vec<usize>,
    pub positions: Vec<Vec3>,
    pub values: Vec<Complex64>,
}

/// Solves `μ + g_ζ * (qμ) = 1` on `grid` with the default kernel settings.
pub fn solve_mu(
    q: &[Complex64],
    zeta: &ComplexFrequency,
    grid: Grid3,
    config: GmresConfig,
) -> Result<CgoSolution, CgoError> {
    CgoProblem::new(grid, *zeta, &GreenEvalConfig::default(), KernelSupport::FullCube)?.solve(q, config)
}

/// Restricts a solution to the nodes with `|jh| ≤ 1`.
pub fn restrict_to_ball(solution: &CgoSolution) -> BallField {
    let indices = solution.grid.ball_indices();
    let positions = indices.iter().map(|&i| solution.grid.position(i)).collect();
    let values = indices.iter().map(|&i| solution.mu[i]).collect();
    BallField {
        indices,
        positions,
        values,
    }
}
