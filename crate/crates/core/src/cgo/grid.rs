//! The periodic collocation grid on `[-2, 2)³`.

use super::CgoError;
use crate::geometry::Vec3;

/// Side length of the period cube.
pub const PERIOD: f64 = 4.0;

/// Uniform grid with `n` nodes per axis and spacing `h = 4/n`.
///
/// Fields are stored in FFT order: along each axis the storage index `i`
/// maps to the integer coordinate `i` for `i < n/2` and `i - n` otherwise, so
/// the origin sits at index 0 and node `j` has position `jh`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid3 {
    n: usize,
}

impl Grid3 {
    pub fn new(n: usize) -> Result<Self, CgoError> {
        if n < 4 || !n.is_power_of_two() {
            return Err(CgoError::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        PERIOD / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Signed integer coordinate of storage index `i` along one axis.
    pub fn signed(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Storage index of a signed coordinate, wrapping periodically.
    pub fn wrap(&self, j: i64) -> usize {
        j.rem_euclid(self.n as i64) as usize
    }

    pub fn flat(&self, i: [usize; 3]) -> usize {
        (i[0] * self.n + i[1]) * self.n + i[2]
    }

    pub fn unflat(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Signed integer coordinates of a flat index.
    pub fn node(&self, idx: usize) -> [i64; 3] {
        self.unflat(idx).map(|i| self.signed(i))
    }

    pub fn position(&self, idx: usize) -> Vec3 {
        let h = self.h();
        self.node(idx).map(|j| j as f64 * h)
    }

    /// Flat indices of the nodes with `|x| ≤ 1`, in storage order.
    pub fn ball_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&idx| {
                let x = self.position(idx);
                x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= 1.0
            })
            .collect()
    }
}
