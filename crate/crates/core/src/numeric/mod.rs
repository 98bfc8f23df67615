//! Scalar abstractions shared by the transform code.
//!
//! The spherical-harmonic machinery is written once against [`Real`] and
//! instantiated for `f64` and for [`DoubleDouble`].

pub mod ddouble;

use std::fmt::Debug;

use num_traits::Num;

pub use ddouble::{DoubleDouble, DD_EPSILON};

/// Real scalar with the handful of elementary functions needed by the transforms.
pub trait Real: Num + Copy + PartialOrd + Debug + Send + Sync + std::ops::Neg<Output = Self> {
    /// Unit roundoff of the representation.
    const EPSILON: f64;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn pi() -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn abs(self) -> Self;
    fn is_finite(self) -> bool;
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON / 2.0;
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Real for DoubleDouble {
    const EPSILON: f64 = DD_EPSILON;
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    fn pi() -> Self {
        DoubleDouble::PI
    }
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    fn exp(self) -> Self {
        DoubleDouble::exp(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        DoubleDouble::sin_cos(self)
    }
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    fn is_finite(self) -> bool {
        DoubleDouble::is_finite(self)
    }
}
