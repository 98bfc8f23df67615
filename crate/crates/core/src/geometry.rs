//! Frequencies, complex frequencies and the rotations relating them.
//!
//! A complex frequency `ζ ∈ ℂ³` is admissible for a real frequency `ξ` when
//! `ζ·ζ = 0` and `(ξ+ζ)·(ξ+ζ) = 0`. Writing `ζ = ζ_R + iζ_I`, these reduce to
//! `|ζ_R| = |ζ_I|`, `ζ_R ⊥ ζ_I`, `ζ_R·ξ = -|ξ|²/2` and `ζ_I ⊥ ξ`. The family
//! with a given magnitude is parametrised by an azimuth about `ξ`.

use num_complex::Complex64;
use thiserror::Error;

/// Real 3-vector.
pub type Vec3 = [f64; 3];

/// 3×3 real matrix stored as rows.
pub type Mat3 = [[f64; 3]; 3];

/// Relative tolerance used when validating the constraint set.
const CONSTRAINT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("non-finite component in {0}")]
    NonFinite(&'static str),
    #[error("|zeta| = {magnitude} is below the minimum {minimum} admissible for this xi")]
    MagnitudeTooSmall { magnitude: f64, minimum: f64 },
    #[error("complex frequency violates zeta.zeta = 0 (residual {0:e})")]
    NotNull(f64),
    #[error("complex frequency has zero imaginary part")]
    ZeroImaginaryPart,
    #[error("the minimal zeta is undefined at xi = 0")]
    ZeroXi,
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn mat_vec(m: &Mat3, v: Vec3) -> Vec3 {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

pub fn transpose(m: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            t[j][i] = v;
        }
    }
    t
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let bt = transpose(b);
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = dot(a[i], bt[j]);
        }
    }
    c
}

pub fn determinant(m: &Mat3) -> f64 {
    dot(m[0], cross(m[1], m[2]))
}

/// Rotation by `angle` about the unit vector `axis` (right-hand rule).
pub fn rotation_about_axis(axis: Vec3, angle: f64) -> Mat3 {
    let n = norm(axis);
    let [x, y, z] = scale(axis, 1.0 / n);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

/// A real frequency in ℝ³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Xi(Vec3);

impl Xi {
    pub fn new(v: Vec3) -> Result<Self, GeometryError> {
        if v.iter().all(|c| c.is_finite()) {
            Ok(Self(v))
        } else {
            Err(GeometryError::NonFinite("xi"))
        }
    }

    /// The frequency `s·e₁`.
    pub fn along_e1(s: f64) -> Result<Self, GeometryError> {
        Self::new([s, 0.0, 0.0])
    }

    pub fn vector(&self) -> Vec3 {
        self.0
    }

    pub fn magnitude(&self) -> f64 {
        norm(self.0)
    }
}

/// A complex 3-vector `re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexFrequency {
    pub re: Vec3,
    pub im: Vec3,
}

impl ComplexFrequency {
    pub fn new(re: Vec3, im: Vec3) -> Result<Self, GeometryError> {
        if re.iter().chain(im.iter()).all(|c| c.is_finite()) {
            Ok(Self { re, im })
        } else {
            Err(GeometryError::NonFinite("zeta"))
        }
    }

    /// `|ζ| = sqrt(|ζ_R|² + |ζ_I|²)`.
    pub fn magnitude(&self) -> f64 {
        (dot(self.re, self.re) + dot(self.im, self.im)).sqrt()
    }

    pub fn components(&self) -> [Complex64; 3] {
        [0, 1, 2].map(|k| Complex64::new(self.re[k], self.im[k]))
    }

    /// The bilinear (not Hermitian) square `ζ·ζ`.
    pub fn self_dot(&self) -> Complex64 {
        Complex64::new(
            dot(self.re, self.re) - dot(self.im, self.im),
            2.0 * dot(self.re, self.im),
        )
    }

    /// `x·ζ` for real `x`.
    pub fn dot_real(&self, x: Vec3) -> Complex64 {
        Complex64::new(dot(x, self.re), dot(x, self.im))
    }

    pub fn rotated(&self, r: &Mat3) -> Self {
        Self {
            re: mat_vec(r, self.re),
            im: mat_vec(r, self.im),
        }
    }
}

/// A real frequency together with an admissible complex frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPair {
    pub xi: Xi,
    pub zeta: ComplexFrequency,
}

impl FrequencyPair {
    /// Largest violation of the two null conditions, relative to `1 + |ζ|² + |ξ|²`.
    pub fn constraint_residual(&self) -> f64 {
        let shifted = ComplexFrequency {
            re: add(self.zeta.re, self.xi.vector()),
            im: self.zeta.im,
        };
        let scale = 1.0 + self.zeta.magnitude().powi(2) + self.xi.magnitude().powi(2);
        self.zeta.self_dot().norm().max(shifted.self_dot().norm()) / scale
    }
}

/// `ζ = κ(k_⊥ + i k)` together with the rotation `R` taking `ζ` to `κ(e₁ + i e₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaDecomposition {
    pub kappa: f64,
    pub k: Vec3,
    pub k_perp: Vec3,
    /// Rows are `k_⊥`, `k` and `k_⊥ × k`; proper orthogonal.
    pub rotation: Mat3,
}

/// Orthonormal pair `(p, q)` spanning the plane orthogonal to `ξ`.
///
/// `p` is the Gram–Schmidt projection of the coordinate axis least aligned
/// with `ξ` (lowest index on ties) and `q = ξ̂ × p`. For `ξ = 0` the pair is
/// `(e₁, e₂)`.
fn transverse_frame(xi: Vec3) -> (Vec3, Vec3, Vec3) {
    let m = norm(xi);
    if m == 0.0 {
        return ([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    }
    let xh = scale(xi, 1.0 / m);
    let mut axis = 0;
    for k in 1..3 {
        if xh[k].abs() < xh[axis].abs() {
            axis = k;
        }
    }
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let p = sub(e, scale(xh, xh[axis]));
    let p = scale(p, 1.0 / norm(p));
    let q = cross(xh, p);
    (xh, p, q)
}

/// Smallest admissible `|ζ|` for this `ξ`, namely `|ξ|/√2`.
pub fn min_zeta_magnitude(xi: &Xi) -> f64 {
    xi.magnitude() / std::f64::consts::SQRT_2
}

/// Constructs the admissible `ζ` with `|ζ| = magnitude` at the given azimuth.
///
/// At azimuth zero `ζ_I` points along the transverse axis `p` of
/// `transverse_frame`; increasing azimuth rotates `ζ` about `ξ`. The real part
/// is `-ξ/2 + ξ_⊥` with `ξ_⊥ ∥ ξ̂ × ζ̂_I`.
pub fn make_zeta(xi: &Xi, magnitude: f64, azimuth: f64) -> Result<FrequencyPair, GeometryError> {
    if !magnitude.is_finite() || !azimuth.is_finite() {
        return Err(GeometryError::NonFinite("magnitude/azimuth"));
    }
    let minimum = min_zeta_magnitude(xi);
    if magnitude < minimum * (1.0 - CONSTRAINT_TOL) || magnitude <= 0.0 {
        return Err(GeometryError::MagnitudeTooSmall { magnitude, minimum });
    }
    let xv = xi.vector();
    let s = xi.magnitude();
    let kappa = magnitude / std::f64::consts::SQRT_2;
    let perp = (kappa * kappa - 0.25 * s * s).max(0.0).sqrt();
    let (s_a, c_a) = azimuth.sin_cos();
    let zeta = if s == 0.0 {
        ComplexFrequency {
            re: [kappa * c_a, kappa * s_a, 0.0],
            im: [-kappa * s_a, kappa * c_a, 0.0],
        }
    } else {
        let (xh, p, q) = transverse_frame(xv);
        let im_dir = add(scale(p, c_a), scale(q, s_a));
        let perp_dir = cross(xh, im_dir);
        ComplexFrequency {
            re: add(scale(xv, -0.5), scale(perp_dir, perp)),
            im: scale(im_dir, kappa),
        }
    };
    Ok(FrequencyPair { xi: *xi, zeta })
}

/// The minimal-magnitude admissible `ζ_ξ` with `|ζ_ξ| = |ξ|/√2`.
pub fn make_zeta_min(xi: &Xi) -> Result<FrequencyPair, GeometryError> {
    if xi.magnitude() == 0.0 {
        return Err(GeometryError::ZeroXi);
    }
    make_zeta(xi, min_zeta_magnitude(xi), 0.0)
}

/// Splits a null vector `ζ` into `κ`, `k`, `k_⊥` and the aligning rotation.
pub fn decompose_zeta(zeta: &ComplexFrequency) -> Result<ZetaDecomposition, GeometryError> {
    let kappa = norm(zeta.im);
    if kappa == 0.0 {
        return Err(GeometryError::ZeroImaginaryPart);
    }
    let residual = zeta.self_dot().norm() / (kappa * kappa);
    if residual > CONSTRAINT_TOL {
        return Err(GeometryError::NotNull(residual));
    }
    let k = scale(zeta.im, 1.0 / kappa);
    // Remove the (roundoff-level) component along k and renormalise.
    let re = sub(zeta.re, scale(k, dot(zeta.re, k)));
    let k_perp = scale(re, 1.0 / norm(re));
    let third = cross(k_perp, k);
    Ok(ZetaDecomposition {
        kappa,
        k,
        k_perp,
        rotation: [k_perp, k, third],
    })
}
