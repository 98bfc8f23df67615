//! Python bindings: phantoms, DN spectra, Faddeev's Green's function,
//! scattering transforms and the three reconstruction routes.

use eit3d_core::cgo::{solve_mu, GmresConfig, Grid3};
use eit3d_core::dnmap::{eigen_bounds, eigen_shells, DnSpectrum};
use eit3d_core::faddeev::{g_zeta, GreenEvalConfig};
use eit3d_core::geometry::{make_zeta, make_zeta_min, ComplexFrequency, Xi};
use eit3d_core::phantom::{ShellPhantom, SmoothBump};
use eit3d_core::recon::{pipeline, Method, ReconConfig, ReconResult};
use eit3d_core::scattering::{
    qhat_radial, sweep_curve, t_exp_radial, t_nonlinear, ScatterConfig, ScatterKind, ZetaRule,
};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Smooth radial conductivity `γ = (1 + α ψ(r/d))²`.
#[pyclass(name = "SmoothBump", frozen, from_py_object)]
#[derive(Clone)]
struct PySmoothBump {
    inner: SmoothBump,
}

#[pymethods]
impl PySmoothBump {
    #[new]
    #[pyo3(signature = (alpha = 0.3, d = 0.9))]
    fn new(alpha: f64, d: f64) -> PyResult<Self> {
        Ok(Self {
            inner: SmoothBump::new(alpha, d).map_err(value_err)?,
        })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn support(&self) -> f64 {
        self.inner.support()
    }

    fn gamma(&self, r: f64) -> f64 {
        self.inner.gamma(r)
    }

    fn q(&self, r: f64) -> f64 {
        self.inner.q(r)
    }

    /// `q̂(|ξ|)` of the bump's potential.
    fn qhat(&self, xi_mag: f64) -> f64 {
        qhat_radial(&|r| self.inner.q(r), xi_mag)
    }

    /// DN eigenvalues `λ_0..λ_lmax` through a midpoint staircase.
    #[pyo3(signature = (lmax, shells = 1024))]
    fn eigenvalues(&self, lmax: usize, shells: usize) -> PyResult<Vec<f64>> {
        let g = |r: f64| self.inner.gamma(r);
        Ok(DnSpectrum::from_smooth(&g, lmax, shells).map_err(value_err)?.lambdas().to_vec())
    }

    /// `(λ_l^L, λ_l^U)` from the infimum and supremum staircases.
    #[pyo3(signature = (l, shells = 1024))]
    fn eigenvalue_bounds(&self, l: usize, shells: usize) -> PyResult<(f64, f64)> {
        eigen_bounds(&|r| self.inner.gamma(r), l, shells).map_err(value_err)
    }

    /// `t^exp(ξ, ζ)` for `ξ = (xi_mag, 0, 0)`; returns the value and the divergence flag.
    ///
    /// Without `zeta_mag` the minimal admissible `ζ_ξ` is used.
    #[pyo3(signature = (xi_mag, zeta_mag = None, truncation = 30))]
    fn texp(&self, xi_mag: f64, zeta_mag: Option<f64>, truncation: usize) -> PyResult<(Complex64, bool)> {
        let xi = Xi::along_e1(xi_mag).map_err(value_err)?;
        let pair = match zeta_mag {
            Some(m) => make_zeta(&xi, m, 0.0),
            None => make_zeta_min(&xi),
        }
        .map_err(value_err)?;
        let spectrum = DnSpectrum::from_smooth(&|r| self.inner.gamma(r), truncation, 1024).map_err(value_err)?;
        let v = t_exp_radial(&spectrum, &pair, truncation).map_err(runtime_err)?;
        Ok((v.value, v.diverged))
    }

    /// Nonlinear `t(ξ, ζ)` for `ξ = (xi_mag, 0, 0)` from a CGO solve on an `n³` grid.
    #[pyo3(signature = (xi_mag, zeta_mag = 50.0, n = 32))]
    fn scattering(&self, py: Python<'_>, xi_mag: f64, zeta_mag: f64, n: usize) -> PyResult<Complex64> {
        let xi = Xi::along_e1(xi_mag).map_err(value_err)?;
        let pair = make_zeta(&xi, zeta_mag, 0.0).map_err(value_err)?;
        let grid = Grid3::new(n).map_err(value_err)?;
        let bump = self.inner;
        py.detach(|| {
            let q = bump.sample_q_on_cube(&grid);
            let sol = solve_mu(&q, &pair.zeta, grid, GmresConfig::default()).map_err(runtime_err)?;
            t_nonlinear(&pair, &q, &sol).map_err(runtime_err)
        })
    }

    /// Samples one transform along `ξ = s·e₁`; returns `(|ξ|, value, diverged)` triples.
    #[pyo3(signature = (kind, xi_mags, zeta_mag = None, n = 64, truncation = 30))]
    fn sweep(
        &self,
        py: Python<'_>,
        kind: &str,
        xi_mags: Vec<f64>,
        zeta_mag: Option<f64>,
        n: usize,
        truncation: usize,
    ) -> PyResult<Vec<(f64, Complex64, bool)>> {
        let kind = match kind {
            "nonlinear" => ScatterKind::Nonlinear,
            "texp" => ScatterKind::Texp,
            "qhat" => ScatterKind::Qhat,
            other => return Err(value_err(format!("unknown kind {other:?}"))),
        };
        let rule = zeta_mag.map_or(ZetaRule::Minimal, |magnitude| ZetaRule::Fixed { magnitude });
        let config = ScatterConfig {
            n,
            truncation,
            ..ScatterConfig::default()
        };
        let bump = self.inner;
        let curve = py
            .detach(|| sweep_curve(kind, &bump, &xi_mags, rule, &config))
            .map_err(runtime_err)?;
        Ok(curve.points.iter().map(|p| (p.xi_mag, p.value, !p.usable())).collect())
    }

    /// Runs one reconstruction route: `"nonlinear"`, `"texp"` or `"calderon"`.
    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (method, n = 64, zeta_mag = 50.0, xi_step = 2.0, xi_max = 50.0, truncation = None))]
    fn reconstruct(
        &self,
        py: Python<'_>,
        method: &str,
        n: usize,
        zeta_mag: f64,
        xi_step: f64,
        xi_max: f64,
        truncation: Option<f64>,
    ) -> PyResult<PyReconResult> {
        let method = match method {
            "nonlinear" => Method::Nonlinear,
            "texp" => Method::Texp,
            "calderon" => Method::Calderon,
            other => return Err(value_err(format!("unknown method {other:?}"))),
        };
        let config = ReconConfig {
            scatter: ScatterConfig {
                n,
                ..ScatterConfig::default()
            },
            zeta_magnitude: zeta_mag,
            xi_step,
            xi_max,
            truncation,
            ..ReconConfig::default()
        };
        let bump = self.inner;
        let result = py.detach(|| pipeline(method, &bump, &config)).map_err(runtime_err)?;
        Ok(PyReconResult { inner: result })
    }

    fn __repr__(&self) -> String {
        format!("SmoothBump(alpha={}, d={})", self.inner.alpha(), self.inner.support())
    }
}

/// Output of a reconstruction.
#[pyclass(name = "ReconResult", frozen)]
struct PyReconResult {
    inner: ReconResult,
}

#[pymethods]
impl PyReconResult {
    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.name()
    }

    #[getter]
    fn r(&self) -> Vec<f64> {
        self.inner.gamma_rec.r.clone()
    }

    #[getter]
    fn gamma(&self) -> Vec<f64> {
        self.inner.gamma_rec.values.clone()
    }

    /// Reconstructed potential; empty for Calderón's method.
    #[getter]
    fn q(&self) -> Vec<f64> {
        self.inner.q_rec.values.clone()
    }

    #[getter]
    fn truncation(&self) -> f64 {
        self.inner.truncation
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn imag_ratio(&self) -> f64 {
        self.inner.imag_ratio
    }
}

/// DN eigenvalue `λ_l` of a piecewise-constant conductivity.
///
/// `values` holds one conductivity per shell from the centre out; the last must be 1.
#[pyfunction]
fn shell_eigenvalue(radii: Vec<f64>, values: Vec<f64>, l: usize) -> PyResult<f64> {
    let phantom = ShellPhantom::new(radii, values).map_err(value_err)?;
    Ok(eigen_shells(&phantom, l))
}

/// An admissible `ζ` for `ξ` with the given magnitude, as `(Re ζ, Im ζ)`.
#[pyfunction]
#[pyo3(signature = (xi, magnitude, azimuth = 0.0))]
fn admissible_zeta(xi: [f64; 3], magnitude: f64, azimuth: f64) -> PyResult<([f64; 3], [f64; 3])> {
    let pair = make_zeta(&Xi::new(xi).map_err(value_err)?, magnitude, azimuth).map_err(value_err)?;
    Ok((pair.zeta.re, pair.zeta.im))
}

/// Faddeev's Green's function `g_ζ(x)` with `ζ = zeta_re + i·zeta_im`.
#[pyfunction]
fn faddeev_green(x: [f64; 3], zeta_re: [f64; 3], zeta_im: [f64; 3]) -> PyResult<Complex64> {
    let zeta = ComplexFrequency::new(zeta_re, zeta_im).map_err(value_err)?;
    g_zeta(x, &zeta, &GreenEvalConfig::default()).map_err(value_err)
}

#[pymodule]
fn eit3d(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySmoothBump>()?;
    m.add_class::<PyReconResult>()?;
    m.add_function(wrap_pyfunction!(shell_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(admissible_zeta, m)?)?;
    m.add_function(wrap_pyfunction!(faddeev_green, m)?)?;
    Ok(())
}
