//! Radial reconstruction of the conductivity from scattering data.
//!
//! Three routes are provided. The nonlinear and `t^exp` routes invert a
//! scattering curve to a potential with a truncated radial inverse Fourier
//! transform and then solve `Δ√γ = q√γ` with `γ(1) = 1`. Calderón's route
//! maps the `t^exp` curve at the minimal `ζ` directly to a conductivity.

use std::f64::consts::PI;

use thiserror::Error;

use crate::phantom::{PhantomError, RadialProfile, SmoothBump};
use crate::scattering::{sweep_curve, ScatterConfig, ScatterCurve, ScatterError, ScatterKind, ZetaRule};

/// Minimum number of curve samples inside `[0, B]`.
pub const MIN_SAMPLES: usize = 16;

/// Relative size of `Im q_rec` above which a reconstruction is flagged.
pub const IMAG_WARNING_THRESHOLD: f64 = 1e-3;

/// Consecutive growing iterates that count as divergence of the fixed point.
const GROWTH_LIMIT: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconError {
    #[error("curve sample at |xi| = {xi_mag} inside [0, {truncation}] is diverged or failed; use a smaller truncation")]
    DivergedSample { xi_mag: f64, truncation: f64 },
    #[error("curve has {found} samples inside [0, {truncation}], need at least {MIN_SAMPLES}")]
    TooFewSamples { found: usize, truncation: f64 },
    #[error("curve ends at |xi| = {last} and does not cover [0, {truncation}]")]
    NotCovered { last: f64, truncation: f64 },
    #[error("curve samples must be sorted, finite and non-negative")]
    BadSamples,
    #[error("radial nodes must increase from 0 to 1")]
    BadNodes,
    #[error("the fixed-point iteration diverged after {iterations} iterations (sup|w| = {sup_w:e})")]
    Diverged { iterations: usize, sup_w: f64 },
    #[error("the fixed-point iteration did not converge in {iterations} iterations (last update {update:e})")]
    NotConverged { iterations: usize, update: f64 },
    #[error("no usable truncation: the first curve sample is already diverged")]
    NoUsableTruncation,
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<ReconError>,
    },
    #[error(transparent)]
    Scatter(#[from] ScatterError),
    #[error(transparent)]
    Phantom(#[from] PhantomError),
}

impl ReconError {
    fn at(stage: &'static str) -> impl FnOnce(ReconError) -> ReconError {
        move |e| ReconError::Stage {
            stage,
            source: Box::new(e),
        }
    }
}

/// Reconstruction route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Nonlinear,
    Texp,
    Calderon,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Nonlinear => "nonlinear",
            Method::Texp => "texp",
            Method::Calderon => "calderon",
        }
    }
}

/// Output of [`pipeline`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReconResult {
    pub method: Method,
    /// Reconstructed potential; empty for Calderón's method.
    pub q_rec: RadialProfile,
    pub gamma_rec: RadialProfile,
    pub truncation: f64,
    /// Fixed-point iterations; zero for Calderón's method.
    pub iterations: usize,
    /// `max|Im q_rec| / max|Re q_rec|`.
    pub imag_ratio: f64,
    pub curve: ScatterCurve,
}

impl ReconResult {
    /// True if the imaginary residue of `q_rec` exceeds [`IMAG_WARNING_THRESHOLD`].
    pub fn reality_warning(&self) -> bool {
        self.imag_ratio > IMAG_WARNING_THRESHOLD
    }
}

/// A real profile with its imaginary residue.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexProfile {
    pub real: RadialProfile,
    pub imag: RadialProfile,
}

impl ComplexProfile {
    pub fn imag_ratio(&self) -> f64 {
        let re = self.real.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let im = self.imag.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if im == 0.0 {
            0.0
        } else {
            im / re
        }
    }
}

/// `sin z / z` with value 1 at 0.
pub fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// Midpoint weights of the curve samples over `[0, truncation]`.
///
/// Each sample owns the cell between the midpoints to its neighbours, the
/// first cell starting at 0; cells are clipped to `[0, truncation]`.
fn midpoint_weights(curve: &ScatterCurve, truncation: f64) -> Result<Vec<(usize, f64)>, ReconError> {
    let s = curve.xi_mags();
    if s.is_empty()
        || s.iter().any(|v| !v.is_finite() || *v < 0.0)
        || s.windows(2).any(|w| w[1] <= w[0])
        || !truncation.is_finite()
        || truncation <= 0.0
    {
        return Err(ReconError::BadSamples);
    }
    let n = s.len();
    let upper_edge = |i: usize| {
        if i + 1 < n {
            0.5 * (s[i] + s[i + 1])
        } else if n > 1 {
            s[i] + 0.5 * (s[i] - s[i - 1])
        } else {
            s[i]
        }
    };
    if upper_edge(n - 1) < truncation * (1.0 - 1e-12) {
        return Err(ReconError::NotCovered {
            last: s[n - 1],
            truncation,
        });
    }
    let mut weights = Vec::new();
    let mut lower = 0.0;
    for (i, point) in curve.points.iter().enumerate() {
        if lower >= truncation {
            break;
        }
        let upper = upper_edge(i).min(truncation);
        if upper > lower {
            if !point.usable() {
                return Err(ReconError::DivergedSample {
                    xi_mag: point.xi_mag,
                    truncation,
                });
            }
            weights.push((i, upper - lower));
        }
        lower = upper_edge(i);
    }
    if weights.len() < MIN_SAMPLES {
        return Err(ReconError::TooFewSamples {
            found: weights.len(),
            truncation,
        });
    }
    Ok(weights)
}

fn check_nodes(r: &[f64]) -> Result<(), ReconError> {
    let ok = r.len() >= 2
        && r[0] == 0.0
        && *r.last().unwrap() == 1.0
        && r.windows(2).all(|w| w[1] > w[0]);
    if ok {
        Ok(())
    } else {
        Err(ReconError::BadNodes)
    }
}

/// `q(r) = (1/2π²) ∫₀^B ξ² t(ξ) sinc(ξr) dξ` by the midpoint rule over the curve.
pub fn inverse_radial_fourier(
    curve: &ScatterCurve,
    truncation: f64,
    r_grid: &[f64],
) -> Result<ComplexProfile, ReconError> {
    let weights = midpoint_weights(curve, truncation)?;
    let mut re = Vec::with_capacity(r_grid.len());
    let mut im = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let (mut a, mut b) = (0.0, 0.0);
        for &(i, w) in &weights {
            let p = &curve.points[i];
            let k = w * p.xi_mag * p.xi_mag * sinc(p.xi_mag * r);
            a += k * p.value.re;
            b += k * p.value.im;
        }
        re.push(a / (2.0 * PI * PI));
        im.push(b / (2.0 * PI * PI));
    }
    Ok(ComplexProfile {
        real: RadialProfile {
            r: r_grid.to_vec(),
            values: re,
        },
        imag: RadialProfile {
            r: r_grid.to_vec(),
            values: im,
        },
    })
}

/// Cumulative trapezoid integral of `f` on the nodes `r`.
fn cumulative_trapezoid(r: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(r.len());
    out.push(0.0);
    for i in 1..r.len() {
        let prev = out[i - 1];
        out.push(prev + 0.5 * (r[i] - r[i - 1]) * (f[i] + f[i - 1]));
    }
    out
}

/// Solution of `Δu = f`, `u(1) = 0`, for radial `f`:
/// `u(r) = -[(1/r - 1) ∫₀^r t² f dt + ∫_r^1 (t - t²) f dt]`.
fn radial_dirichlet_solve(r: &[f64], f: &[f64]) -> Vec<f64> {
    let inner: Vec<f64> = r.iter().zip(f).map(|(t, v)| t * t * v).collect();
    let outer: Vec<f64> = r.iter().zip(f).map(|(t, v)| (t - t * t) * v).collect();
    let inner = cumulative_trapezoid(r, &inner);
    let outer = cumulative_trapezoid(r, &outer);
    let total = *outer.last().unwrap();
    r.iter()
        .enumerate()
        .map(|(i, &ri)| {
            let near = if ri == 0.0 { 0.0 } else { (1.0 / ri - 1.0) * inner[i] };
            -(near + total - outer[i])
        })
        .collect()
}

/// Solves `Δw = q(w + 1)`, `w(1) = 0`, by fixed-point iteration and returns `γ = (1 + w)²`.
///
/// Stops once `sup|w_{k+1} - w_k| < tol`.
pub fn solve_conductivity_radial(
    q_rec: &RadialProfile,
    tol: f64,
    max_iter: usize,
) -> Result<(RadialProfile, usize), ReconError> {
    let r = &q_rec.r;
    check_nodes(r)?;
    let mut w = vec![0.0; r.len()];
    let mut growth = 0;
    let mut sup_prev = 0.0;
    let mut update = f64::INFINITY;
    for k in 1..=max_iter {
        let s: Vec<f64> = q_rec.values.iter().zip(&w).map(|(q, w)| q * (w + 1.0)).collect();
        let next = radial_dirichlet_solve(r, &s);
        update = next.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let sup = next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        w = next;
        if !sup.is_finite() {
            return Err(ReconError::Diverged {
                iterations: k,
                sup_w: sup,
            });
        }
        if update < tol {
            let mut values: Vec<f64> = w.iter().map(|v| (1.0 + v) * (1.0 + v)).collect();
            *values.last_mut().unwrap() = 1.0;
            return Ok((
                RadialProfile {
                    r: r.clone(),
                    values,
                },
                k,
            ));
        }
        growth = if k > 1 && sup > sup_prev { growth + 1 } else { 0 };
        if growth >= GROWTH_LIMIT && sup > 1.0 {
            return Err(ReconError::Diverged {
                iterations: k,
                sup_w: sup,
            });
        }
        sup_prev = sup;
    }
    Err(ReconError::NotConverged {
        iterations: max_iter,
        update,
    })
}

/// `γ^app(r) = 1 - (1/π²) ∫₀^B t^exp(ξ, ζ_ξ) sinc(ξr) dξ`.
pub fn calderon_gamma_app(
    texp_curve: &ScatterCurve,
    truncation: f64,
    r_grid: &[f64],
) -> Result<RadialProfile, ReconError> {
    let weights = midpoint_weights(texp_curve, truncation)?;
    let values = r_grid
        .iter()
        .map(|&r| {
            let integral: f64 = weights
                .iter()
                .map(|&(i, w)| {
                    let p = &texp_curve.points[i];
                    w * p.value.re * sinc(p.xi_mag * r)
                })
                .sum();
            1.0 - integral / (PI * PI)
        })
        .collect();
    Ok(RadialProfile {
        r: r_grid.to_vec(),
        values,
    })
}

/// Largest radius where `|f - 1|` reaches `fraction` of its maximum.
///
/// A simple estimate of the support of `γ - 1`; returns 0 for `f ≡ 1`.
pub fn deviation_support(profile: &RadialProfile, fraction: f64) -> f64 {
    let peak = profile.values.iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
    if peak == 0.0 {
        return 0.0;
    }
    profile
        .r
        .iter()
        .zip(&profile.values)
        .filter(|(_, v)| (*v - 1.0).abs() >= fraction * peak)
        .map(|(r, _)| *r)
        .fold(0.0, f64::max)
}

/// Settings for [`pipeline`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReconConfig {
    pub scatter: ScatterConfig,
    /// `|ζ|` used for the nonlinear and `t^exp` curves.
    pub zeta_magnitude: f64,
    pub xi_step: f64,
    pub xi_max: f64,
    /// Truncation `B`; if unset, 50 for the nonlinear route and the last
    /// non-diverged sample (at most 32) for the linearised ones.
    pub truncation: Option<f64>,
    /// Number of radial output nodes.
    pub nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ReconConfig {
    fn default() -> Self {
        Self {
            scatter: ScatterConfig::default(),
            zeta_magnitude: 50.0,
            xi_step: 2.0,
            xi_max: 50.0,
            truncation: None,
            nodes: 401,
            tol: 1e-10,
            max_iter: 500,
        }
    }
}

/// Default truncation of the nonlinear route.
pub const NONLINEAR_TRUNCATION: f64 = 50.0;
/// Upper bound on the default truncation of the linearised routes.
pub const LINEAR_TRUNCATION: f64 = 32.0;

impl ReconConfig {
    /// Samples `0, step, 2·step, …` up to `xi_max`.
    pub fn xi_samples(&self) -> Vec<f64> {
        let count = (self.xi_max / self.xi_step + 1e-9).floor() as usize;
        (0..=count).map(|i| i as f64 * self.xi_step).collect()
    }
}

/// Runs one reconstruction route on the smooth bump.
pub fn pipeline(method: Method, phantom: &SmoothBump, config: &ReconConfig) -> Result<ReconResult, ReconError> {
    let r_grid = RadialProfile::uniform_nodes(config.nodes).map_err(|e| ReconError::at("setup")(e.into()))?;
    let xis = config.xi_samples();
    let (kind, rule) = match method {
        Method::Nonlinear => (
            ScatterKind::Nonlinear,
            ZetaRule::Fixed {
                magnitude: config.zeta_magnitude,
            },
        ),
        Method::Texp => (
            ScatterKind::Texp,
            ZetaRule::Fixed {
                magnitude: config.zeta_magnitude,
            },
        ),
        Method::Calderon => (ScatterKind::Texp, ZetaRule::Minimal),
    };
    let curve = sweep_curve(kind, phantom, &xis, rule, &config.scatter).map_err(|e| ReconError::at("scattering")(e.into()))?;
    let truncation = match (config.truncation, method) {
        (Some(b), _) => b,
        (None, Method::Nonlinear) => NONLINEAR_TRUNCATION,
        (None, _) => curve
            .last_usable_before_divergence()
            .filter(|b| *b > 0.0)
            .ok_or(ReconError::NoUsableTruncation)
            .map_err(ReconError::at("truncation"))?
            .min(LINEAR_TRUNCATION),
    };
    match method {
        Method::Calderon => {
            let gamma_rec = calderon_gamma_app(&curve, truncation, &r_grid).map_err(ReconError::at("inversion"))?;
            Ok(ReconResult {
                method,
                q_rec: RadialProfile {
                    r: Vec::new(),
                    values: Vec::new(),
                },
                gamma_rec,
                truncation,
                iterations: 0,
                imag_ratio: 0.0,
                curve,
            })
        }
        _ => {
            let q = inverse_radial_fourier(&curve, truncation, &r_grid).map_err(ReconError::at("inversion"))?;
            let (gamma_rec, iterations) = solve_conductivity_radial(&q.real, config.tol, config.max_iter)
                .map_err(ReconError::at("conductivity"))?;
            Ok(ReconResult {
                method,
                imag_ratio: q.imag_ratio(),
                q_rec: q.real,
                gamma_rec,
                truncation,
                iterations,
                curve,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::ScatterPoint;
    use num_complex::Complex64;

    fn curve(values: impl Fn(f64) -> f64, step: f64, count: usize) -> ScatterCurve {
        ScatterCurve {
            kind: ScatterKind::Qhat,
            zeta_rule: ZetaRule::Minimal,
            points: (0..count)
                .map(|i| {
                    let s = i as f64 * step;
                    ScatterPoint {
                        xi_mag: s,
                        value: Complex64::new(values(s), 0.0),
                        diverged: false,
                        iterations: None,
                        failure: None,
                    }
                })
                .collect(),
        }
    }

    #[test]
    fn zero_curve_gives_zero_potential_and_unit_gamma() {
        let c = curve(|_| 0.0, 1.0, 30);
        let r = RadialProfile::uniform_nodes(11).unwrap();
        let q = inverse_radial_fourier(&c, 20.0, &r).unwrap();
        assert!(q.real.values.iter().all(|v| *v == 0.0));
        let (g, it) = solve_conductivity_radial(&q.real, 1e-12, 10).unwrap();
        assert_eq!(it, 1);
        assert!(g.values.iter().all(|v| *v == 1.0));
        let app = calderon_gamma_app(&c, 20.0, &r).unwrap();
        assert!(app.values.iter().all(|v| *v == 1.0));
    }

    #[test]
    fn weights_are_clipped_and_checked() {
        let c = curve(|_| 1.0, 2.0, 26);
        let w = midpoint_weights(&c, 50.0).unwrap();
        assert_eq!(w.len(), 26);
        assert_eq!(w[0].1, 1.0);
        assert_eq!(w[25].1, 1.0);
        let total: f64 = w.iter().map(|p| p.1).sum();
        assert!((total - 50.0).abs() < 1e-12);
        assert!(matches!(
            midpoint_weights(&c, 15.0),
            Err(ReconError::TooFewSamples { found: 8, .. })
        ));
        assert!(matches!(midpoint_weights(&c, 60.0), Err(ReconError::NotCovered { .. })));
        let mut bad = c.clone();
        bad.points[10].diverged = true;
        assert!(matches!(
            midpoint_weights(&bad, 30.0),
            Err(ReconError::DivergedSample { .. })
        ));
    }

    #[test]
    fn dirichlet_solve_of_constant_source() {
        let r = RadialProfile::uniform_nodes(201).unwrap();
        let f = vec![1.0; r.len()];
        let u = radial_dirichlet_solve(&r, &f);
        for (ri, ui) in r.iter().zip(&u) {
            assert!((ui - (ri * ri - 1.0) / 6.0).abs() < 1e-5);
        }
        assert_eq!(*u.last().unwrap(), 0.0);
    }

    #[test]
    fn large_potential_diverges() {
        let r = RadialProfile::uniform_nodes(101).unwrap();
        let q = RadialProfile::from_fn(r, |_| -200.0);
        assert!(matches!(
            solve_conductivity_radial(&q, 1e-10, 200),
            Err(ReconError::Diverged { .. })
        ));
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(PI)).abs() < 1e-16);
        assert!((sinc(1e-9) - 1.0).abs() < 1e-16);
    }
}
