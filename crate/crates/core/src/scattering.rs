//! Scattering transforms of a potential.
//!
//! * the nonlinear transform `t(ξ,ζ) = ∫ e^{-ix·ξ} q μ(·,ζ) dx`, from a CGO solve;
//! * the linearised `t^exp(ξ,ζ) = ∫_{∂Ω} e^{-ix·(ξ+ζ)} (Λ_γ - Λ_1) e^{ix·ζ} dσ`,
//!   which for radial conductivities is the diagonal pairing
//!   `Σ_{l,m} a*_lm b_lm (λ_l - l)` of two plane-wave expansions;
//! * the Fourier transform `q̂` of a radial potential, the large-`|ζ|` limit of both.
//!
//! The plane-wave coefficients grow like `e^{|Im ζ|}` while `t^exp` is of
//! order one, so the pairing suffers massive cancellation. It is evaluated in
//! double-double arithmetic with a running error estimate; together with the
//! size of the last retained degree this decides whether a value is flagged
//! as diverged.

use std::f64::consts::PI;

use num_complex::{Complex, Complex64};
use rayon::prelude::*;
use thiserror::Error;

use crate::cgo::{restrict_to_ball, CgoError, CgoProblem, CgoSolution, GmresConfig, Grid3};
use crate::dnmap::{DnError, DnSpectrum};
use crate::faddeev::{GreenEvalConfig, KernelSupport};
use crate::geometry::{
    dot, make_zeta, make_zeta_min, norm, scale, ComplexFrequency, FrequencyPair, GeometryError, Vec3, Xi,
};
use crate::numeric::{DoubleDouble, Real};
use crate::phantom::SmoothBump;
use crate::sphharm::{
    conj_pair_coeffs, lm_index, planewave_coeffs, sht_forward, PlaneWaveExpansion, ShtError, ShtPlan,
};

/// Residual above which a frequency pair is rejected as inadmissible.
const ADMISSIBLE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatterError {
    #[error("zeta is not admissible for xi (constraint residual {0:e})")]
    NotAdmissible(f64),
    #[error("truncation degree {requested} exceeds the available {available}")]
    Truncation { requested: usize, available: usize },
    #[error("field sizes do not match the grid")]
    SizeMismatch,
    #[error("plane-wave samples overflowed")]
    Overflow,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Cgo(#[from] CgoError),
    #[error(transparent)]
    Dn(#[from] DnError),
    #[error(transparent)]
    Sht(#[from] ShtError),
}

fn check_admissible(pair: &FrequencyPair) -> Result<(), ScatterError> {
    let res = pair.constraint_residual();
    if res > ADMISSIBLE_TOL {
        Err(ScatterError::NotAdmissible(res))
    } else {
        Ok(())
    }
}

/// `t(ξ,ζ) ≈ h³ Σ_{|jh|≤1} e^{-ijh·ξ} q(jh) μ(jh)`.
pub fn t_nonlinear(
    pair: &FrequencyPair,
    q_field: &[Complex64],
    solution: &CgoSolution,
) -> Result<Complex64, ScatterError> {
    check_admissible(pair)?;
    let grid = solution.grid;
    if q_field.len() != grid.len() || solution.mu.len() != grid.len() {
        return Err(ScatterError::SizeMismatch);
    }
    let xi = pair.xi.vector();
    let ball = restrict_to_ball(solution);
    let sum: Complex64 = ball
        .indices
        .iter()
        .zip(&ball.positions)
        .zip(&ball.values)
        .map(|((&idx, &x), &mu)| Complex64::from_polar(1.0, -dot(x, xi)) * q_field[idx] * mu)
        .sum();
    Ok(sum * grid.h().powi(3))
}

/// When a `t^exp` value is considered untrustworthy.
///
/// A value is flagged when its estimated error exceeds
/// `rel · |value| + abs`, or when any sample overflowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceCriterion {
    pub rel: f64,
    pub abs: f64,
}

impl Default for DivergenceCriterion {
    fn default() -> Self {
        Self { rel: 0.1, abs: 1e-3 }
    }
}

/// A `t^exp` value with its error diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TexpValue {
    pub value: Complex64,
    /// Bound on the floating-point error of the pairing.
    pub rounding_error: f64,
    /// Magnitude of the last retained degree, a proxy for the truncation error.
    pub truncation_tail: f64,
    /// Bound on the error from harmonics above the grid's band limit.
    pub aliasing_error: f64,
    pub overflow: bool,
    pub diverged: bool,
}

impl TexpValue {
    pub fn error_estimate(&self) -> f64 {
        self.rounding_error + self.truncation_tail + self.aliasing_error
    }
}

/// Reusable evaluator for `t^exp` at a fixed truncation degree.
///
/// Holds a double-double transform plan; building one costs a few hundred
/// milliseconds, each evaluation a fraction of a second.
#[derive(Debug, Clone)]
pub struct TexpEvaluator {
    plan: ShtPlan<DoubleDouble>,
    excess: Vec<f64>,
    criterion: DivergenceCriterion,
}

/// Default bandwidth of the sphere grid used for `t^exp`.
pub const TEXP_BANDWIDTH: usize = 96;

impl TexpEvaluator {
    pub fn new(
        spectrum: &DnSpectrum,
        truncation: usize,
        bandwidth: usize,
        criterion: DivergenceCriterion,
    ) -> Result<Self, ScatterError> {
        if truncation > spectrum.lmax() {
            return Err(ScatterError::Truncation {
                requested: truncation,
                available: spectrum.lmax(),
            });
        }
        let plan = ShtPlan::new(bandwidth, truncation)?;
        let excess = (0..=truncation)
            .map(|l| spectrum.excess(l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            plan,
            excess,
            criterion,
        })
    }

    pub fn truncation(&self) -> usize {
        self.plan.lmax()
    }

    pub fn evaluate(&self, pair: &FrequencyPair) -> Result<TexpValue, ScatterError> {
        check_admissible(pair)?;
        let b = planewave_coeffs(&self.plan, &pair.zeta);
        let a = conj_pair_coeffs(&self.plan, &pair.xi, &pair.zeta);
        let shifted = ComplexFrequency {
            re: crate::geometry::add(pair.xi.vector(), pair.zeta.re),
            im: pair.zeta.im,
        };
        Ok(self.pair(&a, &b, pair.zeta.magnitude(), shifted.magnitude()))
    }

    /// Bound on `sup |Σ_{l≥K} (i x·w)^l / l!|` over the unit sphere, `K = 2B - L`.
    ///
    /// Harmonics of degree at least `K` are the ones that alias onto the
    /// retained degrees of a bandwidth-`B` grid.
    fn alias_tail(&self, w_mag: f64) -> f64 {
        let k = 2 * self.plan.grid().bandwidth() - self.truncation();
        let kf = k as f64;
        if w_mag >= kf {
            return f64::INFINITY;
        }
        let log_term = kf * w_mag.ln() - (1..=k).map(|j| (j as f64).ln()).sum::<f64>();
        log_term.exp() / (1.0 - w_mag / kf)
    }

    fn pair(
        &self,
        a: &PlaneWaveExpansion<DoubleDouble>,
        b: &PlaneWaveExpansion<DoubleDouble>,
        b_mag: f64,
        a_mag: f64,
    ) -> TexpValue {
        let lmax = self.truncation();
        let overflow = a.overflow() || b.overflow();
        let zero = DoubleDouble::ZERO;
        let mut total = Complex::new(zero, zero);
        let mut abs_products = 0.0;
        let mut abs_cross = 0.0;
        let mut abs_alias = 0.0;
        let (tail_a, tail_b) = (self.alias_tail(a_mag), self.alias_tail(b_mag));
        let mut last = 0.0;
        for (l, &e) in self.excess.iter().enumerate() {
            let ed = DoubleDouble::from_f64(e);
            let mut degree = Complex::new(zero, zero);
            let y_max = ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
            for m in -(l as i64)..=(l as i64) {
                let i = lm_index(l, m);
                let (ca, cb) = (a.coeffs()[i], b.coeffs()[i]);
                degree = degree + ca * cb;
                let na = ca.re.to_f64().hypot(ca.im.to_f64());
                let nb = cb.re.to_f64().hypot(cb.im.to_f64());
                abs_products += e.abs() * na * nb;
                abs_cross += e.abs() * y_max * (na * b.abs_mass() + nb * a.abs_mass());
                if e != 0.0 {
                    abs_alias += e.abs() * 4.0 * PI * y_max * (na * tail_b + nb * tail_a);
                }
            }
            let term = degree * ed;
            if l == lmax {
                last = term.re.to_f64().hypot(term.im.to_f64());
            }
            total = total + term;
        }
        let value = Complex64::new(total.re.to_f64(), total.im.to_f64());
        let w_mag = a_mag.max(b_mag);
        let eps = DoubleDouble::EPSILON * (w_mag + 4.0 * self.plan.grid().bandwidth() as f64);
        let rounding = eps * (abs_products + abs_cross);
        let estimate = rounding + last + abs_alias;
        let diverged = overflow
            || !value.re.is_finite()
            || !value.im.is_finite()
            || !rounding.is_finite()
            || !abs_alias.is_finite()
            || estimate > self.criterion.rel * value.norm() + self.criterion.abs;
        TexpValue {
            value,
            rounding_error: rounding,
            truncation_tail: last,
            aliasing_error: abs_alias,
            overflow,
            diverged,
        }
    }
}

/// `t^exp(ξ,ζ)` for a radial conductivity with spectrum `spectrum`, truncated at degree `truncation`.
pub fn t_exp_radial(
    spectrum: &DnSpectrum,
    pair: &FrequencyPair,
    truncation: usize,
) -> Result<TexpValue, ScatterError> {
    TexpEvaluator::new(spectrum, truncation, TEXP_BANDWIDTH, DivergenceCriterion::default())?.evaluate(pair)
}

/// Trilinear interpolation of a grid field at `x` (inside the period cube).
fn trilinear(grid: &Grid3, field: &[Complex64], x: Vec3) -> Complex64 {
    let h = grid.h();
    let mut base = [0i64; 3];
    let mut frac = [0.0; 3];
    for k in 0..3 {
        let t = x[k] / h;
        let f = t.floor();
        base[k] = f as i64;
        frac[k] = t - f;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for corner in 0..8 {
        let mut w = 1.0;
        let mut idx = [0usize; 3];
        for k in 0..3 {
            let bit = (corner >> k) & 1;
            w *= if bit == 1 { frac[k] } else { 1.0 - frac[k] };
            idx[k] = grid.wrap(base[k] + bit as i64);
        }
        acc += field[grid.flat(idx)] * w;
    }
    acc
}

/// Boundary form `∫_{∂Ω} e^{-ix·(ξ+ζ)} (Λ_γ - Λ_1) ψ dσ` with `ψ = e^{ix·ζ}μ`.
///
/// `μ` is interpolated trilinearly from the grid onto the sphere nodes of a
/// bandwidth-`bandwidth` grid, expanded in harmonics up to `truncation`, and
/// paired against the `a*_lm`. The evaluation is exponentially sensitive to
/// errors in `μ` near the boundary and only meaningful for moderate `|ζ|`.
pub fn t_boundary_check(
    pair: &FrequencyPair,
    spectrum: &DnSpectrum,
    solution: &CgoSolution,
    truncation: usize,
    bandwidth: usize,
) -> Result<Complex64, ScatterError> {
    check_admissible(pair)?;
    if truncation > spectrum.lmax() {
        return Err(ScatterError::Truncation {
            requested: truncation,
            available: spectrum.lmax(),
        });
    }
    let plan = ShtPlan::<f64>::new(bandwidth, truncation)?;
    let grid = plan.grid();
    let mut samples = Vec::with_capacity(grid.len());
    for j in 0..grid.n_theta() {
        for k in 0..grid.n_phi() {
            let x = grid.point(j, k);
            let mu = trilinear(&solution.grid, &solution.mu, x);
            let phase = pair.zeta.dot_real(x) * Complex64::new(0.0, 1.0);
            samples.push(phase.exp() * mu);
        }
    }
    if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(ScatterError::Overflow);
    }
    let psi = sht_forward(&plan, &samples)?;
    let a = conj_pair_coeffs(&plan, &pair.xi, &pair.zeta);
    if a.overflow() {
        return Err(ScatterError::Overflow);
    }
    let a = a.to_harmonic();
    let mut total = Complex64::new(0.0, 0.0);
    for l in 0..=truncation {
        let e = spectrum.excess(l)?;
        for m in -(l as i64)..=(l as i64) {
            total += a.get(l, m) * psi.get(l, m) * e;
        }
    }
    Ok(total)
}

/// Number of Simpson nodes used by [`qhat_radial`].
const QHAT_NODES: usize = 2049;

/// Fourier transform of a radial potential supported in the unit ball.
///
/// `q̂(s) = (4π/s) ∫₀¹ r sin(sr) q(r) dr`, and `4π ∫₀¹ r² q dr` at `s = 0`,
/// by composite Simpson on 2049 nodes.
pub fn qhat_radial(q: &dyn Fn(f64) -> f64, xi_mag: f64) -> f64 {
    let n = QHAT_NODES - 1;
    let h = 1.0 / n as f64;
    let s = xi_mag.abs();
    let f = |r: f64| {
        if s == 0.0 {
            r * r * q(r)
        } else {
            r * (s * r).sin() * q(r) / s
        }
    };
    let mut acc = f(0.0) + f(1.0);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    4.0 * PI * acc * h / 3.0
}

/// Which transform a curve holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScatterKind {
    Nonlinear,
    Texp,
    Qhat,
}

impl ScatterKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScatterKind::Nonlinear => "nonlinear",
            ScatterKind::Texp => "texp",
            ScatterKind::Qhat => "qhat",
        }
    }
}

/// How `ζ` is chosen for each `ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZetaRule {
    /// `|ζ|` fixed for every sample.
    Fixed { magnitude: f64 },
    /// The minimal admissible `ζ_ξ`.
    Minimal,
}

impl ZetaRule {
    pub fn pair(&self, xi: &Xi, azimuth: f64) -> Result<FrequencyPair, GeometryError> {
        match *self {
            ZetaRule::Fixed { magnitude } => make_zeta(xi, magnitude, azimuth),
            ZetaRule::Minimal => make_zeta_min(xi),
        }
    }
}

/// Settings shared by all curve kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterConfig {
    /// Grid nodes per axis for CGO solves.
    pub n: usize,
    pub gmres: GmresConfig,
    pub green: GreenEvalConfig,
    pub support: KernelSupport,
    /// Highest harmonic degree retained in `t^exp`.
    pub truncation: usize,
    /// Sphere-grid bandwidth for `t^exp`.
    pub bandwidth: usize,
    /// Shells in the staircase used for the DN eigenvalues.
    pub shells: usize,
    pub divergence: DivergenceCriterion,
    /// Direction of the frequency ray `ξ = s·ray`.
    pub ray: Vec3,
    pub azimuth: f64,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        Self {
            n: 64,
            gmres: GmresConfig::default(),
            green: GreenEvalConfig::default(),
            support: KernelSupport::FullCube,
            truncation: 30,
            bandwidth: TEXP_BANDWIDTH,
            shells: 1024,
            divergence: DivergenceCriterion::default(),
            ray: [1.0, 0.0, 0.0],
            azimuth: 0.0,
        }
    }
}

/// One sample of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub xi_mag: f64,
    pub value: Complex64,
    pub diverged: bool,
    /// Krylov iterations for nonlinear samples.
    pub iterations: Option<usize>,
    /// Set when the sample could not be computed.
    pub failure: Option<String>,
}

impl ScatterPoint {
    fn failed(xi_mag: f64, message: String) -> Self {
        Self {
            xi_mag,
            value: Complex64::new(f64::NAN, f64::NAN),
            diverged: true,
            iterations: None,
            failure: Some(message),
        }
    }

    /// True if the value can be used downstream.
    pub fn usable(&self) -> bool {
        !self.diverged && self.failure.is_none()
    }
}

/// A transform sampled along a frequency ray.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterCurve {
    pub kind: ScatterKind,
    pub zeta_rule: ZetaRule,
    pub points: Vec<ScatterPoint>,
}

impl ScatterCurve {
    pub fn xi_mags(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.xi_mag).collect()
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Largest `|ξ|` such that every sample up to it is usable.
    pub fn last_usable_before_divergence(&self) -> Option<f64> {
        let mut last = None;
        for p in &self.points {
            if !p.usable() {
                break;
            }
            last = Some(p.xi_mag);
        }
        last
    }
}

fn ray_xi(ray: Vec3, s: f64) -> Result<Xi, GeometryError> {
    let n = norm(ray);
    Xi::new(scale(ray, s / n))
}

/// Samples one transform of the bump's potential along `ξ = s·ray`.
///
/// Failures at individual samples (an inadmissible `ζ`, a solver that does
/// not converge) are recorded in the curve rather than aborting the sweep.
pub fn sweep_curve(
    kind: ScatterKind,
    phantom: &SmoothBump,
    xi_mags: &[f64],
    zeta_rule: ZetaRule,
    config: &ScatterConfig,
) -> Result<ScatterCurve, ScatterError> {
    let points = match kind {
        ScatterKind::Qhat => xi_mags
            .iter()
            .map(|&s| ScatterPoint {
                xi_mag: s,
                value: Complex64::new(qhat_radial(&|r| phantom.q(r), s), 0.0),
                diverged: false,
                iterations: None,
                failure: None,
            })
            .collect(),
        ScatterKind::Texp => {
            let gamma = |r: f64| phantom.gamma(r);
            let spectrum = DnSpectrum::from_smooth(&gamma, config.truncation, config.shells)?;
            let evaluator =
                TexpEvaluator::new(&spectrum, config.truncation, config.bandwidth, config.divergence)?;
            xi_mags
                .par_iter()
                .map(|&s| {
                    if s == 0.0 && zeta_rule == ZetaRule::Minimal {
                        // t^exp(ξ, ζ_ξ) = O(|ξ|²), so the origin sample is its limit 0.
                        return ScatterPoint {
                            xi_mag: s,
                            value: Complex64::new(0.0, 0.0),
                            diverged: false,
                            iterations: None,
                            failure: None,
                        };
                    }
                    let pair = ray_xi(config.ray, s).and_then(|xi| zeta_rule.pair(&xi, config.azimuth));
                    match pair.map_err(ScatterError::from).and_then(|p| evaluator.evaluate(&p)) {
                        Ok(v) => ScatterPoint {
                            xi_mag: s,
                            value: v.value,
                            diverged: v.diverged,
                            iterations: None,
                            failure: None,
                        },
                        Err(e) => ScatterPoint::failed(s, e.to_string()),
                    }
                })
                .collect()
        }
        ScatterKind::Nonlinear => {
            let grid = Grid3::new(config.n)?;
            let q = phantom.sample_q_on_cube(&grid);
            xi_mags
                .par_iter()
                .map(|&s| {
                    let solve = || -> Result<(Complex64, usize), ScatterError> {
                        let xi = ray_xi(config.ray, s)?;
                        let pair = zeta_rule.pair(&xi, config.azimuth)?;
                        let problem = CgoProblem::new(grid, pair.zeta, &config.green, config.support)?;
                        let solution = problem.solve(&q, config.gmres)?;
                        Ok((t_nonlinear(&pair, &q, &solution)?, solution.iterations))
                    };
                    match solve() {
                        Ok((value, iterations)) => ScatterPoint {
                            xi_mag: s,
                            value,
                            diverged: false,
                            iterations: Some(iterations),
                            failure: None,
                        },
                        Err(e) => ScatterPoint::failed(s, e.to_string()),
                    }
                })
                .collect()
        }
    };
    Ok(ScatterCurve {
        kind,
        zeta_rule,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qhat_of_indicator() {
        let one = |_: f64| 1.0;
        let v = qhat_radial(&one, PI);
        assert!((v - 4.0 / PI).abs() < 1e-12);
        assert!((qhat_radial(&one, 0.0) - 4.0 * PI / 3.0).abs() < 1e-12);
        assert_eq!(qhat_radial(&|_| 0.0, 3.0), 0.0);
    }

    #[test]
    fn texp_vanishes_for_unit_conductivity() {
        let spectrum = DnSpectrum::constant(10);
        let xi = Xi::new([3.0, 0.0, 0.0]).unwrap();
        let pair = make_zeta(&xi, 8.0, 0.3).unwrap();
        let v = TexpEvaluator::new(&spectrum, 10, 16, DivergenceCriterion::default())
            .unwrap()
            .evaluate(&pair)
            .unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
        assert!(!v.diverged);
    }

    #[test]
    fn rejects_inadmissible_pair() {
        let spectrum = DnSpectrum::constant(4);
        let pair = FrequencyPair {
            xi: Xi::new([1.0, 0.0, 0.0]).unwrap(),
            zeta: ComplexFrequency::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).unwrap(),
        };
        assert!(matches!(
            t_exp_radial(&spectrum, &pair, 4),
            Err(ScatterError::NotAdmissible(_))
        ));
    }
}
