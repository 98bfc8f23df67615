mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use eit3d_core::cgo::{solve_mu, GmresConfig, Grid3};
use eit3d_core::dnmap::DnSpectrum;
use eit3d_core::geometry::{make_zeta, make_zeta_min, ComplexFrequency, FrequencyPair, Xi};
use eit3d_core::phantom::SmoothBump;
use eit3d_core::scattering::*;
use num_complex::Complex64;

fn reference() -> SmoothBump {
    SmoothBump::new(0.3, 0.9).unwrap()
}

fn spectrum(bump: &SmoothBump, lmax: usize) -> DnSpectrum {
    DnSpectrum::from_smooth(&|r| bump.gamma(r), lmax, 1024).unwrap()
}

fn nonlinear(bump: &SmoothBump, pair: &FrequencyPair, n: usize) -> Complex64 {
    let grid = Grid3::new(n).unwrap();
    let q = bump.sample_q_on_cube(&grid);
    let sol = solve_mu(&q, &pair.zeta, grid, GmresConfig { tol: 1e-10, max_iter: 300 }).unwrap();
    t_nonlinear(pair, &q, &sol).unwrap()
}

#[test]
fn qhat_closed_forms() {
    assert_eq!(qhat_radial(&|_| 0.0, 3.0), 0.0);
    assert_abs_diff_eq!(qhat_radial(&|_| 1.0, PI), 4.0 / PI, epsilon = 1e-10);
    assert_abs_diff_eq!(qhat_radial(&|_| 1.0, 0.0), 4.0 * PI / 3.0, epsilon = 1e-10);
    for s in [0.5f64, 2.0, 7.0, 20.0] {
        let exact = 4.0 * PI * (s.sin() - s * s.cos()) / (s * s * s);
        assert_abs_diff_eq!(qhat_radial(&|_| 1.0, s), exact, epsilon = 1e-9);
    }
}

#[test]
fn qhat_matches_cube_quadrature() {
    let bump = reference();
    let q = |r: f64| bump.q(r);
    let direct = common::riemann_fourier_3d(&q, [10.0, 0.0, 0.0], 128);
    let radial = qhat_radial(&q, 10.0);
    assert!((direct.re - radial).abs() < 0.005 * radial.abs(), "{direct} vs {radial}");
    assert!(direct.im.abs() < 1e-10);
}

#[test]
fn nonlinear_transform_of_zero_potential() {
    let grid = Grid3::new(16).unwrap();
    let q = vec![Complex64::new(0.0, 0.0); grid.len()];
    let pair = make_zeta(&Xi::along_e1(3.0).unwrap(), 5.0, 0.0).unwrap();
    let sol = solve_mu(&q, &pair.zeta, grid, GmresConfig::default()).unwrap();
    assert_eq!(t_nonlinear(&pair, &q, &sol).unwrap(), Complex64::new(0.0, 0.0));
    let mut bad = pair;
    bad.zeta.re[0] += 0.5;
    assert!(matches!(t_nonlinear(&bad, &q, &sol), Err(ScatterError::NotAdmissible(_))));
}

#[test]
fn nonlinear_transform_approaches_fourier_transform() {
    let bump = reference();
    let xi = Xi::along_e1(10.0).unwrap();
    let qhat = qhat_radial(&|r| bump.q(r), 10.0);
    let errors: Vec<f64> = [8.0, 16.0, 32.0, 50.0]
        .iter()
        .map(|&m| {
            let t = nonlinear(&bump, &make_zeta(&xi, m, 0.0).unwrap(), 64);
            assert!(t.im.abs() < 1e-3 * t.re.abs());
            (t.re - qhat).abs()
        })
        .collect();
    assert!(errors[3] < 0.05 * qhat.abs(), "{errors:?}");
    for w in errors.windows(2) {
        assert!(w[1] < w[0], "{errors:?}");
    }
}

#[test]
fn nonlinear_symmetries() {
    let bump = reference();
    let n = 32;
    let pair = make_zeta(&Xi::along_e1(6.0).unwrap(), 10.0, 0.0).unwrap();
    let t = nonlinear(&bump, &pair, n);
    assert!(t.im.abs() < 1e-3 * t.norm());

    // Conjugate ζ gives the conjugate value for a real even potential.
    let conj = FrequencyPair {
        xi: pair.xi,
        zeta: ComplexFrequency::new(pair.zeta.re, pair.zeta.im.map(|c| -c)).unwrap(),
    };
    let tc = nonlinear(&bump, &conj, n);
    assert!((tc - t.conj()).norm() < 1e-6 * t.norm(), "{tc} vs {t}");

    // The same sample along e₂ (a grid symmetry) agrees to solver tolerance.
    let ray2 = make_zeta(&Xi::new([0.0, 6.0, 0.0]).unwrap(), 10.0, 0.0).unwrap();
    let t2 = nonlinear(&bump, &ray2, n);
    assert!((t2 - t).norm() < 1e-6 * t.norm(), "{t2} vs {t}");
}

#[test]
fn texp_vanishes_for_unit_conductivity() {
    let dn = DnSpectrum::constant(30);
    for (s, m) in [(0.5, 1.0), (10.0, 50.0), (30.0, 50.0)] {
        let pair = make_zeta(&Xi::along_e1(s).unwrap(), m, 0.3).unwrap();
        let v = t_exp_radial(&dn, &pair, 30).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
        assert!(!v.diverged);
    }
    assert!(matches!(
        t_exp_radial(&dn, &make_zeta(&Xi::along_e1(1.0).unwrap(), 2.0, 0.0).unwrap(), 31),
        Err(ScatterError::Truncation { .. })
    ));
}

#[test]
fn texp_matches_closed_form_and_is_zeta_independent() {
    let bump = reference();
    let dn = spectrum(&bump, 30);
    let eval = TexpEvaluator::new(&dn, 30, TEXP_BANDWIDTH, DivergenceCriterion::default()).unwrap();
    for s in [1.0, 5.0, 10.0, 20.0, 30.0] {
        let xi = Xi::along_e1(s).unwrap();
        let exact = common::texp_closed_form(&dn, s, 30);
        let mut values = Vec::new();
        for m in [8.0, 16.0, 30.0, 50.0] {
            if m < s / 2f64.sqrt() {
                continue;
            }
            let v = eval.evaluate(&make_zeta(&xi, m, 0.0).unwrap()).unwrap();
            assert!(!v.diverged, "s = {s}, |ζ| = {m}");
            assert!((v.value.re - exact).abs() < 1e-6 + 1e-6 * exact.abs(), "s = {s}, |ζ| = {m}: {} vs {exact}", v.value);
            assert!(v.value.im.abs() < 1e-6 + 1e-3 * v.value.re.abs());
            values.push(v.value.re);
        }
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(hi - lo <= 0.05 * hi.abs().max(lo.abs()));
    }
}

#[test]
fn texp_rotation_and_small_frequency() {
    let bump = reference();
    let dn = spectrum(&bump, 30);
    let eval = TexpEvaluator::new(&dn, 30, TEXP_BANDWIDTH, DivergenceCriterion::default()).unwrap();
    for s in [2.0, 12.0] {
        let a = eval.evaluate(&make_zeta(&Xi::along_e1(s).unwrap(), 20.0, 0.0).unwrap()).unwrap().value;
        let dir = [1.0, -2.0, 2.0].map(|c: f64| c * s / 3.0);
        let b = eval.evaluate(&make_zeta(&Xi::new(dir).unwrap(), 20.0, 1.1).unwrap()).unwrap().value;
        assert!((a - b).norm() < 1e-8, "{a} vs {b}");
    }
    let ratios: Vec<f64> = [0.5, 0.25, 0.125]
        .iter()
        .map(|&s| {
            let pair = make_zeta_min(&Xi::along_e1(s).unwrap()).unwrap();
            eval.evaluate(&pair).unwrap().value.norm() / (s * s)
        })
        .collect();
    let first = ratios[0];
    for r in &ratios {
        assert!(r.is_finite() && *r <= 2.0 * first, "{ratios:?}");
    }
}

#[test]
fn boundary_formula_agrees_with_volume_formula() {
    let bump = reference();
    let dn = spectrum(&bump, 30);
    let grid = Grid3::new(64).unwrap();
    let q = bump.sample_q_on_cube(&grid);
    for (s, m) in [(4.0, 4.0), (4.0, 8.0)] {
        let mut values = Vec::new();
        for azimuth in [0.0, 1.3] {
            let pair = make_zeta(&Xi::along_e1(s).unwrap(), m, azimuth).unwrap();
            let sol = solve_mu(&q, &pair.zeta, grid, GmresConfig { tol: 1e-10, max_iter: 300 }).unwrap();
            let volume = t_nonlinear(&pair, &q, &sol).unwrap();
            let boundary = t_boundary_check(&pair, &dn, &sol, 30, 48).unwrap();
            assert!((boundary - volume).norm() < 0.1 * volume.norm(), "s = {s}, |ζ| = {m}: {boundary} vs {volume}");
            values.push(boundary);
        }
        assert!((values[0] - values[1]).norm() < 0.02 * values[0].norm(), "{values:?}");
    }
    let zero_q = vec![Complex64::new(0.0, 0.0); grid.len()];
    let pair = make_zeta(&Xi::along_e1(4.0).unwrap(), 4.0, 0.0).unwrap();
    let sol = solve_mu(&zero_q, &pair.zeta, grid, GmresConfig::default()).unwrap();
    let v = t_boundary_check(&pair, &DnSpectrum::constant(30), &sol, 30, 48).unwrap();
    assert_eq!(v, Complex64::new(0.0, 0.0));
}

#[test]
fn texp_sweep_marks_divergence_beyond_the_usable_range() {
    let bump = reference();
    let xs: Vec<f64> = (0..=25).map(|i| 2.0 * i as f64).collect();
    let curve = sweep_curve(ScatterKind::Texp, &bump, &xs, ZetaRule::Fixed { magnitude: 50.0 }, &ScatterConfig::default()).unwrap();
    assert_eq!(curve.xi_mags(), xs);
    for p in &curve.points {
        if p.xi_mag <= 30.0 {
            assert!(p.usable(), "unexpected marker at {}", p.xi_mag);
        }
    }
    assert!(curve.points.iter().any(|p| p.diverged));
    let last = curve.last_usable_before_divergence().unwrap();
    assert!((30.0..=36.0).contains(&last), "{last}");

    // Too small a fixed |ζ| is recorded per sample rather than failing the sweep.
    let curve = sweep_curve(ScatterKind::Texp, &bump, &[1.0, 20.0], ZetaRule::Fixed { magnitude: 5.0 }, &ScatterConfig::default()).unwrap();
    assert!(curve.points[0].usable());
    assert!(curve.points[1].failure.is_some());

    let curve = sweep_curve(ScatterKind::Qhat, &bump, &[0.0, 10.0], ZetaRule::Minimal, &ScatterConfig::default()).unwrap();
    assert_abs_diff_eq!(curve.points[1].value.re, qhat_radial(&|r| bump.q(r), 10.0), epsilon = 1e-15);
}
