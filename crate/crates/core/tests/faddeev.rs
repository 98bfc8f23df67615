use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use eit3d_core::cgo::Grid3;
use eit3d_core::faddeev::*;
use eit3d_core::geometry::{make_zeta, mat_vec, rotation_about_axis, ComplexFrequency, Xi};
use num_complex::Complex64;
use rand::{rngs::StdRng, Rng, SeedableRng};

fn random_unit(rng: &mut StdRng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|c| c / n);
        }
    }
}

#[test]
fn bessel_j1_values() {
    assert_eq!(bessel_j1(0.0), 0.0);
    assert_abs_diff_eq!(bessel_j1(1e-8) / 1e-8, 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(bessel_j1(1.0), 0.4400505857449335, epsilon = 1e-15);
    assert_abs_diff_eq!(bessel_j1(-1.0), -0.4400505857449335, epsilon = 1e-15);
    assert_abs_diff_eq!(bessel_j1(10.0), 0.04347274616886144, epsilon = 1e-14);
    assert_abs_diff_eq!(bessel_j1(3.8317059702075125), 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(bessel_j1(100.0), -0.07714535201411216, epsilon = 1e-14);
}

#[test]
fn ray_along_imaginary_direction() {
    // On the positive e₂ ray the integral vanishes and g = 1/(4πr).
    for r in [0.01, 0.5, 1.0, 7.0] {
        let g = g_reference([0.0, r, 0.0], &GreenEvalConfig::default()).unwrap();
        assert_abs_diff_eq!(g.re, 1.0 / (4.0 * PI * r), epsilon = 1e-12 / r);
        assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-15);
    }
}

#[test]
fn u_midpoint_converges_at_least_linearly() {
    let x = [1.0, 0.0, 0.0];
    let values: Vec<Complex64> = [256usize, 512, 1024, 2048, 4096]
        .iter()
        .map(|&n| g_reference(x, &GreenEvalConfig::u_midpoint(n)).unwrap())
        .collect();
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    for w in diffs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.0, "observed order {order}, differences {diffs:?}");
    }
    assert!(diffs[diffs.len() - 1] < 1e-8, "{diffs:?}");
    let reference = g_reference(x, &GreenEvalConfig::default()).unwrap();
    assert!((values[4] - reference).norm() < 1e-6);
}

#[test]
fn scaling_and_rotation() {
    let mut rng = StdRng::seed_from_u64(11);
    let cfg = GreenEvalConfig::default();
    for _ in 0..20 {
        let xi = Xi::new(random_unit(&mut rng).map(|c| c * 3.0)).unwrap();
        let pair = make_zeta(&xi, 4.0, rng.random_range(0.0..2.0 * PI)).unwrap();
        let zeta = pair.zeta;
        let x = random_unit(&mut rng).map(|c| c * rng.random_range(0.1..1.5));
        let g = g_zeta(x, &zeta, &cfg).unwrap();

        let doubled = ComplexFrequency::new(zeta.re.map(|c| 2.0 * c), zeta.im.map(|c| 2.0 * c)).unwrap();
        let g2 = g_zeta(x, &doubled, &cfg).unwrap();
        let expected = g_zeta(x.map(|c| 2.0 * c), &zeta, &cfg).unwrap() * 2.0;
        assert!((g2 - expected).norm() < 1e-10 * expected.norm().max(1.0), "{g2} vs {expected}");

        let rot = rotation_about_axis(random_unit(&mut rng), rng.random_range(0.0..PI));
        let g_rot = g_zeta(mat_vec(&rot, x), &zeta.rotated(&rot), &cfg).unwrap();
        assert!((g_rot - g).norm() < 1e-10 * g.norm().max(1.0), "{g_rot} vs {g}");
    }
}

#[test]
fn periodic_sampling_at_large_frequency() {
    let xi = Xi::along_e1(10.0).unwrap();
    let zeta = make_zeta(&xi, 50.0, 0.0).unwrap().zeta;
    let grid = Grid3::new(64).unwrap();
    let g = sample_g_periodic(&zeta, &grid, &GreenEvalConfig::default(), KernelSupport::FullCube).unwrap();
    assert_eq!(g.len(), grid.len());
    assert_eq!(g[0], Complex64::new(0.0, 0.0));
    assert!(g.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    let ball = sample_g_periodic(&zeta, &grid, &GreenEvalConfig::default(), KernelSupport::Ball { radius: 1.0 }).unwrap();
    for (idx, v) in ball.iter().enumerate() {
        let x = grid.position(idx);
        if x.iter().map(|c| c * c).sum::<f64>() > 1.0 {
            assert_eq!(*v, Complex64::new(0.0, 0.0));
        } else {
            assert_eq!(*v, g[idx]);
        }
    }
}

#[test]
fn inverts_the_faddeev_operator() {
    // ∫ g_ζ(z) (Lφ)(x - z) dz = φ(x) with L = -Δ - 2iζ·∇ and φ a unit Gaussian,
    // for which Lφ(y) = (3 - |y|² + 2iζ·y) φ(y).
    let zeta = ComplexFrequency::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).unwrap();
    let cfg = GreenEvalConfig::default();
    let phi = |y: [f64; 3]| (-0.5 * (y[0] * y[0] + y[1] * y[1] + y[2] * y[2])).exp();
    let l_phi = |y: [f64; 3]| {
        let r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        Complex64::new(3.0 - r2, 0.0) + Complex64::new(0.0, 2.0) * zeta.dot_real(y)
    } * phi(y);
    let x = [0.3, -0.2, 0.4];
    let (nr, nt, np) = (160, 48, 48);
    let r_max = 9.0;
    let hr = r_max / nr as f64;
    let ht = 2.0 / nt as f64;
    let hp = 2.0 * PI / np as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..nr {
        let r = (a as f64 + 0.5) * hr;
        for b in 0..nt {
            let c = -1.0 + (b as f64 + 0.5) * ht;
            let s = (1.0 - c * c).sqrt();
            for k in 0..np {
                let p = (k as f64 + 0.5) * hp;
                let z = [r * s * p.cos(), r * s * p.sin(), r * c];
                let g = g_zeta(z, &zeta, &cfg).unwrap();
                acc += g * l_phi([x[0] - z[0], x[1] - z[1], x[2] - z[2]]) * (r * r);
            }
        }
    }
    acc *= hr * ht * hp;
    let expected = phi(x);
    assert!((acc - expected).norm() < 0.01 * expected, "{acc} vs {expected}");
}
