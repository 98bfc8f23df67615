//! Bessel function of the first kind of order one.
//!
//! Three regimes: the ascending series for `|x| < 5`, Miller's backward
//! recurrence normalised by `J₀ + 2ΣJ_{2k} = 1` for `5 ≤ |x| < 25`, and the
//! Hankel asymptotic expansion beyond. Relative accuracy is about `1e-14`
//! away from the zeros.

use std::f64::consts::{FRAC_2_PI, PI};

const SERIES_LIMIT: f64 = 5.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// `J₁(x)`; odd in `x`.
pub fn bessel_j1(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let v = if ax < SERIES_LIMIT {
        series(ax)
    } else if ax < ASYMPTOTIC_LIMIT {
        miller(ax)
    } else if ax.is_finite() {
        asymptotic(ax)
    } else {
        0.0
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn series(x: f64) -> f64 {
    let h = 0.5 * x;
    let h2 = h * h;
    let mut term = h;
    let mut sum = h;
    for k in 1..60 {
        let kf = k as f64;
        term *= -h2 / (kf * (kf + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn miller(x: f64) -> f64 {
    // Starting order past which J_n(x) is below 1e-16 relative to J_1.
    let start = 2 * ((x + 14.0 * x.cbrt()) as usize / 2 + 1);
    let mut j_next = 0.0;
    let mut j_cur = 1e-300;
    let mut j1 = 0.0;
    let mut norm = 0.0;
    for n in (1..=start).rev() {
        let j_prev = 2.0 * n as f64 / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        // j_cur now holds the unnormalised J_{n-1}.
        if n - 1 == 1 {
            j1 = j_cur;
        }
        if (n - 1) % 2 == 0 && n - 1 > 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            j1 *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += j_cur;
    j1 / norm
}

fn asymptotic(x: f64) -> f64 {
    // P and Q series with μ = 4ν² = 4.
    let mu = 4.0;
    let z8 = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * z8);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        if k % 2 == 1 {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            q += sign * term;
        } else {
            let sign = if (k / 2) % 2 == 1 { -1.0 } else { 1.0 };
            p += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - 0.75 * PI;
    let (s, c) = chi.sin_cos();
    (FRAC_2_PI / x).sqrt() * (p * c - q * s)
}
