//! Independent reference computations for the integration tests.
//!
//! Nothing here calls the library's special functions: distribution functions
//! are obtained by adaptive quadrature of the densities and gamma values of
//! half-integers by their product formula.

#![allow(dead_code)]

pub mod corpus;

use std::f64::consts::PI;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let f: &dyn Fn(f64) -> f64 = &f;
    // split into panels so narrow peaks are not missed by the first estimate
    let panels = 16;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let (lo, hi) = (a + h * i as f64, a + h * (i + 1) as f64);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = simpson(lo, hi, fa, fm, fb);
            adaptive(f, lo, hi, fa, fm, fb, whole, tol / panels as f64, 48)
        })
        .sum()
}

fn normal_density(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * PI).sqrt()
}

/// `Phi(x)` by quadrature of the density over `(-inf, min(x, -x)]`, mapped to
/// `[0, 1)` by `t = y - u/(1-u)`.
pub fn normal_cdf(x: f64) -> f64 {
    let y = -x.abs();
    let tail = integrate(
        |u| {
            if u >= 1.0 {
                0.0
            } else {
                normal_density(y - u / (1.0 - u)) / ((1.0 - u) * (1.0 - u))
            }
        },
        0.0,
        1.0,
        1e-14,
    );
    if x < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// `ln Gamma(n/2)` from `Gamma(1) = 1`, `Gamma(1/2) = sqrt(pi)` and the recurrence.
pub fn ln_gamma_half(n: u32) -> f64 {
    let (mut a, mut acc) = if n.is_multiple_of(2) { (1.0, 0.0) } else { (0.5, 0.5 * PI.ln()) };
    while a < f64::from(n) / 2.0 {
        acc += a.ln();
        a += 1.0;
    }
    acc
}

/// Chi-square CDF by quadrature of the density after `t = u^2`, which removes
/// the singularity at 0 for `n = 1`.
pub fn chi_square_cdf(x: f64, n: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let nf = f64::from(n);
    let log_norm = -(nf / 2.0) * 2f64.ln() - ln_gamma_half(n);
    let g = |u: f64| {
        if u == 0.0 {
            return if n == 1 { 2.0 * log_norm.exp() } else { 0.0 };
        }
        2.0 * ((nf - 1.0) * u.ln() - u * u / 2.0 + log_norm).exp()
    };
    integrate(g, 0.0, x.sqrt(), 1e-13).min(1.0)
}

/// Smallest `x` with `chi_square_cdf(x, n) >= p`, by bisection on the
/// quadrature oracle.
pub fn chi_square_quantile(p: f64, n: u32) -> f64 {
    let (mut lo, mut hi) = (0.0, 10.0 * f64::from(n) + 100.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if chi_square_cdf(mid, n) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
