//! Gamma, error function and Bessel-K against independent series and
//! integral representations.

use fso_capacity::numerics::{integrate_interval, ToleranceSpec};
use fso_capacity::special::{bessel_k, digamma, erf, erfc, ln_gamma};
use std::f64::consts::PI;

/// Stirling series after shifting the argument past 40.
fn ln_gamma_stirling(x: f64) -> f64 {
    // B_{2k} for k = 1..=12
    const B: [f64; 12] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
        43867.0 / 798.0,
        -174611.0 / 330.0,
        854513.0 / 138.0,
        -236364091.0 / 2730.0,
    ];
    let mut shift = 0.0;
    let mut w = x;
    while w < 40.0 {
        shift += w.ln();
        w += 1.0;
    }
    let mut series = 0.0;
    for (k, b) in B.iter().enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        series += b / (n * (n - 1.0) * w.powf(n - 1.0));
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}

/// Maclaurin series `2/√π Σ (-1)^n x^{2n+1} / (n!(2n+1))` to machine precision.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= -x * x / n;
        let add = term / (2.0 * n + 1.0);
        sum += add;
        if add.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    2.0 / PI.sqrt() * sum
}

#[test]
fn ln_gamma_against_stirling() {
    for x in [0.5, 1.0, 1.1896, 3.0133, 4.7424, 7.25, 19.0, 33.3] {
        let v = ln_gamma(x).unwrap();
        let o = ln_gamma_stirling(x);
        assert!((v - o).abs() <= 1e-13 * o.abs().max(1.0), "x = {x}: {v} vs {o}");
    }
    assert!((ln_gamma(0.5).unwrap() - 0.5723649429247001).abs() < 1e-15);
    assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
    assert!(ln_gamma(0.0).is_err() && ln_gamma(-1.5).is_err());
}

#[test]
fn digamma_closed_forms() {
    let euler = 0.5772156649015329;
    assert!((digamma(1.0).unwrap() + euler).abs() < 1e-12);
    assert!((digamma(2.0).unwrap() - (1.0 - euler)).abs() < 1e-12);
    assert!((digamma(0.5).unwrap() - (-euler - 2.0 * 2f64.ln())).abs() < 1e-12);
    assert!(digamma(0.0).is_err());
}

#[test]
fn erf_against_maclaurin() {
    for x in [0.0, 0.1, 0.5, 1.0, 1.7] {
        let o = erf_series(x);
        assert!((erf(x) - o).abs() <= 1e-12 * o.abs(), "x = {x}: {} vs {o}", erf(x));
        assert_eq!(erf(-x), -erf(x));
    }
    assert_eq!(erf(40.0), 1.0);
    assert!((erfc(0.5) - (1.0 - erf_series(0.5))).abs() < 1e-15);
}

#[test]
fn bessel_k_against_integral_representation() {
    let tol = ToleranceSpec::relative(1e-13);
    for (nu, x) in [(1.7291f64, 3.0f64), (0.0, 0.4), (2.5, 10.0), (0.3, 50.0), (3.6288, 0.8)] {
        // K_ν(x) = ∫₀^∞ e^{-x cosh t} cosh(νt) dt; the integrand is negligible past T
        let t_max = (2.0 * (40.0 + nu.abs() * 10.0) / x).acosh().max(5.0);
        let o = integrate_interval(|t: f64| (-x * t.cosh()).exp() * (nu * t).cosh(), 0.0, t_max, tol)
            .unwrap()
            .value;
        let v = bessel_k(nu, x).unwrap();
        assert!(((v - o) / o).abs() <= 1e-10, "K_{nu}({x}) = {v} vs {o}");
        assert_eq!(bessel_k(-nu, x).unwrap(), v);
    }
    let half = bessel_k(0.5, 1.0).unwrap();
    assert!((half - 0.4610685044478946).abs() < 1e-12);
    assert!(bessel_k(1.0, 0.0).is_err());
}
