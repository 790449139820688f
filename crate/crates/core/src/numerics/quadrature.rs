//! Double-exponential quadrature.
//!
//! Semi-infinite integrals are mapped with `x = lower + s·u²` first. Gamma-Gamma
//! type tails decay like `exp(-c·√x)`, which becomes a plain exponential in `u`,
//! and the exp-sinh rule then sees double-exponential decay at both ends.

use super::{NumericsError, QuadratureResult, ToleranceSpec};
use std::f64::consts::FRAC_PI_2;

const BASE_STEP: f64 = 0.5;
const MAX_LEVEL: u32 = 12;
const T_LIMIT: f64 = 6.5;
// A node whose term falls this far below the largest term seen so far is
// treated as the edge of the support on that side.
const NEGLIGIBLE: f64 = 1e-20;

/// `∫_lower^∞ f(x) dx` with unit scale. See [`integrate_semi_infinite_scaled`].
pub fn integrate_semi_infinite<F>(
    f: F,
    lower: f64,
    tol: ToleranceSpec,
) -> Result<QuadratureResult, NumericsError>
where
    F: Fn(f64) -> f64,
{
    integrate_semi_infinite_scaled(f, lower, 1.0, tol)
}

/// `∫_lower^∞ f(x) dx`, where `scale` is a rough width of the integrand
/// measured from `lower`. The result does not depend on `scale`, but the
/// number of levels needed does.
pub fn integrate_semi_infinite_scaled<F>(
    f: F,
    lower: f64,
    scale: f64,
    tol: ToleranceSpec,
) -> Result<QuadratureResult, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !lower.is_finite() {
        return Err(NumericsError::InvalidInput(format!("lower limit {lower} is not finite")));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(NumericsError::InvalidInput(format!("scale {scale} must be positive")));
    }
    let node = move |t: f64| -> Option<(f64, f64)> {
        let u = (FRAC_PI_2 * t.sinh()).exp();
        let x = lower + scale * u * u;
        let w = 2.0 * scale * u * u * FRAC_PI_2 * t.cosh();
        if x.is_finite() && w.is_finite() && w > 0.0 && x > lower {
            Some((x, w))
        } else {
            None
        }
    };
    run_levels(&f, node, tol)
}

/// `∫_a^b f(x) dx` by tanh-sinh. The integrand is never evaluated at the
/// endpoints, so integrable endpoint singularities are fine.
pub fn integrate_interval<F>(
    f: F,
    a: f64,
    b: f64,
    tol: ToleranceSpec,
) -> Result<QuadratureResult, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::InvalidInput(format!("interval [{a}, {b}] is not finite")));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 1,
        });
    }
    if b < a {
        let r = integrate_interval(f, b, a, tol)?;
        return Ok(QuadratureResult { value: -r.value, ..r });
    }
    let width = b - a;
    // Each t maps to one node; negative t lands near `a`, positive near `b`.
    let node = move |t: f64| -> Option<(f64, f64)> {
        let y = FRAC_PI_2 * t.abs().sinh();
        let e = (-2.0 * y).exp();
        let delta = width * e / (1.0 + e);
        let x = if t < 0.0 { a + delta } else { b - delta };
        let w = width * FRAC_PI_2 * t.cosh() * 2.0 * e / ((1.0 + e) * (1.0 + e));
        if x > a && x < b && w > 0.0 {
            Some((x, w))
        } else {
            None
        }
    };
    run_levels(&f, node, tol)
}

struct Sweep {
    sum: f64,
    evaluations: usize,
}

fn eval_term<F: Fn(f64) -> f64>(f: &F, x: f64, w: f64) -> Result<f64, NumericsError> {
    let y = f(x);
    if !y.is_finite() {
        return Err(NumericsError::NonFiniteIntegrand { at: x, value: y });
    }
    Ok(y * w)
}

fn run_levels<F, N>(f: &F, node: N, tol: ToleranceSpec) -> Result<QuadratureResult, NumericsError>
where
    F: Fn(f64) -> f64,
    N: Fn(f64) -> Option<(f64, f64)>,
{
    // Level 0 fixes the truncation window by walking outward from t = 0.
    let mut evaluations = 0usize;
    let mut sum = 0.0;
    let mut peak = 0.0f64;
    if let Some((x, w)) = node(0.0) {
        let term = eval_term(f, x, w)?;
        evaluations += 1;
        sum += term;
        peak = peak.max(term.abs());
    }
    let mut t_hi = 0.0;
    let mut t_lo = 0.0;
    for direction in [1.0, -1.0] {
        let mut k = 1;
        let mut quiet = 0;
        loop {
            let t = direction * k as f64 * BASE_STEP;
            if t.abs() > T_LIMIT {
                break;
            }
            let Some((x, w)) = node(t) else { break };
            let term = eval_term(f, x, w)?;
            evaluations += 1;
            sum += term;
            peak = peak.max(term.abs());
            if direction > 0.0 {
                t_hi = t;
            } else {
                t_lo = t;
            }
            if peak > 0.0 && term.abs() <= NEGLIGIBLE * peak {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
            k += 1;
        }
    }
    let mut estimate = sum * BASE_STEP;
    let mut error = f64::INFINITY;

    for level in 1..=MAX_LEVEL {
        let h = BASE_STEP / f64::from(1u32 << level);
        let Sweep { sum: fresh, evaluations: n } = sweep_odd(f, &node, h, t_lo, t_hi)?;
        evaluations += n;
        let refined = 0.5 * estimate + h * fresh;
        error = (refined - estimate).abs();
        estimate = refined;
        if level >= 2 && error <= tol.target(estimate) {
            return Ok(QuadratureResult {
                value: estimate,
                abs_error_estimate: error,
                evaluations,
            });
        }
        if evaluations > tol.max_evaluations {
            break;
        }
    }
    Err(NumericsError::NonConvergence {
        best: estimate,
        error_estimate: error,
        evaluations,
    })
}

fn sweep_odd<F, N>(f: &F, node: &N, h: f64, t_lo: f64, t_hi: f64) -> Result<Sweep, NumericsError>
where
    F: Fn(f64) -> f64,
    N: Fn(f64) -> Option<(f64, f64)>,
{
    let mut sum = 0.0;
    let mut evaluations = 0;
    let first = (t_lo / h).floor() as i64;
    let last = (t_hi / h).ceil() as i64;
    for j in first..=last {
        if j.rem_euclid(2) == 0 {
            continue;
        }
        let t = j as f64 * h;
        if t < t_lo - h || t > t_hi + h {
            continue;
        }
        if let Some((x, w)) = node(t) {
            sum += eval_term(f, x, w)?;
            evaluations += 1;
        }
    }
    Ok(Sweep { sum, evaluations })
}
