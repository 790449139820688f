//! Bracketing root finder (Brent: inverse quadratic / secant / bisection).

use super::{NumericsError, ToleranceSpec};

const MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub root: f64,
    pub iterations: usize,
    /// `g(root)`
    pub residual: f64,
}

/// Root of a continuous monotone `g` on `bracket`.
///
/// Stops when `|g(x)| <= abs_tol` or the bracket around `x` is narrower than
/// `rel_tol·|x|`. The bracket midpoint is probed first, so re-solving from a
/// bracket centred on a converged root finishes in one iteration.
/// Non-finite values of `g` (for instance `ln 0` far out on a decaying
/// residual) are accepted at the bracket ends and force bisection steps.
pub fn find_root_monotone<G>(g: G, bracket: (f64, f64), tol: ToleranceSpec) -> Result<RootResult, NumericsError>
where
    G: Fn(f64) -> f64,
{
    let (mut a, mut b) = bracket;
    if !a.is_finite() || !b.is_finite() || a == b {
        return Err(NumericsError::InvalidInput(format!("bad bracket ({a}, {b})")));
    }
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut fa = g(a);
    let mut fb = g(b);
    if fa.is_nan() || fb.is_nan() {
        return Err(NumericsError::NonFiniteIntegrand {
            at: if fa.is_nan() { a } else { b },
            value: f64::NAN,
        });
    }
    if fa == 0.0 {
        return Ok(RootResult { root: a, iterations: 0, residual: 0.0 });
    }
    if fb == 0.0 {
        return Ok(RootResult { root: b, iterations: 0, residual: 0.0 });
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange { lo: a, hi: b, g_lo: fa, g_hi: fb });
    }

    // Midpoint probe.
    let m = 0.5 * (a + b);
    let fm = g(m);
    if fm.is_nan() {
        return Err(NumericsError::NonFiniteIntegrand { at: m, value: fm });
    }
    if fm.abs() <= tol.abs_tol {
        return Ok(RootResult { root: m, iterations: 1, residual: fm });
    }
    if fm.signum() == fa.signum() {
        a = m;
        fa = fm;
    } else {
        b = m;
        fb = fm;
    }

    // Brent proper; `b` is the best estimate, `c` the contrapoint.
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for iteration in 2..=MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if better(fc, fb) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol_x = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.rel_tol * b.abs() + f64::MIN_POSITIVE;
        let half = 0.5 * (c - b);
        if fb.abs() <= tol.abs_tol || half.abs() <= tol_x {
            return Ok(RootResult {
                root: b,
                iterations: iteration,
                residual: fb,
            });
        }
        let interpolate = e.abs() >= tol_x && better(fb, fa) && fa.is_finite() && fb.is_finite() && fc.is_finite();
        if interpolate {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * half * s, 1.0 - s)
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0)),
                    (qa - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * half * q - (tol_x * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol_x { d } else { tol_x.copysign(half) };
        fb = g(b);
        if fb.is_nan() {
            return Err(NumericsError::NonFiniteIntegrand { at: b, value: fb });
        }
    }
    Err(NumericsError::MaxIterations {
        best: b,
        iterations: MAX_ITERATIONS,
    })
}

/// `|x| < |y|`, treating infinities as large.
fn better(x: f64, y: f64) -> bool {
    x.abs() < y.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_roots() {
        let tol = ToleranceSpec::default().with_abs_tol(1e-15);
        let r = find_root_monotone(|x| (-x).exp() - 0.5, (0.0, 10.0), tol).unwrap();
        assert!((r.root - std::f64::consts::LN_2).abs() < 1e-10);
        let r = find_root_monotone(|x| x * x - 2.0, (0.0, 2.0), tol).unwrap();
        assert!((r.root - std::f64::consts::SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn no_sign_change_is_reported() {
        let err = find_root_monotone(|x| x * x + 1.0, (-1.0, 2.0), ToleranceSpec::default()).unwrap_err();
        assert!(matches!(err, NumericsError::NoSignChange { .. }));
    }

    #[test]
    fn infinite_end_values_are_tolerated() {
        // ln(e^{-x}) - ln(0.25) with e^{-x} underflowing at the right end
        let g = |x: f64| (-x).exp().ln() - 0.25f64.ln();
        let r = find_root_monotone(g, (0.0, 1000.0), ToleranceSpec::default()).unwrap();
        assert!((r.root - 4.0f64.ln()).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn resolving_from_centred_bracket_is_immediate() {
        let tol = ToleranceSpec::default().with_rel_tol(1e-15).with_abs_tol(1e-12);
        let g = |x: f64| x.powi(3) - 5.0;
        let first = find_root_monotone(g, (0.0, 5.0), tol).unwrap();
        let again = find_root_monotone(g, (first.root * 0.9, first.root * 1.1), tol).unwrap();
        assert!(again.iterations <= 2, "{again:?}");
    }
}
