use super::{domain, SpecialError};
use num_complex::Complex64;
use std::f64::consts::PI;

// Lanczos approximation, g = 671/128 (14-term set).
const LANCZOS_SHIFT: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_76e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const LN_PI: f64 = 1.144_729_885_849_400_2;

fn lanczos(x: f64) -> f64 {
    let t = x + LANCZOS_SHIFT;
    let mut ser = LANCZOS_C0;
    let mut y = x;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    (x + 0.5) * t.ln() - t + (SQRT_2PI * ser / x).ln()
}

fn lanczos_complex(z: Complex64) -> Complex64 {
    let t = z + LANCZOS_SHIFT;
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    let mut y = z;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    (z + 0.5) * t.ln() - t + (ser * SQRT_2PI / z).ln()
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64, SpecialError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("ln_gamma", x, "x > 0"));
    }
    Ok(lanczos(x))
}

/// `sin(πx)` with the argument reduced exactly first.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let mut r = x - 2.0 * (0.5 * x).round();
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    (PI * r).sin()
}

/// `(ln|Γ(x)|, sign Γ(x))` for any real `x`. Poles give `(+∞, 0)`.
pub fn gamma_signed(x: f64) -> (f64, f64) {
    if x > 0.0 {
        return (lanczos(x), 1.0);
    }
    if x == x.floor() {
        return (f64::INFINITY, 0.0);
    }
    let s = sin_pi(x);
    (LN_PI - s.abs().ln() - lanczos(1.0 - x), s.signum())
}

/// `1/Γ(x)`, zero at the poles of Γ.
pub fn recip_gamma(x: f64) -> f64 {
    let (lg, sign) = gamma_signed(x);
    if sign == 0.0 {
        0.0
    } else {
        sign * (-lg).exp()
    }
}

/// `ln sin(πz)` on the principal strip, stable for large `|Im z|`.
pub(crate) fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(πz) = e^{-iπz}(1 - e^{2iπz})·(i/2)
    let i = Complex64::i();
    let rotated = (i * 2.0 * PI * z).exp();
    -i * PI * z + (Complex64::new(1.0, 0.0) - rotated).ln() + Complex64::new(0.5f64.ln(), 0.5 * PI)
}

/// `ln Γ(z)` for complex `z` off the poles (any branch; only `exp` of sums
/// of these values is ever used).
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        Complex64::new(LN_PI, 0.0) - ln_sin_pi(z) - lanczos_complex(Complex64::new(1.0, 0.0) - z)
    } else {
        lanczos_complex(z)
    }
}

/// `ψ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64, SpecialError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("digamma", x, "x > 0"));
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < 10.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let r = 1.0 / (y * y);
    // ln y - 1/(2y) - Σ B_{2k}/(2k y^{2k})
    let tail = r
        * (1.0 / 12.0
            - r * (1.0 / 120.0
                - r * (1.0 / 252.0
                    - r * (1.0 / 240.0 - r * (1.0 / 132.0 - r * (691.0 / 32760.0 - r / 12.0))))));
    Ok(acc + y.ln() - 0.5 / y - tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn known_values() {
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-15);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-15);
        assert!((ln_gamma(0.5).unwrap() - 0.572_364_942_924_700_1).abs() < 1e-15);
        assert!((ln_gamma(10.0).unwrap() - 362_880f64.ln()).abs() < 1e-13);
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
    }

    #[test]
    fn digamma_values() {
        assert!((digamma(1.0).unwrap() + EULER).abs() < 1e-14);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER)).abs() < 1e-14);
        assert!((digamma(0.5).unwrap() - (-EULER - 2.0 * 2f64.ln())).abs() < 1e-14);
        assert!(digamma(-1.0).is_err());
    }

    #[test]
    fn signed_gamma_across_poles() {
        let (lg, s) = gamma_signed(-0.5);
        assert!((s * lg.exp() + 2.0 * PI.sqrt()).abs() < 1e-13);
        let (lg, s) = gamma_signed(-1.5);
        assert!((s * lg.exp() - 4.0 / 3.0 * PI.sqrt()).abs() < 1e-13);
        assert_eq!(gamma_signed(-3.0).1, 0.0);
        assert_eq!(recip_gamma(0.0), 0.0);
        assert!((recip_gamma(3.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn complex_matches_real_on_axis() {
        for x in [0.3, 1.7, 4.7424, 25.0, -2.3, -0.7] {
            let (lg, s) = gamma_signed(x);
            let z = ln_gamma_complex(Complex64::new(x, 0.0));
            assert!((z.re - lg).abs() < 1e-12, "x = {x}");
            let phase = z.im.rem_euclid(2.0 * PI);
            let expect = if s > 0.0 { 0.0 } else { PI };
            assert!((phase - expect).abs() < 1e-9 || (phase - 2.0 * PI).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn complex_recurrence() {
        for z in [
            Complex64::new(0.3, 2.0),
            Complex64::new(-3.7, 0.4),
            Complex64::new(2.5, -40.0),
            Complex64::new(-20.2, 15.0),
        ] {
            let lhs = ln_gamma_complex(z + 1.0);
            let rhs = ln_gamma_complex(z) + z.ln();
            let diff = (lhs - rhs).exp();
            assert!((diff - 1.0).norm() < 1e-11, "z = {z}: {diff}");
        }
    }

    #[test]
    fn ln_sin_matches_direct() {
        for z in [Complex64::new(0.3, 0.2), Complex64::new(-4.6, -1.1), Complex64::new(7.25, 3.0)] {
            let direct = (z * PI).sin();
            let via = ln_sin_pi(z).exp();
            assert!((direct - via).norm() < 1e-12 * direct.norm(), "z = {z}");
        }
    }
}
