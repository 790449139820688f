//! Modified Bessel function of the second kind for real order.
//!
//! Temme's series for `x < 2`, Steed's continued fraction otherwise, both at
//! a reduced order `|μ| ≤ 1/2`; the requested order is reached by forward
//! recurrence on the ratios `K_{μ+i+1}/K_{μ+i}` in log space.

use super::gamma::{ln_gamma, sin_pi};
use super::{domain, SpecialError};
use std::f64::consts::PI;

const EPS: f64 = 1e-16;
const EULER: f64 = 0.577_215_664_901_532_9;

// Taylor coefficients of 1/Γ(z) about 0; index k multiplies z^k.
const RGAMMA_TAYLOR: [f64; 27] = [
    0.0,
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_9,
    -0.042_002_635_034_095_235,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_336,
    -0.009_621_971_527_876_973,
    0.007_218_943_246_663_099,
    -0.001_165_167_591_859_065_1,
    -0.000_215_241_674_114_950_97,
    0.000_128_050_282_388_116_19,
    -2.013_485_478_078_823_9e-5,
    -1.250_493_482_142_670_7e-6,
    1.133_027_231_981_695_9e-6,
    -2.056_338_416_977_607_1e-7,
    6.116_095_104_481_416e-9,
    5.002_007_644_469_223e-9,
    -1.181_274_570_487_020_1e-9,
    1.043_426_711_691_100_5e-10,
    7.782_263_439_905_071e-12,
    -3.696_805_618_642_205_7e-12,
    5.100_370_287_454_476e-13,
    -2.058_326_053_566_506_8e-14,
    -5.348_122_539_423_018e-15,
    1.226_778_628_238_260_8e-15,
    -1.181_259_301_697_458_8e-16,
];

/// `γ₁(μ) = (1/Γ(1-μ) - 1/Γ(1+μ))/(2μ)` and `γ₂(μ) = (1/Γ(1-μ) + 1/Γ(1+μ))/2`.
fn temme_gammas(mu: f64) -> (f64, f64) {
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    for k in (1..RGAMMA_TAYLOR.len()).rev() {
        let c = RGAMMA_TAYLOR[k];
        if k % 2 == 0 {
            g1 = g1 * mu * mu - c;
        } else {
            g2 = g2 * mu * mu + c;
        }
    }
    (g1, g2)
}

/// `(ln K_μ(x), ln K_{μ+1}(x))` for `|μ| ≤ 1/2`.
fn ln_pair(mu: f64, x: f64) -> Result<(f64, f64), SpecialError> {
    if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / sin_pi(mu) };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2) = temme_gammas(mu);
        let gampl = gam2 - mu * gam1;
        let gammi = gam2 + mu * gam1;
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut i = 1.0;
        loop {
            ff = (i * ff + p + q) / (i * i - mu * mu);
            c *= dd / i;
            p /= i - mu;
            q /= i + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - i * ff);
            if del.abs() < sum.abs() * EPS {
                break;
            }
            i += 1.0;
            if i > 500.0 {
                return Err(SpecialError::NoConvergence {
                    function: "bessel_k",
                    detail: format!("Temme series at mu = {mu}, x = {x}"),
                });
            }
        }
        Ok((sum.ln(), sum1.ln() + (2.0 / x).ln()))
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu * mu;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut i = 1.0;
        loop {
            a -= 2.0 * i;
            c = -a * c / (i + 1.0);
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
            i += 1.0;
            if i > 10_000.0 {
                return Err(SpecialError::NoConvergence {
                    function: "bessel_k",
                    detail: format!("Steed fraction at mu = {mu}, x = {x}"),
                });
            }
        }
        h *= a1;
        let ln_k = 0.5 * (PI / (2.0 * x)).ln() - x - s.ln();
        let ratio = (mu + x + 0.5 - h) / x;
        Ok((ln_k, ln_k + ratio.ln()))
    }
}

/// Leading small-argument behaviour, used only below 1e-290 where the
/// series would need `2/x` beyond the double range.
fn ln_tiny(nu: f64, x: f64) -> f64 {
    let l = (2.0 / x).ln();
    if nu < 1e-6 {
        (l - EULER).ln()
    } else {
        ln_gamma(nu).unwrap_or(f64::INFINITY) - std::f64::consts::LN_2 + nu * l
    }
}

/// `ln K_ν(x)` for `x > 0`.
pub fn ln_bessel_k(nu: f64, x: f64) -> Result<f64, SpecialError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("bessel_k", x, "x > 0"));
    }
    if !nu.is_finite() {
        return Err(domain("bessel_k", nu, "finite order"));
    }
    let nu = nu.abs();
    if x < 1e-290 {
        return Ok(ln_tiny(nu, x));
    }
    let n = (nu + 0.5).floor();
    let mu = nu - n;
    let (ln_kmu, ln_kmu1) = ln_pair(mu, x)?;
    if n == 0.0 {
        return Ok(ln_kmu);
    }
    let mut acc = ln_kmu1;
    let mut r = (ln_kmu1 - ln_kmu).exp();
    let mut order = mu + 1.0;
    for _ in 1..(n as usize) {
        r = 2.0 * order / x + 1.0 / r;
        acc += r.ln();
        order += 1.0;
    }
    Ok(acc)
}

/// `K_ν(x)`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64, SpecialError> {
    ln_bessel_k(nu, x).map(f64::exp)
}

/// `e^x K_ν(x)`.
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64, SpecialError> {
    ln_bessel_k(nu, x).map(|l| (l + x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_closed_form() {
        for x in [1e-3, 0.1, 1.0, 1.999, 2.0, 5.0, 30.0, 100.0] {
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
            let got = bessel_k(0.5, x).unwrap();
            assert!((got / exact - 1.0).abs() < 1e-13, "x = {x}: {got} vs {exact}");
            // K_{3/2} = K_{1/2}(1 + 1/x)
            let got = bessel_k(1.5, x).unwrap();
            assert!((got / (exact * (1.0 + 1.0 / x)) - 1.0).abs() < 1e-13, "x = {x}");
        }
        assert!((bessel_k(0.5, 1.0).unwrap() - 0.461_068_504_447_894_4).abs() < 1e-15);
    }

    #[test]
    fn integer_orders_reference() {
        // K_0(1), K_1(1), K_0(3), K_2(0.5)
        let cases = [
            (0.0, 1.0, 0.421_024_438_240_708_35),
            (1.0, 1.0, 0.601_907_230_197_234_6),
            (0.0, 3.0, 0.034_739_504_386_279_43),
            (2.0, 0.5, 7.550_183_551_240_869),
        ];
        for (nu, x, want) in cases {
            let got = bessel_k(nu, x).unwrap();
            assert!((got / want - 1.0).abs() < 1e-13, "K_{nu}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn order_symmetry_and_domain() {
        assert_eq!(bessel_k(-1.7291, 3.0).unwrap(), bessel_k(1.7291, 3.0).unwrap());
        assert!(bessel_k(1.0, 0.0).is_err());
        assert!(bessel_k(1.0, -2.0).is_err());
    }

    #[test]
    fn large_order_small_argument_stays_finite_in_log_space() {
        let l = ln_bessel_k(20.0, 1e-10).unwrap();
        // ≈ ln(Γ(20)/2) + 20 ln(2e10)
        let lead = ln_gamma(20.0).unwrap() - 2f64.ln() + 20.0 * (2e10f64).ln();
        assert!((l - lead).abs() < 1e-8);
        assert!(ln_bessel_k(3.2, 1e-300).unwrap().is_finite());
        assert!(ln_bessel_k(0.0, 1e-300).unwrap().is_finite());
    }

    #[test]
    fn scaled_large_argument() {
        let s = bessel_k_scaled(0.5, 800.0).unwrap();
        assert!((s / (PI / 1600.0).sqrt() - 1.0).abs() < 1e-13);
        assert_eq!(bessel_k(0.5, 800.0).unwrap(), 0.0);
    }
}
