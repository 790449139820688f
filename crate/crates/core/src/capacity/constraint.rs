//! Average-power constraint `E[(1/μ - 1/λ)⁺] = snr` and its solution for `μ`.

use super::{check_positive, threshold_asymptote, CapacityError, Regime};
use crate::channel::{gg_scale, ln_pdf_gg, tail_probability, ChannelKind, ChannelModel};
use crate::numerics::{find_root_monotone, integrate_semi_infinite_scaled, ToleranceSpec};
use crate::special::{meijer_g_remainder, MeijerGSpec};

// Cancellation between P(λ > μ)/μ and E[1/λ; λ > μ] beyond which the closed
// form hands over to quadrature.
const MAX_CANCELLATION: f64 = 1e5;

/// `E[(1/μ - 1/λ)⁺] - snr`; strictly decreasing in `μ`.
pub fn power_constraint_residual(mu: f64, model: &ChannelModel, snr: f64) -> Result<f64, CapacityError> {
    check_positive("snr", snr)?;
    Ok(power_constraint_expectation(mu, model)? - snr)
}

/// `E[(1/μ - 1/λ)⁺] = P(λ > μ)/μ - E[1/λ; λ > μ]`.
///
/// The second term is `A[H(∞) - G^{3,1}_{2,4}(z | 1, ξ²; ξ²-1, a-1, b-1, 0)]`
/// with pointing error (`A = abξ²/(A₀Γ(a)Γ(b))`, `z = abμ/A₀`,
/// `H(∞) = Γ(a-1)Γ(b-1)/(ξ²-1)`), and
/// `(ab/(gΓ(a)Γ(b)))[Γ(a-1)Γ(b-1) - G^{2,1}_{1,3}(z | 1; a-1, b-1, 0)]`
/// without. `H(∞)` is the residue at the left pole, so the bracket is minus
/// the Meijer-G remainder; this form also holds by continuation when the
/// moment `E[1/λ]` diverges (`ξ² < 1`). Falls back to quadrature where the
/// closed form is singular (`ξ² = 1`, `a = 1` or `b = 1`) or cancels badly.
pub fn power_constraint_expectation(mu: f64, model: &ChannelModel) -> Result<f64, CapacityError> {
    check_positive("mu", mu)?;
    match closed_form(mu, model) {
        Ok(Some(v)) => Ok(v),
        Ok(None) | Err(_) => power_constraint_expectation_quadrature(mu, model, quadrature_tolerance()),
    }
}

fn quadrature_tolerance() -> ToleranceSpec {
    ToleranceSpec::relative(1e-12)
}

fn closed_form(mu: f64, model: &ChannelModel) -> Result<Option<f64>, CapacityError> {
    let (a, b) = (model.a(), model.b());
    let z = model.meijer_scale() * mu;
    let inv_gg = (-model.ln_gamma_ab()).exp();
    let inverse_moment = match model.kind() {
        ChannelKind::GammaGammaPointing { xi, a0 } => {
            let xi2 = xi * xi;
            let spec = MeijerGSpec::new(3, 1, vec![1.0, xi2], vec![xi2 - 1.0, a - 1.0, b - 1.0, 0.0])?;
            -(a * b * xi2 / a0) * inv_gg * meijer_g_remainder(&spec, z)?
        }
        ChannelKind::GammaGamma { gain } => {
            let spec = MeijerGSpec::new(2, 1, vec![1.0], vec![a - 1.0, b - 1.0, 0.0])?;
            -(a * b / gain) * inv_gg * meijer_g_remainder(&spec, z)?
        }
    };
    let first = tail_probability(mu, model)? / mu;
    if first == 0.0 {
        return Ok(Some(0.0));
    }
    let value = first - inverse_moment;
    if !value.is_finite() || value <= 0.0 || (first + inverse_moment.abs()) > MAX_CANCELLATION * value {
        return Ok(None);
    }
    Ok(Some(value))
}

/// `E[(1/μ - 1/λ)⁺]` by quadrature over `I_a`, with the pointing loss
/// integrated in closed form. With `y = A₀ I_a/μ` and `L = ln y`, the
/// conditional expectation is `(1/μ)[1 - y^{-ξ²} - ξ² (1 - y^{1-ξ²})/((ξ²-1) y)]`.
pub fn power_constraint_expectation_quadrature(mu: f64, model: &ChannelModel, tol: ToleranceSpec) -> Result<f64, CapacityError> {
    check_positive("mu", mu)?;
    let (a, b) = (model.a(), model.b());
    let lower = mu / model.peak_gain();
    let xi2 = model.xi().map(|x| x * x);
    let integrand = |x: f64| -> f64 {
        let f = match ln_pdf_gg(x, a, b) {
            Ok(l) => l.exp(),
            Err(_) => return f64::NAN,
        };
        let y = x / lower;
        let l = y.ln();
        let conditional = match xi2 {
            Some(xi2) => -(-xi2 * l).exp_m1() - xi2 * phi(xi2 - 1.0, l) / y,
            None => 1.0 - 1.0 / y,
        };
        conditional * f
    };
    let r = integrate_semi_infinite_scaled(integrand, lower, gg_scale(lower, a, b), tol)?;
    Ok(r.value / mu)
}

/// `(1 - e^{-uL})/u`, continuous through `u = 0`.
pub(crate) fn phi(u: f64, l: f64) -> f64 {
    let x = u * l;
    if x.abs() < 1e-8 {
        l * (1.0 - 0.5 * x)
    } else {
        -(-x).exp_m1() / u
    }
}

/// Waterfilling threshold: the root of [`power_constraint_residual`].
pub fn solve_threshold(model: &ChannelModel, snr: f64) -> Result<f64, CapacityError> {
    solve_with(model, snr, |mu| power_constraint_expectation(mu, model))
}

/// Threshold from the quadrature form of the constraint only.
pub fn solve_threshold_quadrature(model: &ChannelModel, snr: f64) -> Result<f64, CapacityError> {
    solve_with(model, snr, |mu| power_constraint_expectation_quadrature(mu, model, quadrature_tolerance()))
}

/// Solves `ln E(μ) = ln snr` in `ln μ`, bracketing around the two
/// asymptotes `1/snr` and `(A₀/4ab) ln²(1/snr)`.
fn solve_with<E>(model: &ChannelModel, snr: f64, expectation: E) -> Result<f64, CapacityError>
where
    E: Fn(f64) -> Result<f64, CapacityError>,
{
    check_positive("snr", snr)?;
    let target = snr.ln();
    let failure = std::cell::RefCell::new(None);
    let g = |ell: f64| -> f64 {
        match expectation(ell.exp()) {
            Ok(v) => v.ln() - target,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let guesses: Vec<f64> = [Regime::Low, Regime::High]
        .iter()
        .filter_map(|&r| threshold_asymptote(model, snr, r).ok())
        .filter(|v| *v > 0.0 && v.is_finite())
        .collect();
    let lo_guess = guesses.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_guess = guesses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut lo = (lo_guess / 100.0).ln();
    let mut hi = (hi_guess * 100.0).ln();
    let step = 10f64.ln();
    let mut expansions = 0;
    while g(lo) < 0.0 {
        lo -= step;
        expansions += 1;
        if expansions > 60 {
            break;
        }
    }
    while g(hi) > 0.0 {
        hi += step;
        expansions += 1;
        if expansions > 120 {
            break;
        }
    }
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let tol = ToleranceSpec::new(1e-15, 1e-12, 1_000_000)?;
    let root = find_root_monotone(&g, (lo, hi), tol);
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    Ok(root?.root.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_is_continuous_at_zero() {
        let l = 2.5;
        assert!((phi(1e-12, l) - l).abs() < 1e-10);
        assert!((phi(1e-6, l) - (1.0 - (-1e-6 * l).exp()) / 1e-6).abs() < 1e-9);
        assert!((phi(-0.5, l) - ((0.5 * l).exp() - 1.0) / 0.5).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let models = [
            ChannelModel::with_pointing(4.8184, 1.1896, 1.0269, 0.0107).unwrap(),
            ChannelModel::with_pointing(4.7424, 3.0133, 0.4790, 0.0490).unwrap(),
            ChannelModel::gamma_gamma(3.9929, 1.7018).unwrap(),
            ChannelModel::gamma_gamma_with_gain(4.8184, 1.1896, 0.0107).unwrap(),
        ];
        for m in &models {
            for mu in [1e-6, 1e-3, 0.01, 0.3] {
                let c = closed_form(mu, m).unwrap().expect("closed form usable");
                let q = power_constraint_expectation_quadrature(mu, m, quadrature_tolerance()).unwrap();
                assert!((c / q - 1.0).abs() < 1e-9, "{m:?} mu = {mu}: {c} vs {q}");
            }
        }
    }

    #[test]
    fn singular_split_falls_back_to_quadrature() {
        let m = ChannelModel::with_pointing(2.5, 1.7, 1.0, 0.03).unwrap();
        let v = power_constraint_expectation(0.01, &m).unwrap();
        let q = power_constraint_expectation_quadrature(0.01, &m, quadrature_tolerance()).unwrap();
        assert!((v / q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_root_is_tight() {
        let m = ChannelModel::with_pointing(4.8184, 1.1896, 1.0269, 0.0107).unwrap();
        for snr in [1e-6, 1.0, 1e4] {
            let mu = solve_threshold(&m, snr).unwrap();
            let r = power_constraint_residual(mu, &m, snr).unwrap();
            assert!(r.abs() <= 1e-10 * snr, "snr {snr}: residual {r}");
        }
    }
}
