//! Ergodic capacity with waterfilling power adaptation.
//!
//! With channel gain `λ` and transmit SNR `snr`, the optimal policy sends
//! nothing below a threshold `μ` and power `1/μ - 1/λ` above it, with `μ`
//! fixed by `E[(1/μ - 1/λ)⁺] = snr`. The capacity is
//! `(1/k) E[ln(λ/μ); λ > μ]`, where `k = 1` for heterodyne detection and
//! `k = 2` for intensity modulation with direct detection.

mod constraint;
mod montecarlo;
mod oracle;

pub use constraint::{
    power_constraint_expectation, power_constraint_expectation_quadrature, power_constraint_residual, solve_threshold,
    solve_threshold_quadrature,
};
pub use montecarlo::{capacity_monte_carlo, MeanEstimate, MonteCarloCapacity};
pub use oracle::{capacity_integral_quadrature, capacity_oracle};

use crate::channel::{ChannelError, ChannelKind, ChannelModel};
use crate::numerics::NumericsError;
use crate::special::{digamma, meijer_g_remainder, MeijerGSpec, SpecialError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Transmit SNR below which the IM/DD shot-noise model is not treated as a
/// capacity (10 dB).
pub const IMDD_MIN_SNR_DB: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapacityError {
    #[error("{0}")]
    Validity(String),
    #[error("{parameter} = {value} is invalid ({requirement})")]
    Domain {
        parameter: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

pub(crate) fn check_positive(parameter: &'static str, value: f64) -> Result<f64, CapacityError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CapacityError::Domain {
            parameter,
            value,
            requirement: "must be positive and finite",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DetectionKind {
    #[serde(rename = "hd")]
    Heterodyne,
    #[serde(rename = "imdd")]
    IntensityModulation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionScheme {
    pub kind: DetectionKind,
    /// Noise power spectral density `N_k` (same units as transmit power).
    pub noise_density: f64,
    /// Lift the IM/DD high-power validity floor.
    pub allow_low_power: bool,
}

impl DetectionScheme {
    pub fn heterodyne() -> Self {
        Self {
            kind: DetectionKind::Heterodyne,
            noise_density: 1.0,
            allow_low_power: false,
        }
    }

    pub fn intensity_modulation() -> Self {
        Self {
            kind: DetectionKind::IntensityModulation,
            noise_density: 1.0,
            allow_low_power: false,
        }
    }

    pub fn with_noise_density(self, noise_density: f64) -> Result<Self, CapacityError> {
        Ok(Self {
            noise_density: check_positive("noise_density", noise_density)?,
            ..self
        })
    }

    pub fn allowing_low_power(self) -> Self {
        Self {
            allow_low_power: true,
            ..self
        }
    }

    /// Degrees of freedom divisor: 1 for heterodyne, 2 for IM/DD.
    pub fn k(&self) -> f64 {
        match self.kind {
            DetectionKind::Heterodyne => 1.0,
            DetectionKind::IntensityModulation => 2.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            DetectionKind::Heterodyne => "hd",
            DetectionKind::IntensityModulation => "imdd",
        }
    }

    /// Transmit SNR `P_avg / N_k`.
    pub fn snr_from_power(&self, average_power: f64) -> f64 {
        average_power / self.noise_density
    }

    /// Fails for IM/DD below [`IMDD_MIN_SNR_DB`] unless the floor is lifted.
    pub fn check_validity(&self, snr: f64) -> Result<(), CapacityError> {
        if self.kind == DetectionKind::IntensityModulation && !self.allow_low_power && snr < db_to_linear(IMDD_MIN_SNR_DB) {
            return Err(CapacityError::Validity(format!(
                "IM/DD capacity model needs transmit SNR >= {IMDD_MIN_SNR_DB} dB (got {:.3} dB)",
                linear_to_db(snr)
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Oracle,
    AsymptoticLow,
    AsymptoticHigh,
    MonteCarlo,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Oracle => "oracle",
            Method::AsymptoticLow => "asymptotic_low",
            Method::AsymptoticHigh => "asymptotic_high",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Method::Exact),
            "oracle" => Ok(Method::Oracle),
            "asymptotic_low" | "low" => Ok(Method::AsymptoticLow),
            "asymptotic_high" | "high" => Ok(Method::AsymptoticHigh),
            "monte_carlo" | "montecarlo" => Ok(Method::MonteCarlo),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityPoint {
    /// Transmit SNR, linear.
    pub snr: f64,
    /// Waterfilling threshold `μ` (the asymptotic value for asymptotic methods).
    pub threshold: f64,
    /// Nats per channel use.
    pub capacity: f64,
    pub method: Method,
    pub scheme: DetectionScheme,
}

impl CapacityPoint {
    pub fn capacity_bits(&self) -> f64 {
        nats_to_bits(self.capacity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Low,
    High,
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Capacity from the Meijer-G closed form, with `μ` from [`solve_threshold`].
pub fn capacity_exact(model: &ChannelModel, scheme: DetectionScheme, snr: f64) -> Result<CapacityPoint, CapacityError> {
    check_positive("snr", snr)?;
    scheme.check_validity(snr)?;
    let mu = solve_threshold(model, snr)?;
    Ok(CapacityPoint {
        snr,
        threshold: mu,
        capacity: capacity_at_threshold(model, mu)? / scheme.k(),
        method: Method::Exact,
        scheme,
    })
}

/// `E[ln(λ/μ); λ > μ]` in closed form (nats, before the `1/k` factor).
///
/// With pointing error, `z = abμ/A₀`:
/// `ln(A₀/ab) + ψ(a) + ψ(b) - 1/ξ² - ln μ + ξ²/(Γ(a)Γ(b)) G^{3,2}_{3,5}(z | 1,1,ξ²+1; ξ²,a,b,0,0)`.
/// Without it, `z = abμ/g`:
/// `ln(g/ab) + ψ(a) + ψ(b) - ln μ + 1/(Γ(a)Γ(b)) G^{2,2}_{2,4}(z | 1,1; a,b,0,0)`.
///
/// The terms outside the Meijer-G are minus its residue at the double pole
/// `s = 0`, so the sum is evaluated as the Meijer-G remainder. This is the
/// same expression without the cancellation that otherwise ruins it at low SNR.
pub fn capacity_at_threshold(model: &ChannelModel, mu: f64) -> Result<f64, CapacityError> {
    check_positive("mu", mu)?;
    let (a, b) = (model.a(), model.b());
    let z = model.meijer_scale() * mu;
    let (spec, front) = match model.kind() {
        ChannelKind::GammaGammaPointing { xi, .. } => {
            let xi2 = xi * xi;
            (MeijerGSpec::new(3, 2, vec![1.0, 1.0, xi2 + 1.0], vec![xi2, a, b, 0.0, 0.0])?, xi2)
        }
        ChannelKind::GammaGamma { .. } => (MeijerGSpec::new(2, 2, vec![1.0, 1.0], vec![a, b, 0.0, 0.0])?, 1.0),
    };
    let rem = meijer_g_remainder(&spec, z)?;
    Ok((front * (-model.ln_gamma_ab()).exp() * rem).max(0.0))
}

/// The closed form term by term, as written above. Loses accuracy to
/// cancellation when `μ` is large; kept for cross-checking.
pub fn capacity_at_threshold_literal(model: &ChannelModel, mu: f64) -> Result<f64, CapacityError> {
    check_positive("mu", mu)?;
    let (a, b) = (model.a(), model.b());
    let z = model.meijer_scale() * mu;
    let base = model.peak_gain().ln() - (a * b).ln() + digamma(a)? + digamma(b)? - model.inverse_xi_squared() - mu.ln();
    let g = match model.kind() {
        ChannelKind::GammaGammaPointing { xi, .. } => {
            let xi2 = xi * xi;
            let spec = MeijerGSpec::new(3, 2, vec![1.0, 1.0, xi2 + 1.0], vec![xi2, a, b, 0.0, 0.0])?;
            xi2 * crate::special::meijer_g(&spec, z)?
        }
        ChannelKind::GammaGamma { .. } => {
            let spec = MeijerGSpec::new(2, 2, vec![1.0, 1.0], vec![a, b, 0.0, 0.0])?;
            crate::special::meijer_g(&spec, z)?
        }
    };
    Ok(base + (-model.ln_gamma_ab()).exp() * g)
}

/// Threshold asymptotes: `1/snr` (high) and
/// `(A₀/4ab) ln²(1/snr)` (low; `A₀` is the gain scale without pointing error).
pub fn threshold_asymptote(model: &ChannelModel, snr: f64, regime: Regime) -> Result<f64, CapacityError> {
    check_positive("snr", snr)?;
    Ok(match regime {
        Regime::High => 1.0 / snr,
        Regime::Low => low_snr_scaling_factor(model) * snr.ln().powi(2),
    })
}

/// `A₀/(4ab)` with pointing error, `g/(4ab)` without (`g = 1` normally).
pub fn low_snr_scaling_factor(model: &ChannelModel) -> f64 {
    model.peak_gain() / (4.0 * model.a() * model.b())
}

/// Low-SNR asymptote `(1/k)(A₀/4ab) snr ln²(1/snr)`, heterodyne only.
pub fn capacity_asymptotic_low(model: &ChannelModel, scheme: DetectionScheme, snr: f64) -> Result<CapacityPoint, CapacityError> {
    check_positive("snr", snr)?;
    if scheme.kind != DetectionKind::Heterodyne {
        return Err(CapacityError::Validity(
            "the low-SNR asymptote applies to heterodyne detection only".into(),
        ));
    }
    if snr >= 1.0 {
        return Err(CapacityError::Domain {
            parameter: "snr",
            value: snr,
            requirement: "low-SNR asymptote needs snr < 1",
        });
    }
    Ok(CapacityPoint {
        snr,
        threshold: threshold_asymptote(model, snr, Regime::Low)?,
        capacity: low_snr_scaling_factor(model) * snr * snr.ln().powi(2) / scheme.k(),
        method: Method::AsymptoticLow,
        scheme,
    })
}

/// High-SNR asymptote `(1/k)[ln snr + penalty]`, see [`penalty_high_snr`].
pub fn capacity_asymptotic_high(model: &ChannelModel, scheme: DetectionScheme, snr: f64) -> Result<CapacityPoint, CapacityError> {
    check_positive("snr", snr)?;
    if snr <= 1.0 {
        return Err(CapacityError::Domain {
            parameter: "snr",
            value: snr,
            requirement: "high-SNR asymptote needs snr > 1",
        });
    }
    Ok(CapacityPoint {
        snr,
        threshold: 1.0 / snr,
        capacity: (snr.ln() + penalty_high_snr(model)?) / scheme.k(),
        method: Method::AsymptoticHigh,
        scheme,
    })
}

/// Constant offset of the high-SNR asymptote from `ln snr`, in nats:
/// `ln(A₀/ab) + ψ(a) + ψ(b) - 1/ξ²` with pointing error,
/// `ψ(a) + ψ(b) - ln(ab)` (plus `ln g` for a gain-scaled channel) without.
pub fn penalty_high_snr(model: &ChannelModel) -> Result<f64, CapacityError> {
    let (a, b) = (model.a(), model.b());
    Ok((model.peak_gain() / (a * b)).ln() + digamma(a)? + digamma(b)? - model.inverse_xi_squared())
}

/// High-SNR capacity change when `ξ` moves from `xi_old` to `xi_new`:
/// `(1/k)(1/ξ_new² - 1/ξ_old²)`; positive when the jitter grows.
pub fn jitter_loss(xi_old: f64, xi_new: f64, scheme: DetectionScheme) -> Result<f64, CapacityError> {
    check_positive("xi_old", xi_old)?;
    check_positive("xi_new", xi_new)?;
    Ok((1.0 / (xi_new * xi_new) - 1.0 / (xi_old * xi_old)) / scheme.k())
}

/// [`jitter_loss`] in terms of jitter deviations at a fixed equivalent beam
/// width: `(1/k)·4(σ_new² - σ_old²)/w_Leq²`.
pub fn jitter_loss_from_sigma(sigma_old: f64, sigma_new: f64, w_leq: f64, scheme: DetectionScheme) -> Result<f64, CapacityError> {
    check_positive("w_leq", w_leq)?;
    if !(sigma_old >= 0.0) || !(sigma_new >= 0.0) {
        return Err(CapacityError::Domain {
            parameter: "jitter_sigma",
            value: sigma_old.min(sigma_new),
            requirement: "must be non-negative",
        });
    }
    Ok(4.0 * (sigma_new * sigma_new - sigma_old * sigma_old) / (w_leq * w_leq) / scheme.k())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strong_pe() -> ChannelModel {
        ChannelModel::with_pointing(4.8184, 1.1896, 1.0269, 0.0107).unwrap()
    }

    #[test]
    fn scheme_divisor_and_floor() {
        assert_eq!(DetectionScheme::heterodyne().k(), 1.0);
        assert_eq!(DetectionScheme::intensity_modulation().k(), 2.0);
        let imdd = DetectionScheme::intensity_modulation();
        assert!(imdd.check_validity(db_to_linear(9.9)).is_err());
        assert!(imdd.check_validity(db_to_linear(10.0)).is_ok());
        assert!(imdd.allowing_low_power().check_validity(1.0).is_ok());
        assert!(DetectionScheme::heterodyne().check_validity(1e-6).is_ok());
        assert!(DetectionScheme::heterodyne().with_noise_density(-1.0).is_err());
    }

    #[test]
    fn remainder_and_literal_closed_forms_agree_where_both_are_accurate() {
        for model in [strong_pe(), ChannelModel::gamma_gamma(3.9929, 1.7018).unwrap()] {
            for mu in [1e-4, 1e-3, 1e-2, 0.1] {
                let a = capacity_at_threshold(&model, mu).unwrap();
                let b = capacity_at_threshold_literal(&model, mu).unwrap();
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-3), "mu = {mu}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn penalty_special_values() {
        let unit = ChannelModel::gamma_gamma(1.0, 1.0).unwrap();
        let euler = 0.577_215_664_901_532_9;
        assert!((penalty_high_snr(&unit).unwrap() + 2.0 * euler).abs() < 1e-13);
    }

    #[test]
    fn asymptote_preconditions() {
        let m = strong_pe();
        assert!(capacity_asymptotic_low(&m, DetectionScheme::intensity_modulation(), 1e-3).is_err());
        assert!(capacity_asymptotic_low(&m, DetectionScheme::heterodyne(), 2.0).is_err());
        assert!(capacity_asymptotic_high(&m, DetectionScheme::heterodyne(), 0.5).is_err());
        assert_eq!(threshold_asymptote(&m, 100.0, Regime::High).unwrap(), 0.01);
    }

    #[test]
    fn jitter_loss_forms_agree() {
        let w_leq = 0.2054;
        let (s_old, s_new) = (0.1, 0.13);
        let xi = |s: f64| w_leq / (2.0 * s);
        let hd = DetectionScheme::heterodyne();
        let l1 = jitter_loss(xi(s_old), xi(s_new), hd).unwrap();
        let l2 = jitter_loss_from_sigma(s_old, s_new, w_leq, hd).unwrap();
        assert!((l1 - l2).abs() < 1e-12);
        assert_eq!(jitter_loss(1.2, 1.2, hd).unwrap(), 0.0);
    }

    #[test]
    fn bits_conversion() {
        assert!((nats_to_bits(std::f64::consts::LN_2) - 1.0).abs() < 1e-15);
    }
}
