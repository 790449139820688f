//! Physical link geometry to channel statistics: Rytov variance and C_n²,
//! Gamma-Gamma shape parameters, beam spread at the receiver and the
//! pointing-error parameters `(A₀, ξ)`.

use crate::special::erf;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinkModelError {
    #[error("{parameter} = {value} is invalid ({requirement})")]
    Domain {
        parameter: &'static str,
        value: f64,
        requirement: &'static str,
    },
}

fn positive(parameter: &'static str, value: f64) -> Result<f64, LinkModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(LinkModelError::Domain {
            parameter,
            value,
            requirement: "must be positive and finite",
        })
    }
}

/// Transmitter, path and receiver geometry. All lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub wavelength: f64,
    /// Beam waist at the transmitter exit aperture.
    pub beam_waist: f64,
    pub path_length: f64,
    pub aperture_radius: f64,
    /// Standard deviation of the pointing jitter; zero disables pointing error.
    pub jitter_sigma: f64,
}

impl LinkGeometry {
    /// The reference terrestrial link: 1550 nm, 1.2 cm waist, 1.8 km,
    /// 1.5 cm aperture radius, 0.1 m jitter.
    pub fn reference() -> Self {
        Self {
            wavelength: 1550e-9,
            beam_waist: 1.2e-2,
            path_length: 1800.0,
            aperture_radius: 1.5e-2,
            jitter_sigma: 0.1,
        }
    }

    pub fn validate(&self) -> Result<(), LinkModelError> {
        positive("wavelength", self.wavelength)?;
        positive("beam_waist", self.beam_waist)?;
        positive("path_length", self.path_length)?;
        positive("aperture_radius", self.aperture_radius)?;
        if !(self.jitter_sigma >= 0.0) || !self.jitter_sigma.is_finite() {
            return Err(LinkModelError::Domain {
                parameter: "jitter_sigma",
                value: self.jitter_sigma,
                requirement: "must be non-negative and finite",
            });
        }
        Ok(())
    }

    /// Optical wavenumber `2π/λ`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }
}

impl Default for LinkGeometry {
    fn default() -> Self {
        Self::reference()
    }
}

/// Turbulence strength in its three equivalent parameterisations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurbulenceState {
    pub rytov_variance: f64,
    /// Refractive-index structure parameter, m^(-2/3).
    pub cn2: f64,
    pub a: f64,
    pub b: f64,
}

impl TurbulenceState {
    pub fn from_rytov(rytov_variance: f64, geometry: &LinkGeometry) -> Result<Self, LinkModelError> {
        let cn2 = cn2_from_rytov(rytov_variance, geometry)?;
        let (a, b) = gg_params_from_rytov(rytov_variance)?;
        Ok(Self {
            rytov_variance,
            cn2,
            a,
            b,
        })
    }

    pub fn from_cn2(cn2: f64, geometry: &LinkGeometry) -> Result<Self, LinkModelError> {
        let rytov_variance = rytov_from_cn2(cn2, geometry)?;
        let (a, b) = gg_params_from_rytov(rytov_variance)?;
        Ok(Self {
            rytov_variance,
            cn2,
            a,
            b,
        })
    }
}

/// Plane-wave Gamma-Gamma shape parameters `(a, b)` for a Rytov variance.
pub fn gg_params_from_rytov(rytov_variance: f64) -> Result<(f64, f64), LinkModelError> {
    let s2 = positive("rytov_variance", rytov_variance)?;
    // σ_R^{12/5} with σ_R the standard deviation
    let s125 = s2.powf(1.2);
    let a = 1.0 / (0.49 * s2 / (1.0 + 1.11 * s125).powf(7.0 / 6.0)).exp_m1();
    let b = 1.0 / (0.51 * s2 / (1.0 + 0.69 * s125).powf(5.0 / 6.0)).exp_m1();
    Ok((a, b))
}

/// `σ_R² = 1.23 C_n² k^{7/6} L^{11/6}`.
pub fn rytov_from_cn2(cn2: f64, geometry: &LinkGeometry) -> Result<f64, LinkModelError> {
    let cn2 = positive("cn2", cn2)?;
    geometry.validate()?;
    Ok(1.23 * cn2 * rytov_factor(geometry))
}

pub fn cn2_from_rytov(rytov_variance: f64, geometry: &LinkGeometry) -> Result<f64, LinkModelError> {
    let s2 = positive("rytov_variance", rytov_variance)?;
    geometry.validate()?;
    Ok(s2 / (1.23 * rytov_factor(geometry)))
}

fn rytov_factor(geometry: &LinkGeometry) -> f64 {
    geometry.wavenumber().powf(7.0 / 6.0) * geometry.path_length.powf(11.0 / 6.0)
}

/// Beam and pointing-error quantities at the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointingState {
    /// Beam radius at the receiver.
    pub w_l: f64,
    /// Equivalent beam width, `w_Leq² = w_L² √π erf(v) / (2v e^{-v²})`.
    pub w_leq: f64,
    pub v: f64,
    /// Fraction of power collected with no displacement, `erf(v)²`.
    pub a0: f64,
    /// `w_Leq / (2σ_e)`; `f64::INFINITY` when there is no jitter.
    pub xi: f64,
    /// Plane-wave coherence length.
    pub rho0: f64,
    /// Global coherence parameter `1 + 2w₀²/ρ₀²`.
    pub epsilon: f64,
}

impl PointingState {
    pub fn has_pointing_error(&self) -> bool {
        self.xi.is_finite()
    }

    /// `w_L / r_A`; the pointing model assumes this is large.
    pub fn beam_to_aperture_ratio(&self, geometry: &LinkGeometry) -> f64 {
        self.w_l / geometry.aperture_radius
    }
}

/// Beam spread from C_n² and the resulting pointing-error parameters.
///
/// Logs a warning when `w_L/r_A ≤ 5`, where the Gaussian-footprint
/// approximation behind `A₀` and `w_Leq` starts to break down.
pub fn derive_pointing_state(geometry: &LinkGeometry, cn2: f64) -> Result<PointingState, LinkModelError> {
    geometry.validate()?;
    let cn2 = positive("cn2", cn2)?;
    let k = geometry.wavenumber();
    let l = geometry.path_length;
    let w0 = geometry.beam_waist;
    let rho0 = (1.46 * cn2 * k * k * l).powf(-0.6);
    let epsilon = 1.0 + 2.0 * w0 * w0 / (rho0 * rho0);
    let fresnel = geometry.wavelength * l / (PI * w0 * w0);
    let w_l = w0 * (1.0 + epsilon * fresnel * fresnel).sqrt();
    let v = PI.sqrt() * geometry.aperture_radius / (2f64.sqrt() * w_l);
    let erf_v = erf(v);
    let a0 = erf_v * erf_v;
    let w_leq = w_l * (PI.sqrt() * erf_v / (2.0 * v * (-v * v).exp())).sqrt();
    let xi = if geometry.jitter_sigma == 0.0 {
        f64::INFINITY
    } else {
        w_leq / (2.0 * geometry.jitter_sigma)
    };
    let ratio = w_l / geometry.aperture_radius;
    if ratio <= 5.0 {
        log::warn!("beam-to-aperture ratio w_L/r_A = {ratio:.3} is not large; pointing-error model is approximate");
    }
    Ok(PointingState {
        w_l,
        w_leq,
        v,
        a0,
        xi,
        rho0,
        epsilon,
    })
}

/// The three reference turbulence regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TurbulenceRegime {
    Weak,
    Moderate,
    Strong,
}

impl TurbulenceRegime {
    pub const ALL: [TurbulenceRegime; 3] = [Self::Weak, Self::Moderate, Self::Strong];

    pub fn rytov_variance(self) -> f64 {
        self.published().rytov_variance
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Weak => "weak",
            Self::Moderate => "moderate",
            Self::Strong => "strong",
        }
    }

    /// Published parameter set for this regime (4-digit values).
    pub fn published(self) -> PublishedRow {
        match self {
            Self::Weak => PublishedRow {
                rytov_variance: 0.8,
                a: 4.7424,
                b: 3.0133,
                xi: 0.4790,
                a0: 0.0490,
            },
            Self::Moderate => PublishedRow {
                rytov_variance: 2.0,
                a: 3.9929,
                b: 1.7018,
                xi: 0.6302,
                a0: 0.0283,
            },
            Self::Strong => PublishedRow {
                rytov_variance: 6.0,
                a: 4.8184,
                b: 1.1896,
                xi: 1.0269,
                a0: 0.0107,
            },
        }
    }
}

impl std::str::FromStr for TurbulenceRegime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "weak" => Ok(Self::Weak),
            "moderate" => Ok(Self::Moderate),
            "strong" => Ok(Self::Strong),
            other => Err(format!("unknown turbulence regime '{other}' (weak, moderate, strong)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PublishedRow {
    pub rytov_variance: f64,
    pub a: f64,
    pub b: f64,
    pub xi: f64,
    pub a0: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_parameters_match_published_rows() {
        for regime in TurbulenceRegime::ALL {
            let row = regime.published();
            let (a, b) = gg_params_from_rytov(row.rytov_variance).unwrap();
            assert!((a - row.a).abs() < 1e-3, "{regime:?}: a = {a}");
            assert!((b - row.b).abs() < 1e-3, "{regime:?}: b = {b}");
        }
    }

    #[test]
    fn rytov_round_trip_and_scale() {
        let g = LinkGeometry::reference();
        for s2 in [0.8, 2.0, 6.0] {
            let cn2 = cn2_from_rytov(s2, &g).unwrap();
            assert!((rytov_from_cn2(cn2, &g).unwrap() / s2 - 1.0).abs() < 1e-12);
        }
        let cn2 = cn2_from_rytov(0.8, &g).unwrap();
        assert!(cn2 > 1e-15 && cn2 < 1e-13, "cn2 = {cn2}");
        let double = rytov_from_cn2(2.0 * cn2, &g).unwrap();
        assert!((double / 1.6 - 1.0).abs() < 1e-12);
        assert!(rytov_from_cn2(0.0, &g).is_err());
        assert!(gg_params_from_rytov(-1.0).is_err());
    }

    #[test]
    fn pointing_state_identities() {
        let g = LinkGeometry::reference();
        let p = derive_pointing_state(&g, 5e-14).unwrap();
        assert!((erf(p.v).powi(2) - p.a0).abs() < 1e-12);
        let rhs = p.w_l * p.w_l * PI.sqrt() * erf(p.v) / (2.0 * p.v * (-p.v * p.v).exp());
        assert!((p.w_leq * p.w_leq / rhs - 1.0).abs() < 1e-12);
        assert!((p.xi * g.jitter_sigma - p.w_leq / 2.0).abs() < 1e-15);
    }

    #[test]
    fn no_jitter_gives_infinite_xi() {
        let g = LinkGeometry {
            jitter_sigma: 0.0,
            ..LinkGeometry::reference()
        };
        let p = derive_pointing_state(&g, 5e-14).unwrap();
        assert!(p.xi.is_infinite() && !p.has_pointing_error());
        assert!(p.w_l.is_finite() && p.w_leq.is_finite() && p.a0 > 0.0);
        let bad = LinkGeometry {
            jitter_sigma: -0.1,
            ..LinkGeometry::reference()
        };
        assert!(derive_pointing_state(&bad, 5e-14).is_err());
    }

    #[test]
    fn regime_parsing() {
        assert_eq!("Strong".parse::<TurbulenceRegime>().unwrap(), TurbulenceRegime::Strong);
        assert!("calm".parse::<TurbulenceRegime>().is_err());
    }
}
