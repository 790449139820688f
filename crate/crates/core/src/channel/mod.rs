//! Irradiance statistics of the composite channel `I = I_a · I_p`:
//! Gamma-Gamma turbulence `I_a` and misalignment loss `I_p`.

mod sampling;

pub use sampling::{sample_irradiance, sample_irradiance_geometric};

use crate::linkmodel::{PointingState, TurbulenceState};
use crate::numerics::{integrate_semi_infinite_scaled, NumericsError, ToleranceSpec};
use crate::special::{gamma_signed, ln_bessel_k, ln_gamma, meijer_g, meijer_g_remainder, MeijerGSpec, SpecialError};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("{parameter} = {value} is invalid ({requirement})")]
    Domain {
        parameter: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub(crate) fn check_positive(parameter: &'static str, value: f64) -> Result<f64, ChannelError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ChannelError::Domain {
            parameter,
            value,
            requirement: "must be positive and finite",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelKind {
    /// Turbulence only. `gain` is a deterministic received-power scale
    /// (`λ = gain · I_a`); it is 1 for the plain Gamma-Gamma channel.
    GammaGamma { gain: f64 },
    /// Turbulence with zero-boresight pointing error.
    GammaGammaPointing { xi: f64, a0: f64 },
}

/// Distribution of the channel gain `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    a: f64,
    b: f64,
    kind: ChannelKind,
}

impl ChannelModel {
    pub fn gamma_gamma(a: f64, b: f64) -> Result<Self, ChannelError> {
        Self::gamma_gamma_with_gain(a, b, 1.0)
    }

    pub fn gamma_gamma_with_gain(a: f64, b: f64, gain: f64) -> Result<Self, ChannelError> {
        Ok(Self {
            a: check_positive("a", a)?,
            b: check_positive("b", b)?,
            kind: ChannelKind::GammaGamma {
                gain: check_positive("gain", gain)?,
            },
        })
    }

    pub fn with_pointing(a: f64, b: f64, xi: f64, a0: f64) -> Result<Self, ChannelError> {
        check_positive("xi", xi)?;
        if !(a0 > 0.0 && a0 <= 1.0) {
            return Err(ChannelError::Domain {
                parameter: "a0",
                value: a0,
                requirement: "must lie in (0, 1]",
            });
        }
        Ok(Self {
            a: check_positive("a", a)?,
            b: check_positive("b", b)?,
            kind: ChannelKind::GammaGammaPointing { xi, a0 },
        })
    }

    /// Pointing-error model when the link has jitter, plain Gamma-Gamma otherwise.
    pub fn from_link(turbulence: &TurbulenceState, pointing: &PointingState) -> Result<Self, ChannelError> {
        if pointing.has_pointing_error() {
            Self::with_pointing(turbulence.a, turbulence.b, pointing.xi, pointing.a0)
        } else {
            Self::gamma_gamma(turbulence.a, turbulence.b)
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn has_pointing_error(&self) -> bool {
        matches!(self.kind, ChannelKind::GammaGammaPointing { .. })
    }

    pub fn xi(&self) -> Option<f64> {
        match self.kind {
            ChannelKind::GammaGammaPointing { xi, .. } => Some(xi),
            ChannelKind::GammaGamma { .. } => None,
        }
    }

    /// Largest deterministic gain factor: `A₀` with pointing error, the
    /// power scale otherwise. The channel gain is this times a random factor
    /// with mean `ξ²/(1+ξ²)` (pointing) or 1 (Gamma-Gamma).
    pub fn peak_gain(&self) -> f64 {
        match self.kind {
            ChannelKind::GammaGammaPointing { a0, .. } => a0,
            ChannelKind::GammaGamma { gain } => gain,
        }
    }

    /// `1/ξ²`, zero without pointing error.
    pub fn inverse_xi_squared(&self) -> f64 {
        self.xi().map_or(0.0, |xi| 1.0 / (xi * xi))
    }

    /// Same turbulence and gain scale, pointing error removed.
    pub fn without_pointing_error(&self) -> Self {
        Self {
            kind: ChannelKind::GammaGamma { gain: self.peak_gain() },
            ..*self
        }
    }

    /// Argument scale `ab/A₀` (or `ab/gain`) of the Meijer-G closed forms.
    pub(crate) fn meijer_scale(&self) -> f64 {
        self.a * self.b / self.peak_gain()
    }

    pub(crate) fn ln_gamma_ab(&self) -> f64 {
        ln_gamma(self.a).unwrap_or(f64::NAN) + ln_gamma(self.b).unwrap_or(f64::NAN)
    }

    pub fn pdf(&self, i: f64) -> Result<f64, ChannelError> {
        pdf_composite(i, self)
    }

    pub fn cdf(&self, i: f64) -> Result<f64, ChannelError> {
        Ok(1.0 - tail_probability(i, self)?)
    }

    pub fn tail_probability(&self, mu: f64) -> Result<f64, ChannelError> {
        tail_probability(mu, self)
    }

    /// `E[λ]`: `A₀ξ²/(1+ξ²)` with pointing error, the gain otherwise.
    pub fn mean_irradiance(&self) -> f64 {
        match self.kind {
            ChannelKind::GammaGammaPointing { xi, a0 } => a0 * xi * xi / (1.0 + xi * xi),
            ChannelKind::GammaGamma { gain } => gain,
        }
    }

    /// `E[λ^t]` for `t > -min(a, b, ξ²)`; `+∞` when the moment diverges.
    pub fn moment(&self, t: f64) -> f64 {
        let lower = match self.kind {
            ChannelKind::GammaGammaPointing { xi, .. } => self.a.min(self.b).min(xi * xi),
            ChannelKind::GammaGamma { .. } => self.a.min(self.b),
        };
        if t <= -lower {
            return f64::INFINITY;
        }
        let ab = self.a * self.b;
        let ln_m = t * (self.peak_gain() / ab).ln() + ln_gamma(self.a + t).unwrap_or(f64::NAN) + ln_gamma(self.b + t).unwrap_or(f64::NAN)
            - self.ln_gamma_ab();
        let pointing = match self.kind {
            ChannelKind::GammaGammaPointing { xi, .. } => xi * xi / (xi * xi + t),
            ChannelKind::GammaGamma { .. } => 1.0,
        };
        ln_m.exp() * pointing
    }
}

/// Gamma-Gamma density
/// `2(ab)^{(a+b)/2} / (Γ(a)Γ(b)) · i^{(a+b)/2-1} K_{a-b}(2√(ab i))`.
pub fn pdf_gg(i: f64, a: f64, b: f64) -> Result<f64, ChannelError> {
    check_positive("i", i)?;
    check_positive("a", a)?;
    check_positive("b", b)?;
    Ok(ln_pdf_gg(i, a, b)?.exp())
}

pub(crate) fn ln_pdf_gg(i: f64, a: f64, b: f64) -> Result<f64, ChannelError> {
    let ab = a * b;
    let half = 0.5 * (a + b);
    Ok(LN_2 + half * ab.ln() - ln_gamma(a)? - ln_gamma(b)? + (half - 1.0) * i.ln() + ln_bessel_k(a - b, 2.0 * (ab * i).sqrt())?)
}

/// Misalignment-loss density `ξ²/A₀^{ξ²} · i^{ξ²-1}` on `(0, A₀]`, zero elsewhere.
pub fn pdf_pointing(i: f64, xi: f64, a0: f64) -> Result<f64, ChannelError> {
    check_positive("xi", xi)?;
    check_positive("a0", a0)?;
    if !(i > 0.0) || i > a0 {
        return Ok(0.0);
    }
    let xi2 = xi * xi;
    Ok(xi2 / i * (i / a0).powf(xi2))
}

/// Density of `λ`. With pointing error this is
/// `abξ²/(A₀Γ(a)Γ(b)) · G^{3,0}_{1,3}(ab i/A₀ | ξ²; ξ²-1, a-1, b-1)`;
/// without it, the (gain-scaled) Gamma-Gamma density.
pub fn pdf_composite(i: f64, model: &ChannelModel) -> Result<f64, ChannelError> {
    check_positive("i", i)?;
    match model.kind {
        ChannelKind::GammaGamma { gain } => Ok(pdf_gg(i / gain, model.a, model.b)? / gain),
        ChannelKind::GammaGammaPointing { xi, a0 } => {
            let (a, b) = (model.a, model.b);
            let xi2 = xi * xi;
            let z = a * b * i / a0;
            let ln_front = (a * b * xi2 / a0).ln() - model.ln_gamma_ab();
            if z < 1e-12 {
                if let Some(v) = composite_leading_terms(z, xi2, a, b) {
                    return Ok(v * ln_front.exp());
                }
            }
            let spec = MeijerGSpec::new(3, 0, vec![xi2], vec![xi2 - 1.0, a - 1.0, b - 1.0])?;
            Ok(ln_front.exp() * meijer_g(&spec, z)?)
        }
    }
}

/// First term of each residue series of the composite-density Meijer-G;
/// the neglected terms are `O(z)` relative. `None` when two exponents are
/// too close to an integer apart for the split to be stable.
fn composite_leading_terms(z: f64, xi2: f64, a: f64, b: f64) -> Option<f64> {
    let exps = [xi2 - 1.0, a - 1.0, b - 1.0];
    for h in 0..3 {
        for j in (h + 1)..3 {
            let d = exps[j] - exps[h];
            if (d - d.round()).abs() < 1e-3 {
                return None;
            }
        }
    }
    let mut total = 0.0;
    for h in 0..3 {
        let mut ln = exps[h] * z.ln();
        let mut sign = 1.0;
        for j in 0..3 {
            if j != h {
                let (lg, s) = gamma_signed(exps[j] - exps[h]);
                ln += lg;
                sign *= s;
            }
        }
        let (lg, s) = gamma_signed(xi2 - exps[h]);
        if s == 0.0 {
            continue;
        }
        ln -= lg;
        sign *= s;
        total += sign * ln.exp();
    }
    Some(total)
}

/// Density with pointing error from the conditioning integral
/// `f(i) = ∫ f_{I|I_a}(i | x) f_GG(x) dx` over `x > i/A₀`, by quadrature.
/// Independent of the Meijer-G machinery; used to cross-check [`pdf_composite`].
pub fn pdf_composite_integral(i: f64, model: &ChannelModel, tol: ToleranceSpec) -> Result<f64, ChannelError> {
    check_positive("i", i)?;
    match model.kind {
        ChannelKind::GammaGamma { .. } => pdf_composite(i, model),
        ChannelKind::GammaGammaPointing { xi, a0 } => {
            let (a, b) = (model.a, model.b);
            let xi2 = xi * xi;
            let lower = i / a0;
            let integrand = |x: f64| -> f64 {
                match ln_pdf_gg(x, a, b) {
                    Ok(l) => (l + xi2 * (lower / x).ln()).exp(),
                    Err(_) => f64::NAN,
                }
            };
            let scale = gg_scale(lower, a, b);
            let r = integrate_semi_infinite_scaled(integrand, lower, scale, tol)?;
            Ok(xi2 / i * r.value)
        }
    }
}

/// Rough width of the Gamma-Gamma density beyond `lower`.
pub(crate) fn gg_scale(lower: f64, a: f64, b: f64) -> f64 {
    (lower / (a * b)).sqrt().max(1.0 / (a * b).sqrt()).max(0.05)
}

/// `P(λ > μ)` in closed form.
///
/// With pointing error: `1 - ξ²/(Γ(a)Γ(b)) · G^{3,1}_{2,4}(abμ/A₀ | 1, ξ²+1; ξ², a, b, 0)`;
/// without: `1 - 1/(Γ(a)Γ(b)) · G^{2,1}_{1,3}(abμ/g | 1; a, b, 0)`. The
/// constant 1 is exactly the residue of the Meijer-G at its left pole, so
/// both are evaluated as remainders to keep small tails accurate.
pub fn tail_probability(mu: f64, model: &ChannelModel) -> Result<f64, ChannelError> {
    check_positive("mu", mu)?;
    let (a, b) = (model.a, model.b);
    let z = model.meijer_scale() * mu;
    let (spec, front) = match model.kind {
        ChannelKind::GammaGammaPointing { xi, .. } => {
            let xi2 = xi * xi;
            (MeijerGSpec::new(3, 1, vec![1.0, xi2 + 1.0], vec![xi2, a, b, 0.0])?, xi2)
        }
        ChannelKind::GammaGamma { .. } => (MeijerGSpec::new(2, 1, vec![1.0], vec![a, b, 0.0])?, 1.0),
    };
    let rem = meijer_g_remainder(&spec, z)?;
    Ok((-front * (-model.ln_gamma_ab()).exp() * rem).clamp(0.0, 1.0))
}

/// `P(λ > μ)` by one-dimensional quadrature over `I_a`, with the pointing
/// loss integrated analytically: `E[1 - (μ/(A₀ I_a))^{ξ²}; I_a > μ/A₀]`.
pub fn tail_probability_quadrature(mu: f64, model: &ChannelModel, tol: ToleranceSpec) -> Result<f64, ChannelError> {
    check_positive("mu", mu)?;
    let (a, b) = (model.a, model.b);
    let lower = mu / model.peak_gain();
    let xi2 = model.xi().map(|x| x * x);
    let integrand = |x: f64| -> f64 {
        let f = match ln_pdf_gg(x, a, b) {
            Ok(l) => l.exp(),
            Err(_) => return f64::NAN,
        };
        match xi2 {
            Some(xi2) => -(-xi2 * (x / lower).ln()).exp_m1() * f,
            None => f,
        }
    };
    let r = integrate_semi_infinite_scaled(integrand, lower, gg_scale(lower, a, b), tol)?;
    Ok(r.value.clamp(0.0, 1.0))
}
