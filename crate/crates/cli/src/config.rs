//! Scenario configuration: a TOML file with one table per concern. Every
//! field has a default, so an empty file (or none) describes the three
//! reference turbulence regimes over the default SNR grid.

use fso_capacity::capacity::Method;
use fso_capacity::LinkGeometry;
use serde::{Deserialize, Deserializer, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

/// A length in meters. Accepts a bare number (meters) or a string with a
/// unit suffix: `"1550 nm"`, `"1.2 cm"`, `"1.8 km"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Length(pub f64);

impl Length {
    pub fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim();
        let split = t
            .find(|c: char| c.is_ascii_alphabetic() || c == 'µ')
            .ok_or_else(|| format!("'{text}' has no unit (use nm, um, mm, cm, m or km)"))?;
        let (num, unit) = t.split_at(split);
        let value: f64 = num.trim().parse().map_err(|_| format!("'{text}' is not a number with a unit"))?;
        // sub-metre units divide so that e.g. "1550 nm" is exactly 1550e-9
        let meters = match unit.trim() {
            "nm" => value / 1e9,
            "um" | "µm" => value / 1e6,
            "mm" => value / 1e3,
            "cm" => value / 1e2,
            "m" => value,
            "km" => value * 1e3,
            other => return Err(format!("unknown length unit '{other}' in '{text}'")),
        };
        Ok(Self(meters))
    }
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Self(v)),
            Raw::Text(s) => Self::parse(&s).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub geometry: GeometrySection,
    pub turbulence: TurbulenceSection,
    pub pointing: PointingSection,
    pub scheme: SchemeSection,
    pub snr: SnrSection,
    pub capacity: CapacitySection,
    pub sweep: SweepSection,
    pub montecarlo: MonteCarloSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub wavelength: Length,
    pub beam_waist: Length,
    pub path_length: Length,
    pub aperture_radius: Length,
}

impl Default for GeometrySection {
    fn default() -> Self {
        let g = LinkGeometry::reference();
        Self {
            wavelength: Length(g.wavelength),
            beam_waist: Length(g.beam_waist),
            path_length: Length(g.path_length),
            aperture_radius: Length(g.aperture_radius),
        }
    }
}

/// Exactly one of the two lists may be given; with neither, the reference
/// Rytov variances 0.8, 2 and 6 are used.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TurbulenceSection {
    pub rytov_variance: Option<Vec<f64>>,
    pub cn2: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointingSection {
    pub enabled: bool,
    pub jitter_sigma: Length,
}

impl Default for PointingSection {
    fn default() -> Self {
        Self {
            enabled: true,
            jitter_sigma: Length(LinkGeometry::reference().jitter_sigma),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    Hd,
    Imdd,
    Both,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeSection {
    pub kind: SchemeChoice,
    /// Report IM/DD capacities below the high-power validity floor instead
    /// of flagging those points as errors.
    pub imdd_override: bool,
}

impl Default for SchemeSection {
    fn default() -> Self {
        Self {
            kind: SchemeChoice::Both,
            imdd_override: false,
        }
    }
}

/// Transmit SNR grid in dB: an explicit list, or start/stop/step.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SnrSection {
    pub grid_db: Option<Vec<f64>>,
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl Default for SnrSection {
    fn default() -> Self {
        Self {
            grid_db: None,
            start_db: -10.0,
            stop_db: 60.0,
            step_db: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    /// Turbulence with pointing error.
    Pe,
    /// Turbulence only.
    Gg,
}

impl ModelChoice {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pe => "pe",
            Self::Gg => "gg",
        }
    }
}

/// Received-power scale of the turbulence-only model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainChoice {
    /// Same geometric loss `A₀` as the pointing-error model.
    A0,
    /// Pure Gamma-Gamma, unit mean gain.
    Unity,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacitySection {
    pub methods: Vec<Method>,
    pub models: Vec<ModelChoice>,
    pub gg_only_gain: GainChoice,
    /// Add a received-SNR column, `snr_db + 10 log10 E[λ]`.
    pub received_snr: bool,
}

impl Default for CapacitySection {
    fn default() -> Self {
        Self {
            methods: vec![Method::Exact],
            models: vec![ModelChoice::Pe, ModelChoice::Gg],
            gg_only_gain: GainChoice::A0,
            received_snr: false,
        }
    }
}

/// Rytov-variance grid for the penalty and scaling sweeps.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub rytov_grid: Option<Vec<f64>>,
    pub rytov_start: f64,
    pub rytov_stop: f64,
    pub rytov_step: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            rytov_grid: None,
            rytov_start: 0.8,
            rytov_stop: 12.0,
            rytov_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloSection {
    pub samples: usize,
    pub snr_db: f64,
    pub seed: u64,
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            snr_db: 20.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub format: Format,
    pub path: Option<PathBuf>,
}

/// How a scenario's turbulence strength was specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strength {
    Rytov(f64),
    Cn2(f64),
}

pub const MIN_MONTE_CARLO_SAMPLES: usize = 10_000;

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn geometry(&self) -> LinkGeometry {
        LinkGeometry {
            wavelength: self.geometry.wavelength.0,
            beam_waist: self.geometry.beam_waist.0,
            path_length: self.geometry.path_length.0,
            aperture_radius: self.geometry.aperture_radius.0,
            jitter_sigma: if self.pointing.enabled { self.pointing.jitter_sigma.0 } else { 0.0 },
        }
    }

    pub fn strengths(&self) -> Vec<Strength> {
        match (&self.turbulence.rytov_variance, &self.turbulence.cn2) {
            (_, Some(c)) => c.iter().map(|&v| Strength::Cn2(v)).collect(),
            (Some(r), None) => r.iter().map(|&v| Strength::Rytov(v)).collect(),
            (None, None) => vec![Strength::Rytov(0.8), Strength::Rytov(2.0), Strength::Rytov(6.0)],
        }
    }

    pub fn snr_grid_db(&self) -> Vec<f64> {
        match &self.snr.grid_db {
            Some(g) => g.clone(),
            None => arithmetic_grid(self.snr.start_db, self.snr.stop_db, self.snr.step_db),
        }
    }

    pub fn rytov_sweep(&self) -> Vec<f64> {
        match &self.sweep.rytov_grid {
            Some(g) => g.clone(),
            None => arithmetic_grid(self.sweep.rytov_start, self.sweep.rytov_stop, self.sweep.rytov_step),
        }
    }

    /// Field-level checks; the first violation is reported.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = self.geometry();
        for (field, v) in [
            ("geometry.wavelength", g.wavelength),
            ("geometry.beam_waist", g.beam_waist),
            ("geometry.path_length", g.path_length),
            ("geometry.aperture_radius", g.aperture_radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(field, format!("must be a positive length, got {v} m")));
            }
        }
        let jitter = self.pointing.jitter_sigma.0;
        if !(jitter >= 0.0 && jitter.is_finite()) {
            return Err(invalid("pointing.jitter_sigma", format!("must be non-negative, got {jitter} m")));
        }
        match (&self.turbulence.rytov_variance, &self.turbulence.cn2) {
            (Some(_), Some(_)) => {
                return Err(invalid("turbulence", "give either rytov_variance or cn2, not both"));
            }
            (Some(v), None) => positive_list("turbulence.rytov_variance", v)?,
            (None, Some(v)) => positive_list("turbulence.cn2", v)?,
            (None, None) => {}
        }
        if self.snr.grid_db.is_none() && !(self.snr.step_db > 0.0 && self.snr.stop_db >= self.snr.start_db) {
            return Err(invalid("snr", "need step_db > 0 and stop_db >= start_db"));
        }
        increasing("snr.grid_db", &self.snr_grid_db())?;
        if self.sweep.rytov_grid.is_none() && !(self.sweep.rytov_step > 0.0 && self.sweep.rytov_stop >= self.sweep.rytov_start) {
            return Err(invalid("sweep", "need rytov_step > 0 and rytov_stop >= rytov_start"));
        }
        let sweep = self.rytov_sweep();
        increasing("sweep.rytov_grid", &sweep)?;
        positive_list("sweep.rytov_grid", &sweep)?;
        if self.capacity.methods.is_empty() {
            return Err(invalid("capacity.methods", "must not be empty"));
        }
        if self.capacity.models.is_empty() {
            return Err(invalid("capacity.models", "must not be empty"));
        }
        if self.montecarlo.samples < MIN_MONTE_CARLO_SAMPLES {
            return Err(invalid(
                "montecarlo.samples",
                format!("must be at least {MIN_MONTE_CARLO_SAMPLES}, got {}", self.montecarlo.samples),
            ));
        }
        if !self.montecarlo.snr_db.is_finite() {
            return Err(invalid("montecarlo.snr_db", "must be finite"));
        }
        Ok(())
    }
}

/// `start, start + step, ...` up to `stop` inclusive (with a small tolerance
/// for accumulated rounding), computed by index to avoid drift.
fn arithmetic_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || stop < start {
        return Vec::new();
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + step * k as f64).collect()
}

fn positive_list(field: &str, values: &[f64]) -> Result<(), ConfigError> {
    if values.is_empty() {
        return Err(invalid(field, "must not be empty"));
    }
    match values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        Some(v) => Err(invalid(field, format!("values must be positive, got {v}"))),
        None => Ok(()),
    }
}

fn increasing(field: &str, values: &[f64]) -> Result<(), ConfigError> {
    if values.is_empty() {
        return Err(invalid(field, "must not be empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid(field, "values must be finite"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(field, "must be strictly increasing"));
    }
    Ok(())
}
