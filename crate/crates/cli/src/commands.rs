use crate::config::{GainChoice, ModelChoice, SchemeChoice, ScenarioConfig, Strength};
use crate::output::{format_significant, Cell, PointError, Report, Series};
use fso_capacity::capacity::{
    capacity_asymptotic_high, capacity_asymptotic_low, capacity_exact, capacity_monte_carlo, capacity_oracle,
    db_to_linear, linear_to_db, low_snr_scaling_factor, nats_to_bits, penalty_high_snr, solve_threshold, MeanEstimate,
    Method,
};
use fso_capacity::channel::sample_irradiance;
use fso_capacity::linkmodel::{cn2_from_rytov, derive_pointing_state, gg_params_from_rytov};
use fso_capacity::{
    CapacityError, CapacityPoint, ChannelError, ChannelModel, DetectionKind, DetectionScheme, LinkModelError,
    PointingState, TurbulenceState,
};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    LinkModel(#[from] LinkModelError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
}

/// One turbulence strength on the configured link.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub label: String,
    pub turbulence: TurbulenceState,
    pub pointing: PointingState,
}

impl Scenario {
    fn model(&self, choice: ModelChoice, gain: GainChoice) -> Result<Option<ChannelModel>, CommandError> {
        let (a, b) = (self.turbulence.a, self.turbulence.b);
        Ok(match choice {
            ModelChoice::Pe if self.pointing.has_pointing_error() => {
                Some(ChannelModel::with_pointing(a, b, self.pointing.xi, self.pointing.a0)?)
            }
            ModelChoice::Pe => None,
            ModelChoice::Gg => Some(match gain {
                GainChoice::A0 => ChannelModel::gamma_gamma_with_gain(a, b, self.pointing.a0)?,
                GainChoice::Unity => ChannelModel::gamma_gamma(a, b)?,
            }),
        })
    }

    /// `E[I]`, including the geometric loss `A₀` when there is no jitter.
    fn mean_irradiance(&self) -> f64 {
        let xi = self.pointing.xi;
        if xi.is_finite() {
            self.pointing.a0 * xi * xi / (1.0 + xi * xi)
        } else {
            self.pointing.a0
        }
    }
}

pub fn scenarios(cfg: &ScenarioConfig) -> Result<Vec<Scenario>, CommandError> {
    let geom = cfg.geometry();
    cfg.strengths()
        .into_iter()
        .map(|s| {
            let (label, turbulence) = match s {
                Strength::Rytov(v) => (format!("rytov={}", format_significant(v)), TurbulenceState::from_rytov(v, &geom)?),
                Strength::Cn2(v) => (format!("cn2={}", format_significant(v)), TurbulenceState::from_cn2(v, &geom)?),
            };
            let pointing = derive_pointing_state(&geom, turbulence.cn2)?;
            Ok(Scenario {
                label,
                turbulence,
                pointing,
            })
        })
        .collect()
}

fn schemes(cfg: &ScenarioConfig) -> Vec<DetectionScheme> {
    let imdd = if cfg.scheme.imdd_override {
        DetectionScheme::intensity_modulation().allowing_low_power()
    } else {
        DetectionScheme::intensity_modulation()
    };
    match cfg.scheme.kind {
        SchemeChoice::Hd => vec![DetectionScheme::heterodyne()],
        SchemeChoice::Imdd => vec![imdd],
        SchemeChoice::Both => vec![DetectionScheme::heterodyne(), imdd],
    }
}

pub fn params(cfg: &ScenarioConfig) -> Result<Report, CommandError> {
    let columns = [
        "rytov", "cn2", "a", "b", "rho0", "epsilon", "w_l", "v", "a0", "w_leq", "xi", "mean_irradiance", "mean_irradiance_db",
        "pointing",
    ];
    let mut series = Vec::new();
    for sc in scenarios(cfg)? {
        let t = &sc.turbulence;
        let p = &sc.pointing;
        let mean = sc.mean_irradiance();
        let mut s = Series::new("params", vec![("scenario", sc.label.clone())], &columns);
        s.rows.push(vec![
            t.rytov_variance.into(),
            t.cn2.into(),
            t.a.into(),
            t.b.into(),
            p.rho0.into(),
            p.epsilon.into(),
            p.w_l.into(),
            p.v.into(),
            p.a0.into(),
            p.w_leq.into(),
            p.xi.into(),
            mean.into(),
            linear_to_db(mean).into(),
            if p.has_pointing_error() { "enabled" } else { "disabled" }.into(),
        ]);
        series.push(s);
    }
    Ok(Report {
        command: "params",
        series,
        errors: Vec::new(),
    })
}

fn method_applies(method: Method, scheme: &DetectionScheme, snr: f64) -> bool {
    match method {
        Method::AsymptoticLow => scheme.kind == DetectionKind::Heterodyne && snr < 1.0,
        Method::AsymptoticHigh => snr > 1.0,
        _ => true,
    }
}

fn capacity_point(
    cfg: &ScenarioConfig,
    method: Method,
    model: &ChannelModel,
    scheme: DetectionScheme,
    snr: f64,
    seed: u64,
) -> Result<CapacityPoint, CapacityError> {
    match method {
        Method::Exact => capacity_exact(model, scheme, snr),
        Method::Oracle => capacity_oracle(model, scheme, snr),
        Method::AsymptoticLow => capacity_asymptotic_low(model, scheme, snr),
        Method::AsymptoticHigh => capacity_asymptotic_high(model, scheme, snr),
        Method::MonteCarlo => capacity_monte_carlo(model, scheme, snr, cfg.montecarlo.samples, seed).map(|r| r.point),
    }
}

/// One series per (scenario, model, scheme, method). Asymptotic series only
/// cover the grid points inside their domain. Failed points keep their row
/// with empty values and the message in `error`.
pub fn capacity(cfg: &ScenarioConfig, seed: u64) -> Result<Report, CommandError> {
    let grid = cfg.snr_grid_db();
    let mut columns = vec!["snr_db"];
    if cfg.capacity.received_snr {
        columns.push("received_snr_db");
    }
    columns.extend(["mu", "capacity_nats", "capacity_bits", "error"]);
    let mut series = Vec::new();
    let mut errors = Vec::new();
    for sc in scenarios(cfg)? {
        for &choice in &cfg.capacity.models {
            let Some(model) = sc.model(choice, cfg.capacity.gg_only_gain)? else {
                log::warn!("{}: no pointing jitter, skipping the pointing-error model", sc.label);
                continue;
            };
            let received_offset = linear_to_db(model.mean_irradiance());
            for scheme in schemes(cfg) {
                for &method in &cfg.capacity.methods {
                    let points: Vec<f64> = grid.iter().copied().filter(|&db| method_applies(method, &scheme, db_to_linear(db))).collect();
                    if points.is_empty() {
                        continue;
                    }
                    let labels = vec![
                        ("scenario", sc.label.clone()),
                        ("model", choice.name().to_string()),
                        ("scheme", scheme.name().to_string()),
                        ("method", method.name().to_string()),
                    ];
                    let tag = labels.iter().map(|(_, v)| v.as_str()).collect::<Vec<_>>().join("/");
                    let mut s = Series::new("capacity", labels, &columns);
                    let results: Vec<_> = points
                        .par_iter()
                        .map(|&db| capacity_point(cfg, method, &model, scheme, db_to_linear(db), seed))
                        .collect();
                    for (&db, result) in points.iter().zip(results) {
                        let mut row = vec![Cell::Num(db)];
                        if cfg.capacity.received_snr {
                            row.push(Cell::Num(db + received_offset));
                        }
                        match result {
                            Ok(p) => row.extend([p.threshold.into(), p.capacity.into(), p.capacity_bits().into(), Cell::Empty]),
                            Err(e) => {
                                row.extend([Cell::Empty, Cell::Empty, Cell::Empty, e.to_string().into()]);
                                errors.push(PointError {
                                    series: tag.clone(),
                                    x: db,
                                    message: e.to_string(),
                                });
                            }
                        }
                        s.rows.push(row);
                    }
                    series.push(s);
                }
            }
        }
    }
    Ok(Report {
        command: "capacity",
        series,
        errors,
    })
}

struct SweepRow {
    rytov: f64,
    a: f64,
    b: f64,
    pointing: PointingState,
}

fn sweep(cfg: &ScenarioConfig) -> Result<Vec<SweepRow>, CommandError> {
    let geom = cfg.geometry();
    cfg.rytov_sweep()
        .par_iter()
        .map(|&s2| {
            let (a, b) = gg_params_from_rytov(s2)?;
            let pointing = derive_pointing_state(&geom, cn2_from_rytov(s2, &geom)?)?;
            Ok(SweepRow { rytov: s2, a, b, pointing })
        })
        .collect()
}

/// High-SNR penalty in bits over the Rytov sweep. The no-pointing-error
/// column is the pure turbulence penalty (unit gain).
pub fn penalty(cfg: &ScenarioConfig) -> Result<Report, CommandError> {
    let mut s = Series::new(
        "penalty",
        vec![],
        &["rytov", "penalty_bits_with_pe", "penalty_bits_no_pe", "a0", "xi"],
    );
    for r in sweep(cfg)? {
        let with = if r.pointing.has_pointing_error() {
            let m = ChannelModel::with_pointing(r.a, r.b, r.pointing.xi, r.pointing.a0)?;
            Cell::Num(nats_to_bits(penalty_high_snr(&m)?))
        } else {
            Cell::Empty
        };
        let without = nats_to_bits(penalty_high_snr(&ChannelModel::gamma_gamma(r.a, r.b)?)?);
        s.rows.push(vec![r.rytov.into(), with, without.into(), r.pointing.a0.into(), r.pointing.xi.into()]);
    }
    Ok(Report {
        command: "penalty",
        series: vec![s],
        errors: Vec::new(),
    })
}

/// Low-SNR capacity scaling factors `A₀/(4ab)` and `1/(4ab)`.
pub fn scaling(cfg: &ScenarioConfig) -> Result<Report, CommandError> {
    let mut s = Series::new("scaling", vec![], &["rytov", "A0_over_4ab", "one_over_4ab", "a0"]);
    for r in sweep(cfg)? {
        let gg = ChannelModel::gamma_gamma(r.a, r.b)?;
        let one = low_snr_scaling_factor(&gg);
        s.rows.push(vec![r.rytov.into(), (r.pointing.a0 * one).into(), one.into(), r.pointing.a0.into()]);
    }
    Ok(Report {
        command: "scaling",
        series: vec![s],
        errors: Vec::new(),
    })
}

const SMALL_SAMPLE_NOTE: usize = 1_000_000;

/// Empirical against closed-form statistics at one SNR, per scenario:
/// mean irradiance, CDF at the threshold and waterfilled efficiency, each
/// gated at three standard errors.
pub fn montecarlo(cfg: &ScenarioConfig, seed: u64) -> Result<Report, CommandError> {
    let samples = cfg.montecarlo.samples;
    let snr = db_to_linear(cfg.montecarlo.snr_db);
    let columns = ["quantity", "closed_form", "empirical", "standard_error", "z", "pass", "note"];
    let note = if samples < SMALL_SAMPLE_NOTE {
        format!("{samples} samples: standard errors are wide")
    } else {
        String::new()
    };
    let mut series = Vec::new();
    let mut errors = Vec::new();
    for sc in scenarios(cfg)? {
        let choice = if sc.pointing.has_pointing_error() { ModelChoice::Pe } else { ModelChoice::Gg };
        let model = sc.model(choice, cfg.capacity.gg_only_gain)?.expect("model available");
        let draws = sample_irradiance(&model, seed, samples)?;
        let mu = match solve_threshold(&model, snr) {
            Ok(mu) => mu,
            Err(e) => {
                errors.push(PointError {
                    series: sc.label.clone(),
                    x: cfg.montecarlo.snr_db,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let mut checks: Vec<(String, f64, MeanEstimate)> = vec![
            ("mean_irradiance".into(), model.mean_irradiance(), MeanEstimate::from_values(&draws)),
            (
                "cdf_at_mu".into(),
                model.cdf(mu)?,
                MeanEstimate::from_fn(&draws, |l| if l <= mu { 1.0 } else { 0.0 }),
            ),
        ];
        let log_gain = MeanEstimate::from_fn(&draws, |l| if l > mu { (l / mu).ln() } else { 0.0 });
        for scheme in schemes(cfg) {
            let tag = format!("{}/{}/{}", sc.label, choice.name(), scheme.name());
            match capacity_exact(&model, scheme, snr) {
                Ok(p) => {
                    let k = scheme.k();
                    let est = MeanEstimate {
                        mean: log_gain.mean / k,
                        standard_error: log_gain.standard_error / k,
                        count: log_gain.count,
                    };
                    checks.push((format!("spectral_efficiency_{}", scheme.name()), p.capacity, est));
                }
                Err(e) => errors.push(PointError {
                    series: tag,
                    x: cfg.montecarlo.snr_db,
                    message: e.to_string(),
                }),
            }
        }
        let mut s = Series::new(
            "montecarlo",
            vec![
                ("scenario", sc.label.clone()),
                ("model", choice.name().to_string()),
                ("snr_db", format_significant(cfg.montecarlo.snr_db)),
                ("samples", samples.to_string()),
                ("seed", seed.to_string()),
            ],
            &columns,
        );
        for (name, closed, est) in checks {
            let z = (est.mean - closed) / est.standard_error;
            let pass = est.within(closed, 3.0);
            if !pass {
                log::warn!("{}: {name} is {z:.2} standard errors from its closed form", sc.label);
            }
            s.rows.push(vec![
                name.into(),
                closed.into(),
                est.mean.into(),
                est.standard_error.into(),
                z.into(),
                if pass { "pass" } else { "fail" }.into(),
                note.clone().into(),
            ]);
        }
        series.push(s);
    }
    Ok(Report {
        command: "montecarlo",
        series,
        errors,
    })
}
