mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use config::{ConfigError, Format, SchemeChoice, ScenarioConfig};
use fso_capacity::Method;
use serde_json::json;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Ergodic capacity of FSO links under turbulence and pointing error.
#[derive(Debug, Parser)]
#[command(name = "fsocap", version)]
struct Cli {
    /// TOML scenario file; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for Monte Carlo draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derived channel parameters per turbulence strength.
    Params,
    /// Capacity against SNR.
    Capacity {
        /// Comma-separated: exact, oracle, asymptotic_low, asymptotic_high, monte_carlo.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
        #[arg(long, value_enum)]
        scheme: Option<SchemeChoice>,
        /// Evaluate IM/DD below its validity floor.
        #[arg(long)]
        imdd_override: bool,
    },
    /// High-SNR penalty over the Rytov sweep.
    Penalty,
    /// Low-SNR scaling factors over the Rytov sweep.
    Scaling,
    /// Empirical statistics against closed forms.
    Montecarlo {
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        snr_db: Option<f64>,
    },
}

fn fail(code: u8, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "errors": [{ "message": message }] }));
    ExitCode::from(code)
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(path) = &cli.output {
        cfg.output.path = Some(path.clone());
    }
    if let Some(format) = cli.format {
        cfg.output.format = format;
    }
    if let Some(seed) = cli.seed {
        cfg.montecarlo.seed = seed;
    }
    match &cli.command {
        Command::Capacity {
            methods,
            scheme,
            imdd_override,
        } => {
            if let Some(m) = methods {
                cfg.capacity.methods = m.clone();
            }
            if let Some(s) = scheme {
                cfg.scheme.kind = *s;
            }
            cfg.scheme.imdd_override |= imdd_override;
        }
        Command::Montecarlo { samples, snr_db } => {
            if let Some(n) = samples {
                cfg.montecarlo.samples = *n;
            }
            if let Some(db) = snr_db {
                cfg.montecarlo.snr_db = *db;
            }
        }
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => return fail(EXIT_CONFIG, &e.to_string()),
    };
    let seed = cfg.montecarlo.seed;
    let result = match cli.command {
        Command::Params => commands::params(&cfg),
        Command::Capacity { .. } => commands::capacity(&cfg, seed),
        Command::Penalty => commands::penalty(&cfg),
        Command::Scaling => commands::scaling(&cfg),
        Command::Montecarlo { .. } => commands::montecarlo(&cfg, seed),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => return fail(EXIT_NUMERICAL, &e.to_string()),
    };
    let meta = json!({
        "command": report.command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config": cfg,
    });
    let written = match &cfg.output.path {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            output::write_report(&report, cfg.output.format, meta, &mut w)?;
            w.flush()
        }),
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            output::write_report(&report, cfg.output.format, meta, &mut w)
        }
    };
    if let Err(e) = written {
        return fail(EXIT_CONFIG, &format!("cannot write output: {e}"));
    }
    if !report.errors.is_empty() {
        eprintln!("{}", json!({ "errors": report.errors }));
        return ExitCode::from(EXIT_NUMERICAL);
    }
    ExitCode::SUCCESS
}
