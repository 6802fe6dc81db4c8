//! `sarima`: batch front end for Box-Jenkins seasonal ARIMA work.
//!
//! Exit codes: 0 success, 2 usage, 3 data, 4 numeric, 5 no admissible model.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Artifacts, Failure};
use config::{RunConfig, Split, TransformPolicy};
use sarima_core::{ErrorCategory, ModelSpec};

#[derive(Parser)]
#[command(name = "sarima", version, about = "Seasonal ARIMA identification, estimation, diagnostics and forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Unit-root tests and correlograms of the differenced series
    Identify,
    /// Estimate the model given by --spec
    Fit,
    /// Residual tests for a stored model
    Diagnose,
    /// Forecasts with intervals from a stored model
    Forecast,
    /// One-step holdout ledger and MAPE for a stored model
    Evaluate,
    /// Grid search, AIC ranking and gating
    Select,
}

/// Flags override the matching fields of the config file.
#[derive(Args)]
struct Flags {
    /// CSV with a `date,value` header
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Training length as a count or the last training month (YYYY-MM)
    #[arg(long, global = true)]
    split: Option<Split>,
    /// auto, none, log or a Box-Cox exponent
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<TransformPolicy>,
    /// p,d,q,P,D,Q,s
    #[arg(long, global = true)]
    spec: Option<ModelSpec>,
    /// Interval coverage, e.g. 0.95
    #[arg(long, global = true)]
    level: Option<f64>,
    /// Forecast horizon
    #[arg(long, global = true)]
    h: Option<usize>,
    /// Model document (default <out>/model.json)
    #[arg(long, global = true)]
    model: Option<PathBuf>,
}

impl Flags {
    fn apply(self, mut cfg: RunConfig) -> RunConfig {
        cfg.input = self.input.or(cfg.input);
        cfg.out = self.out.unwrap_or(cfg.out);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.split = self.split.or(cfg.split);
        cfg.transform = self.lambda.unwrap_or(cfg.transform);
        cfg.spec = self.spec.or(cfg.spec);
        cfg.level = self.level.unwrap_or(cfg.level);
        cfg.horizon = self.h.unwrap_or(cfg.horizon);
        cfg.model = self.model.or(cfg.model);
        cfg
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f.error.category() {
        ErrorCategory::Usage => 2,
        ErrorCategory::Data => 3,
        ErrorCategory::Numeric => 4,
        ErrorCategory::NoAdmissibleModel => 5,
    }
}

/// All files are written here, after the computation has finished.
fn write_artifacts(cfg: &RunConfig, artifacts: &Artifacts) -> std::io::Result<()> {
    std::fs::create_dir_all(&cfg.out)?;
    let echo = serde_json::to_string_pretty(cfg).map_err(std::io::Error::other)?;
    std::fs::write(cfg.out.join("run_config.json"), echo + "\n")?;
    for (name, contents) in &artifacts.files {
        let path = if name.is_absolute() { name.clone() } else { cfg.out.join(name) };
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, contents)?;
    }
    Ok(())
}

fn run(command: Command, cfg: &RunConfig) -> Result<Artifacts, Failure> {
    match command {
        Command::Identify => commands::identify(cfg),
        Command::Fit => commands::fit_model(cfg),
        Command::Diagnose => commands::diagnose(cfg),
        Command::Forecast => commands::forecast_model(cfg),
        Command::Evaluate => commands::evaluate(cfg),
        Command::Select => commands::select(cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let base = match &cli.flags.config {
        Some(path) => match RunConfig::load(path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: config: {e}");
                return ExitCode::from(2);
            }
        },
        None => RunConfig::default(),
    };
    let cfg = cli.flags.apply(base);
    let artifacts = match run(cli.command, &cfg) {
        Ok(a) => a,
        Err(f) => {
            eprintln!("error: {f}");
            return ExitCode::from(exit_code(&f));
        }
    };
    if let Err(e) = write_artifacts(&cfg, &artifacts) {
        eprintln!("error: output: {e}");
        return ExitCode::from(3);
    }
    print!("{}", artifacts.stdout);
    match &artifacts.failure {
        Some(f) => {
            eprintln!("error: {f}");
            ExitCode::from(exit_code(f))
        }
        None => ExitCode::SUCCESS,
    }
}
