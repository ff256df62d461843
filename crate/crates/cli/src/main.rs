//! `damix`: batch runner for the data-augmentation samplers, the bound
//! calculators and the verification suite.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use damix::models::ModelKind;

use config::ExperimentConfig;
use error::CliError;
use output::Outputs;

#[derive(Debug, Parser)]
#[command(name = "damix", version, about = "Data-augmentation samplers, mixing bounds and diagnostics")]
struct Cli {
    /// Experiment config (TOML); the shipped default when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Stand-in for the unspecified universal constant of the bounds.
    #[arg(long = "c-convention", global = true)]
    c_convention: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one DA chain and write its trace.
    Sample {
        /// Overrides sample.model (probit, logit or lasso).
        #[arg(long)]
        model: Option<ModelKind>,
        /// Overrides sample.iters.
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Evaluate every mixing-time bound for the configured inputs.
    Bounds,
    /// Run the oracle and inequality suite.
    Verify,
    /// IAT scaling sweep with a log-log slope fit.
    Sweep,
    /// Write a synthetic dataset.
    GenData,
    /// DA against LMC and MALA on one posterior.
    Compare,
    /// Print the effective config.
    ShowConfig,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sample { .. } => "sample",
            Command::Bounds => "bounds",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::GenData => "gen-data",
            Command::Compare => "compare",
            Command::ShowConfig => "show-config",
        }
    }
}

fn effective_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    if let Some(c) = cli.c_convention {
        cfg.c_convention = c;
    }
    if let Command::Sample { model, iters } = &cli.command {
        if model.is_some() || iters.is_some() {
            let s = cfg.sample.as_mut().ok_or_else(|| CliError::Config("the config has no [sample] section".into()))?;
            if let Some(m) = model {
                s.model = *m;
                if let Some(g) = s.data.generator.as_mut() {
                    g.response = *m;
                }
            }
            if let Some(i) = iters {
                s.iters = *i;
            }
        }
    }
    cfg.check()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = effective_config(cli)?;
    if let Command::ShowConfig = cli.command {
        print!("{}", cfg.to_toml()?);
        return Ok(());
    }
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let mut out = Outputs::new(&cfg.out, cli.command.name(), cfg.seed, cfg.hash()?)?;
    let text = cfg.to_toml()?;
    out.write_text("config.toml", &text)?;
    let mut verified = true;
    match &cli.command {
        Command::Sample { .. } => commands::sample(&cfg, sample_section(&cfg)?, &mut out)?,
        Command::Bounds => {
            let b = cfg.bounds.as_ref().ok_or_else(|| CliError::Config("the config has no [bounds] section".into()))?;
            commands::bounds(&cfg, b, &mut out)?
        }
        Command::Verify => verified = commands::verify(&cfg, &mut out)?,
        Command::Sweep => {
            let s = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("the config has no [sweep] section".into()))?;
            commands::sweep(&cfg, s, &mut out)?
        }
        Command::GenData => commands::gen_data(&cfg, &mut out)?,
        Command::Compare => {
            let c = cfg.compare.as_ref().ok_or_else(|| CliError::Config("the config has no [compare] section".into()))?;
            commands::compare(&cfg, c, &mut out)?
        }
        Command::ShowConfig => unreachable!(),
    }
    let hash = out.hash().to_string();
    let files = out.commit();
    eprintln!("wrote {} files to {} (config {})", files.len(), cfg.out.display(), &hash[..12]);
    if verified {
        Ok(())
    } else {
        Err(CliError::VerifyFailed("see verify_report.txt".into()))
    }
}

fn sample_section(cfg: &ExperimentConfig) -> Result<&config::SampleConfig, CliError> {
    cfg.sample.as_ref().ok_or_else(|| CliError::Config("the config has no [sample] section".into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("damix: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
