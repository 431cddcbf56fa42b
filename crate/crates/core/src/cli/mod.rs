//! Command-line front end: one subcommand per operation, configured by a TOML
//! file, writing a CSV table and a JSON summary per invocation.
//!
//! Exit codes: 0 when every check passes, 2 when a check fails, 1 on error.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::ExperimentConfig;
pub use output::{Check, Provenance, Summary, Table};

use crate::error::{EpError, Result};

#[derive(Debug, Parser)]
#[command(name = "eplab", version, about = "Pseudo-spectral Euler-Poisson laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `seed` from the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the system and record norm series.
    Simulate(Common),
    /// Dispersive decay of the free flow on ℝ³.
    Lindecay(Common),
    /// Decay bounds for the charged low-frequency part.
    Bdchi(Common),
    /// Lower bound of the phase.
    Phasebound(Common),
    /// Derivative bounds of the normal-form symbols.
    Symbolbound(Common),
    /// Hölder bounds for localized pseudo-products.
    Holder(Common),
    /// Low-high pseudo-product bound.
    Lhbound(Common),
    /// Product estimate.
    Prodform(Common),
    /// Normal-form identity along a run.
    Nfcheck(Common),
    /// Decay of the profile's time derivative.
    Controlds(Common),
    /// Scattering rate of the profile.
    Scatter(Common),
    /// Bootstrap quantity of the main norm.
    Bootstrap(Common),
    /// Aggregate the summaries in a directory.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
}

type Runner = fn(&ExperimentConfig) -> Result<commands::CommandOutput>;

impl Command {
    fn parts(&self) -> Option<(&'static str, &Common, Runner)> {
        use Command::*;
        Some(match self {
            Simulate(c) => ("simulate", c, commands::simulate),
            Lindecay(c) => ("lindecay", c, commands::lindecay_cmd),
            Bdchi(c) => ("bdchi", c, commands::bdchi),
            Phasebound(c) => ("phasebound", c, commands::phasebound),
            Symbolbound(c) => ("symbolbound", c, commands::symbolbound),
            Holder(c) => ("holder", c, commands::holder),
            Lhbound(c) => ("lhbound", c, commands::lhbound),
            Prodform(c) => ("prodform", c, commands::prodform),
            Nfcheck(c) => ("nfcheck", c, commands::nfcheck),
            Controlds(c) => ("controlds", c, commands::controlds),
            Scatter(c) => ("scatter", c, commands::scatter),
            Bootstrap(c) => ("bootstrap", c, commands::bootstrap),
            Report { .. } => return None,
        })
    }
}

/// Load the configuration with command-line overrides applied.
pub fn load_config(common: &Common) -> Result<(ExperimentConfig, String)> {
    let bytes = std::fs::read(&common.config)
        .map_err(|e| EpError::Config(format!("cannot read {}: {e}", common.config.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| EpError::Config(format!("{} is not UTF-8", common.config.display())))?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output.dir = out.to_string_lossy().into_owned();
    }
    Ok((cfg, output::config_hash(&bytes)))
}

/// Run one subcommand, write its outputs and return the summary.
pub fn run(command: &Command) -> Result<Summary> {
    let Some((name, common, runner)) = command.parts() else {
        let Command::Report { dir } = command else { unreachable!() };
        let summaries = output::read_summaries(dir)?;
        if summaries.is_empty() {
            return Err(EpError::Config(format!("no summaries found in {}", dir.display())));
        }
        let text = output::render_report(&summaries);
        std::fs::write(dir.join("report.txt"), &text)?;
        let checks = summaries
            .iter()
            .map(|s| Check {
                name: s.provenance.subcommand.clone(),
                value: None,
                requirement: "all checks pass".into(),
                pass: s.pass,
            })
            .collect();
        let prov = Provenance { subcommand: "report".into(), config_hash: String::new(), seed: 0 };
        return Ok(Summary::new(prov, checks));
    };
    let (cfg, hash) = load_config(common)?;
    let (table, checks) = runner(&cfg)?;
    let summary = Summary::new(Provenance { subcommand: name.into(), config_hash: hash, seed: cfg.seed }, checks);
    output::write_outputs(&cfg.output_dir(), &table, &summary)?;
    Ok(summary)
}

/// [`run`], then print the check lines (or the report table).
pub fn execute(command: &Command) -> Result<Summary> {
    let summary = run(command)?;
    if let Command::Report { dir } = command {
        print!("{}", std::fs::read_to_string(dir.join("report.txt"))?);
    } else {
        for c in &summary.checks {
            println!("{}", c.line());
        }
    }
    Ok(summary)
}

/// Parse arguments, run, and map the outcome to the exit-code contract.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(s) if s.pass => 0,
        Ok(_) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
