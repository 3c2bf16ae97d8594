//! The `seqmech` command line: argument parsing, config merging and output.

pub mod config;
pub mod run;
pub mod table;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use serde::de::DeserializeOwned;

use crate::boost::{FeeMode, Pricing};
use crate::error::{Error, Result};
use crate::mc::{with_threads, Execution};

pub use config::{parse_config, Command, CostSpec, CurveSpec, RunConfig};
pub use run::{columns, run, Report, RunOutput};
pub use table::{format_sig, Table};

/// Exit status when an asserted tolerance is exceeded.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit status for invalid input or I/O failure.
pub const EXIT_ERROR: i32 = 2;

fn snake_enum<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|e| e.to_string())
}

/// Flags override the corresponding keys of `--config`.
#[derive(Debug, Parser)]
#[command(name = "seqmech", version, about = "Batch auction vs time boost: equilibria, audits, Monte Carlo")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Sets `cost` to `{"family": "inverse", "c": X}`.
    #[arg(long = "cost-c")]
    pub cost_c: Option<f64>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `all_pay` or `first_price`.
    #[arg(long, value_parser = snake_enum::<Pricing>)]
    pub pricing: Option<Pricing>,
    /// `linear` or `exact`.
    #[arg(long = "fee-mode", value_parser = snake_enum::<FeeMode>)]
    pub fee_mode: Option<FeeMode>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Worker threads for simulation and audits. Not part of the config.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Args {
    /// The file config (or defaults) with flags applied, validated.
    pub fn config(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str(&text).map_err(|e| Error::config("document", e.to_string()))?
            }
            None => RunConfig::new(self.command),
        };
        config.command = self.command;
        config.g = self.g.or(config.g);
        config.c = self.c.or(config.c);
        config.delta = self.delta.or(config.delta);
        if let Some(c) = self.cost_c {
            config.cost = Some(CostSpec::Inverse { c });
        }
        config.mc.n = self.n.unwrap_or(config.mc.n);
        config.mc.seed = self.seed.unwrap_or(config.mc.seed);
        config.pricing = self.pricing.unwrap_or(config.pricing);
        config.fee_mode = self.fee_mode.unwrap_or(config.fee_mode);
        if self.json.is_some() {
            config.output.json.clone_from(&self.json);
        }
        if self.csv.is_some() {
            config.output.csv.clone_from(&self.csv);
        }
        config.validate()?;
        Ok(config)
    }
}

fn execute(args: &Args) -> Result<bool> {
    let config = args.config()?;
    let go = || run(&config, Execution::default());
    let out = match args.threads {
        Some(t) => with_threads(t, go),
        None => go(),
    }?;
    let json = out.report.to_json();
    match &config.output.json {
        Some(path) => std::fs::write(path, json + "\n")?,
        None => println!("{json}"),
    }
    if let Some(path) = &config.output.csv {
        std::fs::write(path, out.table.to_csv())?;
    }
    Ok(out.passed)
}

/// Runs the CLI on `argv` and returns the process exit status.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    match execute(&args) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("seqmech: one or more asserted checks failed (see flags.failed_checks)");
            EXIT_CHECK_FAILED
        }
        Err(e) => {
            eprintln!("seqmech: error: {e}");
            EXIT_ERROR
        }
    }
}
