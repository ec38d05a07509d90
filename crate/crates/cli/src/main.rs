//! Command-line front end for the microcavity superradiance model.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical or
//! model error.

mod commands;
mod manifest;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "superradiance", version, about = "Two-dipole superradiance in a planar microcavity")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON configuration document.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Random seed; overrides the `seed` key.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Override a configuration key, e.g. `--set finesse=1000` (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", value_parser = parse_key_value)]
    pub overrides: Vec<(String, String)>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derived cavity quantities as JSON.
    Params,
    /// Decay rate over a grid of separations and times.
    Gamma {
        /// Separations in units of l_c, comma separated.
        #[arg(long = "r-grid-over-lc", value_delimiter = ',')]
        r_grid_over_lc: Option<Vec<f64>>,
        /// Observation times in seconds, comma separated; `inf` is steady state.
        #[arg(long = "t-grid-s", value_delimiter = ',')]
        t_grid_s: Option<Vec<f64>>,
        /// Kernel prefactor: verbatim or standard_half.
        #[arg(long)]
        normalization: Option<String>,
    },
    /// Synthesize and fit one coincidence histogram.
    Decay {
        #[arg(long = "separation-over-lc")]
        separation_over_lc: Option<f64>,
        #[arg(long = "expected-coincidences")]
        expected_coincidences: Option<f64>,
    },
    /// Conditioned partition probabilities versus separation.
    Partition {
        #[arg(long = "r-grid-over-lc", value_delimiter = ',')]
        r_grid_over_lc: Option<Vec<f64>>,
    },
    /// Monte Carlo run of the coincidence experiment.
    Simulate,
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    if k.is_empty() {
        return Err("empty key".into());
    }
    Ok((k.to_string(), v.to_string()))
}

fn json_list(values: &[f64]) -> String {
    let items: Vec<String> = values
        .iter()
        .map(|v| {
            if v.is_infinite() {
                "null".to_string()
            } else {
                format!("{v:e}")
            }
        })
        .collect();
    format!("[{}]", items.join(","))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let mut common = cli.common;
    let command = match cli.command {
        Command::Params => commands::Kind::Params,
        Command::Gamma {
            r_grid_over_lc,
            t_grid_s,
            normalization,
        } => {
            if let Some(r) = r_grid_over_lc {
                common.overrides.push(("r_grid_over_lc".into(), json_list(&r)));
            }
            if let Some(t) = t_grid_s {
                common.overrides.push(("t_grid_s".into(), json_list(&t)));
            }
            if let Some(n) = normalization {
                common.overrides.push(("normalization".into(), n));
            }
            commands::Kind::Gamma
        }
        Command::Decay {
            separation_over_lc,
            expected_coincidences,
        } => {
            if let Some(r) = separation_over_lc {
                common.overrides.push(("separation_over_lc".into(), format!("{r:e}")));
            }
            if let Some(n) = expected_coincidences {
                common.overrides.push(("expected_coincidences".into(), format!("{n:e}")));
            }
            commands::Kind::Decay
        }
        Command::Partition { r_grid_over_lc } => {
            if let Some(r) = r_grid_over_lc {
                common.overrides.push(("r_grid_over_lc".into(), json_list(&r)));
            }
            commands::Kind::Partition
        }
        Command::Simulate => commands::Kind::Simulate,
    };

    match commands::run(command, &common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
