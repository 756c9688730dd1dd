//! `satnls` command line.
//!
//! Exit codes: 0 success, 1 configuration error, 2 divergence (or a failed conservation check),
//! 3 negative stability verdict.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::io::{config_from_pairs, parse_key_values};
use crate::presets::preset_text;
use crate::types::{NormIntegrand, RunConfig, Scheme, Splitting};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DIVERGED: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "satnls", version, about = "Saturable NLS soliton simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write evolution, snapshot, diagnostics and manifest files.
    Simulate {
        #[command(flatten)]
        source: ConfigSource,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Single-soliton conservation check over a few steps.
    Conserve {
        #[arg(id = "conserve_scheme", value_name = "SCHEME", value_parser = parse_scheme)]
        scheme: Scheme,
        /// Steps after the initial state (the fd bootstrap step is extra).
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Von Neumann verdict for the leapfrog scheme.
    Stability {
        tau: f64,
        #[arg(value_name = "L")]
        length: f64,
        #[arg(value_name = "N")]
        points: usize,
        /// Print max |α| for this many β samples.
        #[arg(long)]
        sweep: Option<usize>,
    },
    /// Run both schemes from the same initial state and compare them.
    Compare {
        #[command(flatten)]
        source: ConfigSource,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Time both schemes (defaults: fig2 for split step, fig1 for finite differences).
    Bench {
        /// Config files to time; may be repeated.
        #[arg(long = "config")]
        configs: Vec<PathBuf>,
        #[arg(long, default_value_t = 5)]
        repeat: usize,
    },
    /// List the shipped presets, or print one.
    Presets { name: Option<String> },
}

#[derive(Debug, Args)]
pub struct ConfigSource {
    /// Config file (`key=value` lines).
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Name of a shipped preset, e.g. `fig2`.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct Overrides {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<Scheme>,
    #[arg(long = "s", allow_hyphen_values = true)]
    pub saturation: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long = "T")]
    pub total_time: Option<f64>,
    #[arg(long = "L")]
    pub length: Option<f64>,
    #[arg(long = "N")]
    pub points: Option<usize>,
    /// `offset:velocity` pairs separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    pub solitons: Option<String>,
    #[arg(long)]
    pub snapshot_stride: Option<usize>,
    #[arg(long, value_parser = parse_splitting)]
    pub splitting: Option<Splitting>,
    #[arg(long, value_parser = parse_integrand)]
    pub norm_integrand: Option<NormIntegrand>,
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_splitting(s: &str) -> std::result::Result<Splitting, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_integrand(s: &str) -> std::result::Result<NormIntegrand, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut set = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        set("scheme", self.scheme.map(|s| s.to_string()));
        set("S", self.saturation.map(|v| v.to_string()));
        set("tau", self.tau.map(|v| v.to_string()));
        set("T", self.total_time.map(|v| v.to_string()));
        set("L", self.length.map(|v| v.to_string()));
        set("N", self.points.map(|v| v.to_string()));
        set("solitons", self.solitons.clone());
        set(
            "snapshot_stride",
            self.snapshot_stride.map(|v| v.to_string()),
        );
        set("splitting", self.splitting.map(|v| v.to_string()));
        set("norm_integrand", self.norm_integrand.map(|v| v.to_string()));
        set(
            "output_dir",
            self.out.as_ref().map(|p| p.display().to_string()),
        );
        out
    }

    /// Replaces or adds keys, then validates the result.
    pub fn apply(&self, mut pairs: Vec<(String, String)>) -> Result<RunConfig> {
        for (key, value) in self.pairs() {
            match pairs.iter_mut().find(|(k, _)| k == key) {
                Some(slot) => slot.1 = value,
                None => pairs.push((key.to_string(), value)),
            }
        }
        config_from_pairs(&pairs)
    }
}

impl ConfigSource {
    fn load(&self, overrides: &Overrides) -> Result<RunConfig> {
        let pairs = match (&self.config, &self.preset) {
            (Some(path), _) => parse_key_values(&std::fs::read_to_string(path)?, path)?,
            (None, Some(name)) => {
                let text = preset_text(name)
                    .ok_or_else(|| Error::config("preset", format!("no preset named `{name}`")))?;
                parse_key_values(text, name.as_ref())?
            }
            (None, None) => {
                return Err(Error::config(
                    "config",
                    "pass --config <path> or --preset <name>",
                ))
            }
        };
        overrides.apply(pairs)
    }
}

/// Parses arguments and runs a command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Simulate { source, overrides } => {
            with_config(&source, &overrides, commands::simulate)
        }
        Command::Conserve {
            scheme,
            steps,
            overrides,
        } => commands::conserve(scheme, steps, &overrides),
        Command::Stability {
            tau,
            length,
            points,
            sweep,
        } => commands::stability(tau, length, points, sweep),
        Command::Compare { source, overrides } => {
            with_config(&source, &overrides, commands::compare)
        }
        Command::Bench { configs, repeat } => commands::bench(&configs, repeat),
        Command::Presets { name } => commands::presets(name.as_deref()),
    }
}

fn with_config(
    source: &ConfigSource,
    overrides: &Overrides,
    command: impl FnOnce(&RunConfig) -> i32,
) -> i32 {
    match source.load(overrides) {
        Ok(config) => command(&config),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
