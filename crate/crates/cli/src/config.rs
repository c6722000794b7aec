//! Command-line and config-file settings. Flags override the config file,
//! which overrides built-in defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use onebit_train::bound::{db_to_power, DEFAULT_GRID_STEP};
use onebit_train::numerics::DEFAULT_ORDER;
use onebit_train::replica::DEFAULT_TOL;
use onebit_train::{OptimizerOptions, ReplicaSettings, TxType};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "onebit-train", version, about = "Training-based rate bounds for one-bit MIMO links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimized bound and its full rate curve for one system.
    Bound(Settings),
    /// Replica and Bussgang bounds with the CSIR rate over an SNR sweep
    /// (Gaussian inputs).
    Compare(Settings),
    /// Data behind figure 1 (SNR sweep), 2 (optimal training) or 3 (bound).
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        #[command(flatten)]
        settings: Settings,
    },
    /// Exact small-system rates next to the direct mutual information.
    Exact(Settings),
    /// Closed-form low-SNR and small-alpha approximations.
    Asymptotics(Settings),
    /// Run the acceptance checks.
    Selftest {
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Receivers per transmitter, N/M.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Block length per transmitter, T/M.
    #[arg(long)]
    pub beta: Option<f64>,
    /// SNR as a power ratio.
    #[arg(long, conflicts_with = "rho_db")]
    pub rho: Option<f64>,
    /// SNR in dB, rho = 10^(dB/10).
    #[arg(long, allow_hyphen_values = true)]
    pub rho_db: Option<f64>,
    /// Transmitter type: linear (Gaussian inputs) or onebit (QPSK).
    #[arg(long)]
    pub tx: Option<TxType>,
    /// Training grid spacing in units of beta (default 0.1).
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Gauss–Hermite order for Gaussian expectations (default 128).
    #[arg(long)]
    pub quad_nodes: Option<usize>,
    /// Fixed-point tolerance (default 1e-10).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Monte Carlo seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Refine the grid optimum by golden-section search.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub refine: Option<bool>,
    /// Transmit antennas of the exact system (default 1).
    #[arg(long)]
    pub m: Option<usize>,
    /// Receive antennas of the exact system (default 1).
    #[arg(long)]
    pub n: Option<usize>,
    /// Block length of the exact system (default 3).
    #[arg(long)]
    pub t: Option<usize>,
    /// Tensor Gauss–Hermite order per real channel dimension (default 24).
    #[arg(long)]
    pub channel_order: Option<usize>,
    /// Use Monte Carlo channel averaging with this many samples.
    #[arg(long)]
    pub mc_samples: Option<usize>,
    /// First SNR of a sweep in dB (default -10).
    #[arg(long, allow_hyphen_values = true)]
    pub rho_db_start: Option<f64>,
    /// Last SNR of a sweep in dB (default 20).
    #[arg(long, allow_hyphen_values = true)]
    pub rho_db_stop: Option<f64>,
    /// SNR sweep step in dB (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub rho_db_step: Option<f64>,
    /// Largest alpha of the figure 2 and 3 sweeps (default 256).
    #[arg(long)]
    pub alpha_max: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format (default csv).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// TOML file with any of the settings above, keys in snake_case.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Settings {
    /// Merges the config file (if any) under the command-line values.
    pub fn resolve(self) -> Result<Self, CliError> {
        let base = match &self.config {
            Some(path) => load(path)?,
            None => Settings::default(),
        };
        let merged = self.over(base);
        if merged.rho.is_some() && merged.rho_db.is_some() {
            return Err(CliError::Usage("give exactly one of rho and rho_db".into()));
        }
        Ok(merged)
    }

    fn over(self, base: Settings) -> Settings {
        let (rho, rho_db) = if self.rho.is_some() || self.rho_db.is_some() {
            (self.rho, self.rho_db)
        } else {
            (base.rho, base.rho_db)
        };
        Settings {
            alpha: self.alpha.or(base.alpha),
            beta: self.beta.or(base.beta),
            rho,
            rho_db,
            tx: self.tx.or(base.tx),
            grid_step: self.grid_step.or(base.grid_step),
            quad_nodes: self.quad_nodes.or(base.quad_nodes),
            tol: self.tol.or(base.tol),
            seed: self.seed.or(base.seed),
            refine: self.refine.or(base.refine),
            m: self.m.or(base.m),
            n: self.n.or(base.n),
            t: self.t.or(base.t),
            channel_order: self.channel_order.or(base.channel_order),
            mc_samples: self.mc_samples.or(base.mc_samples),
            rho_db_start: self.rho_db_start.or(base.rho_db_start),
            rho_db_stop: self.rho_db_stop.or(base.rho_db_stop),
            rho_db_step: self.rho_db_step.or(base.rho_db_step),
            alpha_max: self.alpha_max.or(base.alpha_max),
            threads: self.threads.or(base.threads),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            config: self.config,
        }
    }

    /// SNR as a power ratio, if given either way.
    pub fn rho(&self) -> Option<f64> {
        self.rho.or(self.rho_db.map(db_to_power))
    }

    pub fn require_rho(&self) -> Result<f64, CliError> {
        self.rho().ok_or_else(|| CliError::Usage("missing --rho or --rho-db".into()))
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    pub fn replica(&self) -> Result<ReplicaSettings<f64>, CliError> {
        let opts = OptimizerOptions {
            grid_step: self.grid_step.unwrap_or(DEFAULT_GRID_STEP),
            refine: self.refine.unwrap_or(false),
        };
        Ok(ReplicaSettings::new(
            self.quad_nodes.unwrap_or(DEFAULT_ORDER),
            self.tol.unwrap_or(DEFAULT_TOL),
            opts,
        )?)
    }
}

/// A required numeric setting.
pub fn require(value: Option<f64>, flag: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

fn load(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}
