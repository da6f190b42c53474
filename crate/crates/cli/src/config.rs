//! Protocol configuration from defaults, a TOML file and flags.

use std::path::{Path, PathBuf};

use clap::Args;
use qpuf_core::protocol::{Mode, Protocol, ProtocolConfig};

use crate::CliError;

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "QPUF_SEED";

/// Flags that override the configuration file. A file must contain every
/// required field; without one the defaults of the protocol are used.
#[derive(Args, Clone, Debug, Default)]
pub struct ConfigArgs {
    /// TOML file with a complete protocol configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Qubits per state.
    #[arg(long = "n")]
    pub qubits: Option<u32>,
    /// Database size.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Challenges per run.
    #[arg(long = "N")]
    pub rounds: Option<usize>,
    /// Response copies per challenge.
    #[arg(long = "M")]
    pub copies: Option<u32>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    /// Root seed; falls back to the file, then to QPUF_SEED, then to 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Transit query window granted to adversaries.
    #[arg(long)]
    pub transit_window: Option<u64>,
    /// Lift the `K <= n^3` cap.
    #[arg(long)]
    pub no_k_bound: bool,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: qpuf_core::Error| e.to_string())
}

pub fn read_config_file(path: &Path) -> Result<ProtocolConfig, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{SEED_ENV} = {v:?} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

impl ConfigArgs {
    /// Flags over file over defaults. With `lrv`, an `N` given without `tau`
    /// moves the default `tau` to `N/4`.
    pub fn resolve(&self, protocol: Protocol) -> Result<ProtocolConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => read_config_file(path)?,
            None => {
                let mut c = ProtocolConfig::defaults(protocol);
                if let Some(s) = env_seed()? {
                    c.seed = s;
                }
                if let Some(n) = self.rounds {
                    c.tau = n as f64 / 4.0;
                }
                c
            }
        };
        macro_rules! set {
            ($flag:ident => $field:ident) => {
                if let Some(v) = self.$flag {
                    cfg.$field = v;
                }
            };
        }
        set!(qubits => n);
        set!(k => k);
        set!(rounds => rounds);
        set!(copies => copies);
        set!(tau => tau);
        set!(kappa => kappa);
        set!(p => p);
        set!(mode => mode);
        set!(seed => seed);
        if self.transit_window.is_some() {
            cfg.transit_window = self.transit_window;
        }
        if self.no_k_bound {
            cfg.enforce_k_bound = false;
        }
        if self.config.is_none() && self.k.is_none() && cfg.enforce_k_bound {
            // grow the database to fit N, within n^3
            cfg.k = cfg.k.max(cfg.rounds).min((cfg.n as usize).pow(3).max(cfg.rounds));
        }
        cfg.validate(protocol).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}
