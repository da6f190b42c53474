use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qpuf::DEFAULT_QUERIES_PER_QUBIT;
use crate::qstate::Dimension;

/// Which identification protocol to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// High-resource verifier, repeated SWAP tests.
    HrvSwap,
    /// High-resource verifier, one GSWAP test per challenge.
    HrvGswap,
    /// Low-resource verifier with trap states and classical verdict.
    Lrv,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::HrvSwap, Protocol::HrvGswap, Protocol::Lrv];

    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::HrvSwap => "hrv-swap",
            Protocol::HrvGswap => "hrv-gswap",
            Protocol::Lrv => "lrv",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown protocol {s:?}")))
    }
}

/// Exact probabilities or single-shot sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Verdicts from exact acceptance probabilities; no sampling.
    Exact,
    /// Every test is a Bernoulli draw.
    Sampled,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "sampled" => Ok(Mode::Sampled),
            _ => Err(Error::InvalidConfig(format!("unknown mode {s:?}"))),
        }
    }
}

/// Parameters shared by all protocol variants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Qubit count.
    pub n: u32,
    /// Database size.
    #[serde(rename = "K")]
    pub k: usize,
    /// Distinct challenges per run.
    #[serde(rename = "N")]
    pub rounds: usize,
    /// Response copies per challenge.
    #[serde(rename = "M")]
    pub copies: u32,
    /// Absolute count tolerance of the trap test.
    pub tau: f64,
    /// Expected mismatch rate on trap rounds.
    pub kappa: f64,
    /// Fraction of rounds that carry the valid response.
    pub p: f64,
    pub mode: Mode,
    pub seed: u64,
    /// Optional cap on the owner's device ledger.
    #[serde(default)]
    pub device_budget: Option<u64>,
    /// Queries granted to an adversary while the device is in transit;
    /// `10 n` when absent.
    #[serde(default)]
    pub transit_window: Option<u64>,
    /// Enforce `K <= n^3`.
    #[serde(default = "yes")]
    pub enforce_k_bound: bool,
}

fn yes() -> bool {
    true
}

impl ProtocolConfig {
    /// Small defaults: `n = 4, K = 16, N = 8, tau = N/4, kappa = p = 1/2`,
    /// `M = 4` for the high-resource variants and `1` for lrv.
    pub fn defaults(protocol: Protocol) -> Self {
        Self {
            n: 4,
            k: 16,
            rounds: 8,
            copies: if protocol == Protocol::Lrv { 1 } else { 4 },
            tau: 2.0,
            kappa: 0.5,
            p: 0.5,
            mode: Mode::Sampled,
            seed: 0,
            device_budget: None,
            transit_window: None,
            enforce_k_bound: true,
        }
    }

    pub fn dim(&self) -> Result<Dimension> {
        Dimension::new(self.n)
    }

    pub fn transit_window(&self) -> u64 {
        self.transit_window.unwrap_or(DEFAULT_QUERIES_PER_QUBIT * u64::from(self.n))
    }

    /// Number of rounds with the valid response (`|P| = pN`).
    pub fn valid_rounds(&self) -> Result<usize> {
        integral(self.p * self.rounds as f64, "p * N")
    }

    pub fn validate(&self, protocol: Protocol) -> Result<()> {
        self.dim()?;
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("N must be positive".into()));
        }
        if self.rounds > self.k {
            return Err(Error::InvalidConfig(format!("N = {} exceeds K = {}", self.rounds, self.k)));
        }
        let cap = (self.n as usize).pow(3);
        if self.enforce_k_bound && self.k > cap {
            return Err(Error::InvalidConfig(format!("K = {} exceeds n^3 = {cap}", self.k)));
        }
        if self.copies == 0 {
            return Err(Error::InvalidConfig("M must be at least 1".into()));
        }
        if protocol == Protocol::Lrv {
            if !self.rounds.is_multiple_of(2) {
                return Err(Error::InvalidConfig(format!("N = {} must be even", self.rounds)));
            }
            if !(0.0..=1.0).contains(&self.p) {
                return Err(Error::InvalidConfig(format!("p = {} outside [0, 1]", self.p)));
            }
            self.valid_rounds()?;
            if self.p == 0.5 && !self.rounds.is_multiple_of(4) {
                return Err(Error::InvalidConfig(format!("N = {} must be divisible by 4 when p = 1/2", self.rounds)));
            }
            if !(0.0..=1.0).contains(&self.kappa) {
                return Err(Error::InvalidConfig(format!("kappa = {} outside [0, 1]", self.kappa)));
            }
            if self.tau.is_nan() || self.tau < 0.0 {
                return Err(Error::InvalidConfig(format!("tau = {} must be non-negative", self.tau)));
            }
        }
        Ok(())
    }
}

pub(crate) fn integral(x: f64, what: &str) -> Result<usize> {
    let r = x.round();
    if (x - r).abs() > 1e-9 || r < 0.0 {
        return Err(Error::InvalidConfig(format!("{what} = {x} is not a non-negative integer")));
    }
    Ok(r as usize)
}
