//! Closed-form bounds, exact oracles and sweep tables.
//!
//! Factorials and binomials are evaluated in log-Gamma space so nothing
//! overflows up to `N = 10^4`; the small-`N` oracles use exact rationals or
//! enumeration. Probability-valued formulas that leave `[0, 1]` outside their
//! intended regime are clamped and flagged rather than reported silently.

mod bounds;
mod classical;
mod combinatorics;
mod landscape;
mod oracle;
mod resources;
mod sweep;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use bounds::{cver_completeness_bound, gswap_soundness_bound, swap_soundness_bound};
pub use classical::{
    global_strategy_value, global_success, global_success_closed_form, guess_set_success, independent_success, m_valid,
    IndependentSuccess,
};
pub use combinatorics::{
    binomial, binomial_exact, binomial_ratio_exact, factorial_exact, ln_binomial, ln_binomial_ratio, ln_factorial,
    ln_factorial_real, to_f64, Exact,
};
pub use landscape::{
    avg_success_uniform_p, global_success_p, series_inner_sum, series_inner_sum_exact, series_term, AvgUniformP,
    GlobalSuccessP,
};
pub use oracle::{brute_force_cver, OracleReport, OracleStrategy, ORACLE_MAX_N};
pub use resources::{resource_table, ResourceRow};
pub use sweep::{
    avg_uniform_rows, bounds_rows, epsilon_grid, figure3_rows, figure6_rows, figure7_rows, figure8_rows,
    resources_rows, write_csv, SweepRow,
};

/// SWAP-test value of `kappa`: a trap round reports 1 half of the time.
pub const SWAP_KAPPA: f64 = 0.5;

/// What happened to a formula's raw value on its way to a probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundFlag {
    Ok,
    /// Raw value exceeded 1.
    Clamped,
    /// Raw value fell below 0, so the bound says nothing.
    Vacuous,
    /// A parameter sits on the edge of its domain (e.g. `delta = 1`).
    Degenerate,
}

impl BoundFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundFlag::Ok => "ok",
            BoundFlag::Clamped => "clamped",
            BoundFlag::Vacuous => "vacuous",
            BoundFlag::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for BoundFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A formula evaluation with its inputs echoed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub formula_id: String,
    /// Value clamped to `[0, 1]`.
    pub analytic_value: f64,
    /// Value before clamping.
    pub raw_value: f64,
    pub flag: BoundFlag,
    pub inputs: BTreeMap<String, f64>,
}

impl BoundReport {
    /// Clamps `raw` to `[0, 1]` and flags the direction.
    pub fn probability(formula_id: &str, raw: f64, inputs: &[(&str, f64)]) -> Self {
        let flag = if raw > 1.0 {
            BoundFlag::Clamped
        } else if raw < 0.0 {
            BoundFlag::Vacuous
        } else {
            BoundFlag::Ok
        };
        Self {
            formula_id: formula_id.to_string(),
            analytic_value: raw.clamp(0.0, 1.0),
            raw_value: raw,
            flag,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    fn with_flag(mut self, flag: BoundFlag) -> Self {
        self.flag = flag;
        self
    }
}
