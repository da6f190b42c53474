use std::io::Write;

use serde::{Deserialize, Serialize};

use super::bounds::{cver_completeness_bound, gswap_soundness_bound, swap_soundness_bound};
use super::classical::{
    global_strategy_value, global_success, global_success_closed_form, guess_set_success, independent_success,
};
use super::landscape::{avg_success_uniform_p, global_success_p};
use super::resources::resource_table;
use super::{BoundFlag, BoundReport};
use crate::error::Result;

/// One CSV row. Unused parameters are left empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub tau: Option<f64>,
    pub p: Option<f64>,
    #[serde(rename = "M")]
    pub m: Option<u32>,
    pub epsilon: Option<f64>,
    pub formula_id: String,
    pub value: f64,
    pub flag: BoundFlag,
}

impl SweepRow {
    fn new(formula_id: impl Into<String>, value: f64) -> Self {
        Self {
            n: None,
            tau: None,
            p: None,
            m: None,
            epsilon: None,
            formula_id: formula_id.into(),
            value,
            flag: BoundFlag::Ok,
        }
    }

    fn from_report(r: &BoundReport) -> Self {
        Self { flag: r.flag, ..Self::new(r.formula_id.clone(), r.analytic_value) }
    }

    fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    fn tau(mut self, tau: f64) -> Self {
        self.tau = Some(tau);
        self
    }

    fn p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    fn m(mut self, m: u32) -> Self {
        self.m = Some(m);
        self
    }

    fn epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }
}

/// Independent (at `alpha = 3/4`) versus global guessing for
/// `N = 4, 8, ..., n_max`.
pub fn figure3_rows(tau: f64, n_max: usize) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for n in (4..=n_max).step_by(4) {
        let ind = independent_success(n, tau, 0.75)?;
        let reports = [
            ind.exact,
            ind.approximation,
            global_success(n, tau)?,
            global_strategy_value(n, tau)?,
            global_success_closed_form(n, tau)?,
        ];
        for r in &reports {
            rows.push(SweepRow::from_report(r).n(n).tau(tau).p(0.5));
        }
        rows.push(SweepRow::new("guess_set", guess_set_success(n)?).n(n).tau(tau).p(0.5));
    }
    Ok(rows)
}

/// Global-strategy pass probability over every admissible `p` for each `N`.
pub fn figure6_rows(ns: &[usize]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for z in 0..=n / 2 {
            let p = (n - 2 * z) as f64 / n as f64;
            let g = global_success_p(n, p)?;
            rows.push(SweepRow::new("global_p_conditional", g.conditional).n(n).p(p));
            rows.push(SweepRow::new("global_p_gamma", g.gamma_route).n(n).p(p));
            rows.push(SweepRow::new("global_p_hidden", g.hidden_p).n(n).p(p));
        }
    }
    Ok(rows)
}

/// `points` values of epsilon spaced evenly in log from `1e-6` to `1e-1`.
pub fn epsilon_grid(points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points).map(|i| 10f64.powf(-6.0 + 5.0 * i as f64 / (points - 1) as f64)).collect()
}

fn table_rows(epsilon: f64, m: u32, with_compute: bool) -> Result<Vec<SweepRow>> {
    let d = 1.0 / epsilon;
    let mut rows = Vec::new();
    for r in resource_table(epsilon, m)? {
        let id = |col: &str| format!("{}:{col}", r.protocol);
        let at = |row: SweepRow| row.m(r.m).epsilon(epsilon);
        rows.push(at(SweepRow::new(id("verifier_memory"), r.verifier_memory as f64)));
        rows.push(at(SweepRow::new(id("prover_memory"), r.prover_memory as f64)));
        rows.push(at(SweepRow::new(id("quantum_rounds"), r.quantum_rounds as f64)));
        rows.push(at(SweepRow::new(id("classical_rounds"), r.classical_rounds as f64)));
        if with_compute {
            // poly log D taken as log2 D with D = 1/epsilon
            let log_d = |s: &str| match s {
                "poly log D" => d.log2(),
                "poly log MD" => (f64::from(r.m) * d).log2(),
                _ => 0.0,
            };
            rows.push(at(SweepRow::new(id("verifier_compute_log2"), log_d(&r.verifier_compute))));
            rows.push(at(SweepRow::new(id("prover_compute_log2"), log_d(&r.prover_compute))));
        }
    }
    Ok(rows)
}

/// Resource table rows at one `(epsilon, M)`.
pub fn resources_rows(epsilon: f64, m: u32) -> Result<Vec<SweepRow>> {
    table_rows(epsilon, m, false)
}

/// Resources versus epsilon with `D = 1/epsilon` for the compute columns.
pub fn figure7_rows(epsilons: &[f64], m: u32) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &e in epsilons {
        rows.extend(table_rows(e, m, true)?);
    }
    Ok(rows)
}

/// SWAP versus GSWAP security, communication and memory on an `(M, N)` grid.
pub fn figure8_rows(m_max: u32, n_max: usize) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for m in 1..=m_max {
        for n in 1..=n_max {
            let at = |row: SweepRow| row.n(n).m(m);
            rows.push(at(SweepRow::from_report(&swap_soundness_bound(n, m, 0.0)?)));
            rows.push(at(SweepRow::from_report(&gswap_soundness_bound(n, m, 0.0)?)));
            let nm = (n as u64 * u64::from(m)) as f64;
            rows.push(at(SweepRow::new("hrv-swap:quantum_rounds", nm)));
            rows.push(at(SweepRow::new("hrv-gswap:quantum_rounds", n as f64)));
            rows.push(at(SweepRow::new("hrv-swap:verifier_memory", nm)));
            rows.push(at(SweepRow::new("hrv-gswap:verifier_memory", nm)));
        }
    }
    Ok(rows)
}

/// Uniform-`p` averages for each `N`.
pub fn avg_uniform_rows(ns: &[usize]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        let a = avg_success_uniform_p(n)?;
        rows.push(SweepRow::new("series_inner_sum", a.series_sum).n(n));
        rows.push(SweepRow::new("avg_uniform_series", a.series).n(n));
        rows.push(SweepRow::new("avg_uniform_integral", a.integral).n(n));
        rows.push(SweepRow::new("avg_uniform_asymptote", a.asymptote).n(n));
        rows.push(SweepRow::new("avg_uniform_discrete", a.discrete_uniform).n(n));
    }
    Ok(rows)
}

/// Soundness and completeness bounds at one parameter point.
pub fn bounds_rows(n: usize, m: u32, tau: f64, delta: f64) -> Result<Vec<SweepRow>> {
    Ok(vec![
        SweepRow::from_report(&swap_soundness_bound(n, m, delta)?).n(n).m(m),
        SweepRow::from_report(&gswap_soundness_bound(n, m, delta)?).n(n).m(m),
        SweepRow::from_report(&cver_completeness_bound(n, tau)?).n(n).tau(tau),
    ])
}

/// Writes rows with a header line.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
