use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::Protocol;

/// Resources needed to reach adversarial acceptance `epsilon`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceRow {
    pub protocol: Protocol,
    pub epsilon: f64,
    pub m: u32,
    /// Quantum states the verifier stores.
    pub verifier_memory: u64,
    pub prover_memory: u64,
    /// Gate-count order of the verifier's equality test.
    pub verifier_compute: String,
    pub prover_compute: String,
    pub quantum_rounds: u64,
    pub classical_rounds: u64,
}

// Round-off in log2 must not push an exact integer up a step.
fn ceil(x: f64) -> u64 {
    (x - 1e-9).ceil().max(0.0) as u64
}

/// With `L = log2(1/epsilon)`: hrv-swap stores and sends `L` states;
/// hrv-gswap stores `M L / log2(M+1)` and sends `L / log2(M+1)`; lrv stores
/// and sends `L` plus one classical message. All counts are ceilings.
pub fn resource_table(epsilon: f64, m: u32) -> Result<Vec<ResourceRow>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidConfig(format!("epsilon = {epsilon} outside (0, 1)")));
    }
    if m == 0 {
        return Err(Error::InvalidConfig("M must be at least 1".into()));
    }
    let l = (1.0 / epsilon).log2();
    let per_copy = (f64::from(m) + 1.0).log2();
    let row = |protocol, vm, vc: &str, pc: &str, q, c| ResourceRow {
        protocol,
        epsilon,
        m: if protocol == Protocol::Lrv { 1 } else { m },
        verifier_memory: vm,
        prover_memory: 0,
        verifier_compute: vc.to_string(),
        prover_compute: pc.to_string(),
        quantum_rounds: q,
        classical_rounds: c,
    };
    Ok(vec![
        row(Protocol::HrvSwap, ceil(l), "poly log D", "0", ceil(l), 0),
        row(Protocol::HrvGswap, ceil(f64::from(m) / per_copy * l), "poly log MD", "0", ceil(l / per_copy), 0),
        row(Protocol::Lrv, ceil(l), "0", "poly log D", ceil(l), 1),
    ])
}
