//! Quantum PUF devices.
//!
//! A device hides a Haar-random unitary behind [`QPufDevice::qeval`], which
//! meters every query. Parties only ever see `qeval`; the matrix itself is
//! reachable through [`privileged`], which exists for the simulator's own
//! bookkeeping (computing true responses, fidelity statistics) and is never
//! handed to provers or adversaries.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{
    fidelity, haar_random_state, haar_random_unitary, orthogonal_state, overlap_sq, Dimension, PureState,
    UnitaryMatrix, C64,
};
use crate::seed::{SeedStream, SimRng};
use crate::stats::BinomialEstimate;

/// Transit-window queries granted per qubit when no explicit window is set.
pub const DEFAULT_QUERIES_PER_QUBIT: u64 = 10;

/// Persistable description of a device; the unitary is regenerated from the
/// seed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceDescriptor {
    pub id: String,
    pub n: u32,
    pub seed: u64,
    pub budget: Option<u64>,
}

/// A qPUF: a hidden unitary plus a query ledger.
#[derive(Clone, Debug)]
pub struct QPufDevice {
    id: String,
    seed: SeedStream,
    unitary: UnitaryMatrix,
    query_count: u64,
    query_budget: Option<u64>,
}

/// Generates a device with a fresh Haar-random unitary drawn from `seed`.
pub fn qgen(dim: Dimension, seed: SeedStream) -> QPufDevice {
    QPufDevice::generate(dim, seed)
}

impl QPufDevice {
    pub fn generate(dim: Dimension, seed: SeedStream) -> Self {
        let unitary = haar_random_unitary(dim, &mut seed.rng());
        Self { id: device_id(seed), seed, unitary, query_count: 0, query_budget: None }
    }

    pub fn from_descriptor(desc: &DeviceDescriptor) -> Result<Self> {
        let dim = Dimension::new(desc.n)?;
        let mut device = Self::generate(dim, SeedStream::new(desc.seed));
        if device.id != desc.id {
            return Err(Error::InvalidConfig(format!("descriptor id {} does not match seed {}", desc.id, desc.seed)));
        }
        device.query_budget = desc.budget;
        Ok(device)
    }

    pub fn descriptor(&self) -> DeviceDescriptor {
        DeviceDescriptor {
            id: self.id.clone(),
            n: self.dim().qubits(),
            seed: self.seed.seed(),
            budget: self.query_budget,
        }
    }

    pub fn with_budget(mut self, budget: Option<u64>) -> Self {
        self.query_budget = budget;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> Dimension {
        self.unitary.dim()
    }

    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    pub fn query_budget(&self) -> Option<u64> {
        self.query_budget
    }

    /// Remaining queries before the budget closes, if one is set.
    pub fn remaining(&self) -> Option<u64> {
        self.query_budget.map(|b| b.saturating_sub(self.query_count))
    }

    /// `U |state>`; counts one query and fails closed once the budget is spent.
    pub fn qeval(&mut self, state: &PureState) -> Result<PureState> {
        let out = self.unitary.try_apply(state)?;
        if self.remaining() == Some(0) {
            return Err(Error::BudgetExhausted { used: self.query_count });
        }
        self.query_count += 1;
        Ok(out)
    }

    /// `count` queries with the same state. The outputs are identical, so one
    /// copy is returned; the ledger is charged for all of them.
    pub fn qeval_repeated(&mut self, state: &PureState, count: u32) -> Result<PureState> {
        let out = self.unitary.try_apply(state)?;
        if let Some(rem) = self.remaining() {
            if u64::from(count) > rem {
                return Err(Error::BudgetExhausted { used: self.query_count });
            }
        }
        self.query_count += u64::from(count);
        Ok(out)
    }

    /// Batched `qeval`; all-or-nothing with respect to the budget.
    pub fn qeval_many(&mut self, states: &[PureState]) -> Result<Vec<PureState>> {
        for s in states {
            crate::qstate::check_size(self.unitary.size(), s.size())?;
        }
        if let Some(rem) = self.remaining() {
            if (states.len() as u64) > rem {
                return Err(Error::BudgetExhausted { used: self.query_count });
            }
        }
        self.query_count += states.len() as u64;
        Ok(self.unitary.apply_batch(states))
    }
}

fn device_id(seed: SeedStream) -> String {
    format!("qpuf-{:016x}", seed.child(0x1d).seed())
}

/// Simulator-only access to device internals.
///
/// Nothing here is given to protocol parties; it exists so the harness can
/// compute ground-truth responses and fidelity statistics without touching the
/// query ledger.
pub mod privileged {
    use super::*;

    pub fn unitary(device: &QPufDevice) -> &UnitaryMatrix {
        &device.unitary
    }

    /// Unmetered `U |state>`.
    pub fn true_response(device: &QPufDevice, state: &PureState) -> PureState {
        device.unitary.apply(state)
    }

    /// Unmetered batched evaluation.
    pub fn true_responses(device: &QPufDevice, states: &[PureState]) -> Vec<PureState> {
        device.unitary.apply_batch(states)
    }

    /// A device wrapping an explicit unitary (test fixtures, e.g. identity).
    pub fn from_unitary(id: impl Into<String>, seed: SeedStream, unitary: UnitaryMatrix) -> QPufDevice {
        QPufDevice { id: id.into(), seed, unitary, query_count: 0, query_budget: None }
    }
}

/// Bounded query window granted to whoever holds the device in transit.
pub struct TransitHook<'a> {
    device: &'a mut QPufDevice,
    window: u64,
    used: u64,
}

impl<'a> TransitHook<'a> {
    pub fn new(device: &'a mut QPufDevice, window: u64) -> Self {
        Self { device, window, used: 0 }
    }

    /// Window of `10 n` queries.
    pub fn with_default_window(device: &'a mut QPufDevice) -> Self {
        let window = DEFAULT_QUERIES_PER_QUBIT * u64::from(device.dim().qubits());
        Self::new(device, window)
    }

    pub fn dim(&self) -> Dimension {
        self.device.dim()
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.window - self.used
    }

    pub fn qeval(&mut self, state: &PureState) -> Result<PureState> {
        if self.used >= self.window {
            return Err(Error::BudgetExhausted { used: self.used });
        }
        let out = self.device.qeval(state)?;
        self.used += 1;
        Ok(out)
    }

    pub fn qeval_many(&mut self, states: &[PureState]) -> Result<Vec<PureState>> {
        if states.len() as u64 > self.remaining() {
            return Err(Error::BudgetExhausted { used: self.used });
        }
        let out = self.device.qeval_many(states)?;
        self.used += states.len() as u64;
        Ok(out)
    }
}

/// Outcome of a robustness or collision-resistance certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub trials: usize,
    pub threshold: f64,
    pub min_input_fidelity: f64,
    pub max_input_fidelity: f64,
    pub min_output_fidelity: f64,
    pub max_output_fidelity: f64,
    /// `max |F_out - F_in|` over all sampled pairs.
    pub max_deviation: f64,
    pub pass: bool,
}

/// Checks that `delta_c <= 1 - delta_r`.
pub fn validate_thresholds(delta_r: f64, delta_c: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&delta_r) || !(0.0..=1.0).contains(&delta_c) {
        return Err(Error::InvalidConfig("thresholds must lie in [0, 1]".into()));
    }
    if delta_c > 1.0 - delta_r + 1e-12 {
        return Err(Error::InvalidConfig(format!("delta_c = {delta_c} exceeds 1 - delta_r = {}", 1.0 - delta_r)));
    }
    Ok(())
}

/// Samples input pairs with fidelity in `[delta_r, 1]` and checks the outputs
/// stay `delta_r`-indistinguishable.
pub fn check_robustness(device: &QPufDevice, trials: usize, delta_r: f64, rng: &mut SimRng) -> Result<PropertyReport> {
    if !(0.0..=1.0).contains(&delta_r) {
        return Err(Error::InvalidConfig(format!("delta_r = {delta_r} outside [0, 1]")));
    }
    let pairs = sample_pairs(device.dim(), trials, delta_r, 1.0, rng)?;
    Ok(certify(device, &pairs, delta_r, |f| f >= delta_r - 1e-10))
}

/// Samples input pairs with fidelity in `[0, 1 - delta_c]` and checks the
/// outputs stay `delta_c`-distinguishable.
pub fn check_collision_resistance(
    device: &QPufDevice,
    trials: usize,
    delta_c: f64,
    rng: &mut SimRng,
) -> Result<PropertyReport> {
    if !(0.0..=1.0).contains(&delta_c) {
        return Err(Error::InvalidConfig(format!("delta_c = {delta_c} outside [0, 1]")));
    }
    let pairs = sample_pairs(device.dim(), trials, 0.0, 1.0 - delta_c, rng)?;
    Ok(certify(device, &pairs, delta_c, |f| f <= 1.0 - delta_c + 1e-10))
}

// Pairs (a, F a + sqrt(1 - F^2) a_perp) with F uniform in [lo, hi].
fn sample_pairs(
    dim: Dimension,
    trials: usize,
    lo: f64,
    hi: f64,
    rng: &mut SimRng,
) -> Result<Vec<(PureState, PureState)>> {
    (0..trials)
        .map(|_| {
            let a = haar_random_state(dim, rng);
            let perp = orthogonal_state(&a, rng)?;
            let f = rng.random_range(lo..=hi);
            let g = (1.0 - f * f).max(0.0).sqrt();
            let b: Vec<C64> = a.amplitudes().iter().zip(perp.amplitudes()).map(|(x, y)| x * f + y * g).collect();
            Ok((a, PureState::normalized(b)?))
        })
        .collect()
}

fn certify(
    device: &QPufDevice,
    pairs: &[(PureState, PureState)],
    threshold: f64,
    ok: impl Fn(f64) -> bool,
) -> PropertyReport {
    let mut report = PropertyReport {
        trials: pairs.len(),
        threshold,
        min_input_fidelity: f64::INFINITY,
        max_input_fidelity: f64::NEG_INFINITY,
        min_output_fidelity: f64::INFINITY,
        max_output_fidelity: f64::NEG_INFINITY,
        max_deviation: 0.0,
        pass: true,
    };
    for (a, b) in pairs {
        let f_in = fidelity(a, b).expect("same dimension");
        let (ua, ub) = (device.unitary.apply(a), device.unitary.apply(b));
        let f_out = fidelity(&ua, &ub).expect("same dimension");
        report.min_input_fidelity = report.min_input_fidelity.min(f_in);
        report.max_input_fidelity = report.max_input_fidelity.max(f_in);
        report.min_output_fidelity = report.min_output_fidelity.min(f_out);
        report.max_output_fidelity = report.max_output_fidelity.max(f_out);
        report.max_deviation = report.max_deviation.max((f_out - f_in).abs());
        report.pass &= ok(f_out);
    }
    report
}

/// Produces a candidate response for a challenge after some learning phase.
pub trait Forger {
    fn forge(&self, challenge: &PureState, rng: &mut SimRng) -> PureState;

    /// Number of device queries the forger made while learning.
    fn queries_used(&self) -> usize;

    /// False for baselines outside the polynomially bounded model (e.g. an
    /// adversary holding the device itself).
    fn is_efficient(&self) -> bool {
        true
    }
}

/// An adversary that simply owns the device: the bound does not apply.
pub struct DeviceHolder {
    unitary: UnitaryMatrix,
}

impl DeviceHolder {
    pub fn new(device: &QPufDevice) -> Self {
        Self { unitary: device.unitary.clone() }
    }
}

impl Forger for DeviceHolder {
    fn forge(&self, challenge: &PureState, _rng: &mut SimRng) -> PureState {
        self.unitary.apply(challenge)
    }

    fn queries_used(&self) -> usize {
        0
    }

    fn is_efficient(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnforgeabilityExperimentConfig {
    /// Queries granted to the adversary during transit.
    pub d_learn: usize,
    /// Number of Haar challenges.
    pub trials: usize,
    /// Response-closeness threshold (recorded only).
    pub epsilon: f64,
    /// Challenge-distinctness threshold (recorded only).
    pub mu: f64,
    /// A forgery succeeds when `F^2 >= delta`.
    pub delta: f64,
}

impl UnforgeabilityExperimentConfig {
    pub fn validate(&self, dim: Dimension) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidConfig(format!("delta = {} outside (0, 1]", self.delta)));
        }
        if self.d_learn >= dim.size() {
            return Err(Error::InvalidConfig(format!("d_learn = {} must be below D = {}", self.d_learn, dim.size())));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnforgeabilityReport {
    pub config: UnforgeabilityExperimentConfig,
    pub n: u32,
    pub queries_used: usize,
    pub success: BinomialEstimate,
    pub empirical_success_rate: f64,
    pub mean_fidelity_sq: f64,
    /// Standard error of `mean_fidelity_sq`.
    pub fidelity_sq_std_error: f64,
    /// `(d + 1) / D` with `d` the queries actually made.
    pub bound: f64,
    /// False when the adversary is outside the efficient model.
    pub bound_applies: bool,
    pub fidelities_sq: Vec<f64>,
}

/// Trials are drawn in chunks so the device matrix is streamed once per chunk.
const CHALLENGE_CHUNK: usize = 32;

/// Selective unforgeability game.
///
/// `learn` receives a transit hook with a window of `d_learn` queries and
/// returns the trained forger. Challenges are Haar-random; trial `i` draws
/// from substream `i` of a child of `seed`.
pub fn run_unforgeability_game<F: Forger>(
    device: &mut QPufDevice,
    learn: impl FnOnce(&mut TransitHook<'_>, &mut SimRng) -> Result<F>,
    cfg: &UnforgeabilityExperimentConfig,
    seed: SeedStream,
) -> Result<UnforgeabilityReport> {
    let dim = device.dim();
    cfg.validate(dim)?;
    let forger = {
        let mut hook = TransitHook::new(device, cfg.d_learn as u64);
        learn(&mut hook, &mut seed.child(1).rng())?
    };
    let trial_seed = seed.child(2);
    let mut fidelities_sq = Vec::with_capacity(cfg.trials);
    for start in (0..cfg.trials).step_by(CHALLENGE_CHUNK) {
        let end = (start + CHALLENGE_CHUNK).min(cfg.trials);
        let mut rngs: Vec<SimRng> = (start..end).map(|i| trial_seed.substream(i as u64)).collect();
        let challenges: Vec<PureState> = rngs.iter_mut().map(|r| haar_random_state(dim, r)).collect();
        let truths = privileged::true_responses(device, &challenges);
        for ((c, t), r) in challenges.iter().zip(&truths).zip(rngs.iter_mut()) {
            fidelities_sq.push(overlap_sq(&forger.forge(c, r), t));
        }
    }
    let successes = fidelities_sq.iter().filter(|&&f| f >= cfg.delta).count() as u64;
    let n = fidelities_sq.len() as f64;
    let mean = fidelities_sq.iter().sum::<f64>() / n;
    let var = fidelities_sq.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let success = BinomialEstimate::new(successes, cfg.trials as u64);
    let d = forger.queries_used();
    Ok(UnforgeabilityReport {
        config: cfg.clone(),
        n: dim.qubits(),
        queries_used: d,
        empirical_success_rate: success.rate,
        success,
        mean_fidelity_sq: mean,
        fidelity_sq_std_error: (var / n).sqrt(),
        bound: selective_unforgeability_bound(d, dim),
        bound_applies: forger.is_efficient(),
        fidelities_sq,
    })
}

/// `(d + 1) / D`, capped at 1.
pub fn selective_unforgeability_bound(d: usize, dim: Dimension) -> f64 {
    ((d + 1) as f64 / dim.size() as f64).min(1.0)
}
