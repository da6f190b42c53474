use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classical::{ClassicalProver, ClassicalStrategy};
use super::subspace::{learn_subspace, ForgeStrategy, HaarResponder, QueryChoice};
use super::trap::{AttackMode, DecisionRule, QuantumTrapAttacker};
use crate::analysis::{
    brute_force_cver, cver_completeness_bound, global_strategy_value, gswap_soundness_bound, independent_success,
    swap_soundness_bound, BoundReport, OracleStrategy, ORACLE_MAX_N, SWAP_KAPPA,
};
use crate::equality::TestKind;
use crate::error::{Error, Result};
use crate::protocol::{
    hrv_run, lrv_run, setup, trial_seed, HonestProver, Protocol, ProtocolConfig, VerificationResult,
};
use crate::stats::BinomialEstimate;

/// The prover side of an attack game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Attacker {
    Honest,
    /// Answers hrv challenges with Haar states.
    HaarResponder,
    ClassicalIndependent {
        alpha: f64,
    },
    ClassicalGlobal,
    /// Learns `learn` pairs in transit, then forges hrv responses.
    SubspaceForger {
        learn: usize,
        #[serde(default)]
        query_choice: QueryChoice,
        #[serde(default)]
        strategy: ForgeStrategy,
    },
    /// Learns `learn` pairs in transit, then guesses lrv marks.
    QuantumCollective {
        learn: usize,
        #[serde(default)]
        query_choice: QueryChoice,
        test: TestKind,
        #[serde(default)]
        rule: DecisionRule,
        #[serde(default)]
        mode: AttackMode,
    },
}

impl Attacker {
    pub fn name(&self) -> &'static str {
        match self {
            Attacker::Honest => "honest",
            Attacker::HaarResponder => "haar-responder",
            Attacker::ClassicalIndependent { .. } => "classical-independent",
            Attacker::ClassicalGlobal => "classical-global",
            Attacker::SubspaceForger { .. } => "subspace-forger",
            Attacker::QuantumCollective { .. } => "quantum-collective",
        }
    }

    pub fn supports(&self, protocol: Protocol) -> bool {
        let lrv = protocol == Protocol::Lrv;
        match self {
            Attacker::Honest => true,
            Attacker::HaarResponder | Attacker::SubspaceForger { .. } => !lrv,
            _ => lrv,
        }
    }
}

/// Summary of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub accepted: bool,
    /// Exact acceptance probability reported by the verifier.
    pub accept_probability: Option<f64>,
    /// Product of the per-round acceptance probabilities (hrv).
    pub model_probability: Option<f64>,
    pub mean_fidelity_sq: Option<f64>,
    pub max_fidelity_sq: Option<f64>,
    /// Rounds whose mark the attacker guessed correctly.
    pub marks_guessed: Option<usize>,
    /// Ones in the submitted string (lrv, sampled).
    pub ones: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackGameRecord {
    pub protocol: Protocol,
    pub attacker: Attacker,
    pub config: ProtocolConfig,
    pub seed: u64,
    pub trials: u64,
    /// Accepted runs.
    pub estimate: BinomialEstimate,
    /// Mean over trials of the model probability, when every trial has one.
    pub expected_rate: Option<f64>,
    /// Closed-form value for this attacker and configuration, when known.
    pub bound: Option<BoundReport>,
    pub mean_fidelity_sq: Option<f64>,
    /// The hrv soundness bound with `delta` set to the observed mean `F^2`.
    /// The `delta = 0` form in `bound` is the large-`D` limit.
    pub bound_at_mean_fidelity: Option<BoundReport>,
    /// Per-round mark-guessing accuracy (quantum-collective).
    pub guess_accuracy: Option<BinomialEstimate>,
    /// Empty unless requested.
    pub per_trial: Vec<TrialRecord>,
}

/// Plays `trials` independent games: each trial runs a fresh setup from
/// `trial_seed(seed, i)`, lets the attacker learn during transit when it
/// wants to, and runs one verification. Trials run in parallel and are
/// reported in index order.
pub fn run_attack_game(
    protocol: Protocol,
    attacker: &Attacker,
    cfg: &ProtocolConfig,
    trials: u64,
    seed: u64,
    record_trials: bool,
) -> Result<AttackGameRecord> {
    if !attacker.supports(protocol) {
        return Err(Error::InvalidConfig(format!("attacker {} cannot play {protocol}", attacker.name())));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be positive".into()));
    }
    cfg.validate(protocol)?;
    let records: Vec<TrialRecord> =
        (0..trials).into_par_iter().map(|i| run_trial(protocol, attacker, cfg, seed, i)).collect::<Result<_>>()?;

    let accepted = records.iter().filter(|r| r.accepted).count() as u64;
    let expected_rate = records
        .iter()
        .map(|r| r.model_probability.or(r.accept_probability))
        .collect::<Option<Vec<f64>>>()
        .map(|v| v.iter().sum::<f64>() / v.len() as f64);
    let mean_fidelity_sq = records
        .iter()
        .map(|r| r.mean_fidelity_sq)
        .collect::<Option<Vec<f64>>>()
        .map(|v| v.iter().sum::<f64>() / v.len() as f64);
    let guess_accuracy = records
        .iter()
        .map(|r| r.marks_guessed)
        .collect::<Option<Vec<usize>>>()
        .map(|v| BinomialEstimate::new(v.iter().sum::<usize>() as u64, trials * cfg.rounds as u64));
    let bound_at_mean_fidelity = match (protocol, mean_fidelity_sq) {
        (Protocol::HrvSwap, Some(f)) => Some(swap_soundness_bound(cfg.rounds, cfg.copies, f.min(1.0))?),
        (Protocol::HrvGswap, Some(f)) => Some(gswap_soundness_bound(cfg.rounds, cfg.copies, f.min(1.0))?),
        _ => None,
    };
    Ok(AttackGameRecord {
        protocol,
        attacker: attacker.clone(),
        config: cfg.clone(),
        seed,
        trials,
        estimate: BinomialEstimate::new(accepted, trials),
        expected_rate,
        bound: analytic_value(protocol, attacker, cfg)?,
        mean_fidelity_sq,
        bound_at_mean_fidelity,
        guess_accuracy,
        per_trial: if record_trials { records } else { Vec::new() },
    })
}

fn run_trial(
    protocol: Protocol,
    attacker: &Attacker,
    cfg: &ProtocolConfig,
    root: u64,
    index: u64,
) -> Result<TrialRecord> {
    let seed = trial_seed(root, index);
    let mut s = setup(protocol, cfg, seed)?;
    let mut rng = s.verifier.run_rng();
    let mut learn_rng = seed.child(4).rng();
    let mut guesses = None;
    let result = match attacker {
        Attacker::Honest => {
            let mut prover = HonestProver::new(&mut s.device);
            match protocol {
                Protocol::Lrv => lrv_run(&mut s.verifier, &mut prover, &mut rng)?,
                _ => hrv_run(&mut s.verifier, protocol, &mut prover, &mut rng)?,
            }
        }
        Attacker::HaarResponder => hrv_run(&mut s.verifier, protocol, &mut HaarResponder, &mut rng)?,
        Attacker::ClassicalIndependent { alpha } => {
            let strategy = ClassicalStrategy::Independent { alpha: *alpha };
            strategy.validate()?;
            let mut prover = ClassicalProver { strategy, assumed_p: cfg.p, assumed_tau: cfg.tau };
            lrv_run(&mut s.verifier, &mut prover, &mut rng)?
        }
        Attacker::ClassicalGlobal => {
            let mut prover =
                ClassicalProver { strategy: ClassicalStrategy::Global, assumed_p: cfg.p, assumed_tau: cfg.tau };
            lrv_run(&mut s.verifier, &mut prover, &mut rng)?
        }
        Attacker::SubspaceForger { learn, query_choice, strategy } => {
            let mut adv =
                s.transit(|hook| learn_subspace(hook, *learn, *query_choice, &mut learn_rng))?.with_strategy(*strategy);
            hrv_run(&mut s.verifier, protocol, &mut adv, &mut rng)?
        }
        Attacker::QuantumCollective { learn, query_choice, test, rule, mode } => {
            let adv = s.transit(|hook| learn_subspace(hook, *learn, *query_choice, &mut learn_rng))?;
            let mut prover = QuantumTrapAttacker::new(adv, *test, *rule, *mode);
            let r = lrv_run(&mut s.verifier, &mut prover, &mut rng)?;
            guesses = Some(prover.last_guesses.iter().map(|g| g.guessed_b).collect::<Vec<u8>>());
            r
        }
    };
    Ok(summarize(index, protocol, &result, guesses.as_deref()))
}

fn summarize(index: u64, protocol: Protocol, r: &VerificationResult, guesses: Option<&[u8]>) -> TrialRecord {
    let fidelities: Vec<f64> = r.per_round.iter().filter_map(|x| x.fidelity_sq).collect();
    let (mean_f, max_f) = if fidelities.is_empty() {
        (None, None)
    } else {
        let mean = fidelities.iter().sum::<f64>() / fidelities.len() as f64;
        (Some(mean), Some(fidelities.iter().copied().fold(0.0, f64::max)))
    };
    let model_probability = if protocol == Protocol::Lrv {
        None
    } else {
        r.per_round.iter().map(|x| x.accept_probability).product::<Option<f64>>()
    };
    let marks_guessed = match (guesses, &r.placement) {
        (Some(g), Some(p)) if !g.is_empty() => Some(g.iter().zip(p.marks()).filter(|(a, b)| a == b).count()),
        _ => None,
    };
    TrialRecord {
        index,
        accepted: r.accepted,
        accept_probability: r.accept_probability,
        model_probability,
        mean_fidelity_sq: mean_f,
        max_fidelity_sq: max_f,
        marks_guessed,
        ones: r.outcome_string.as_ref().map(|s| s.ones()),
    }
}

/// Closed-form reference for an attacker: completeness for the honest
/// prover, the soundness bound at `delta = 0` for a Haar responder, and the
/// exact pass probability for the classical guessers.
pub fn analytic_value(protocol: Protocol, attacker: &Attacker, cfg: &ProtocolConfig) -> Result<Option<BoundReport>> {
    let n = cfg.rounds;
    let standard_lrv = protocol == Protocol::Lrv && cfg.kappa == SWAP_KAPPA;
    let oracle = |strategy: OracleStrategy, id: &str| -> Result<Option<BoundReport>> {
        if !standard_lrv || n > ORACLE_MAX_N {
            return Ok(None);
        }
        let r = brute_force_cver(n, cfg.tau, cfg.p, &strategy)?;
        Ok(Some(BoundReport::probability(id, r.pass_probability, &[("N", n as f64), ("tau", cfg.tau), ("p", cfg.p)])))
    };
    match attacker {
        Attacker::Honest if protocol == Protocol::Lrv => Ok(Some(cver_completeness_bound(n, cfg.tau)?)),
        Attacker::Honest => Ok(Some(BoundReport::probability("hrv_completeness", 1.0, &[]))),
        Attacker::HaarResponder if protocol == Protocol::HrvSwap => Ok(Some(swap_soundness_bound(n, cfg.copies, 0.0)?)),
        Attacker::HaarResponder => Ok(Some(gswap_soundness_bound(n, cfg.copies, 0.0)?)),
        Attacker::ClassicalIndependent { alpha } => {
            if standard_lrv && cfg.p == 0.5 && n.is_multiple_of(4) {
                Ok(Some(independent_success(n, cfg.tau, *alpha)?.exact))
            } else {
                oracle(OracleStrategy::Independent { alpha: *alpha }, "independent_oracle")
            }
        }
        Attacker::ClassicalGlobal => {
            if standard_lrv && cfg.p == 0.5 && n.is_multiple_of(2) {
                Ok(Some(global_strategy_value(n, cfg.tau)?))
            } else {
                oracle(OracleStrategy::Global, "global_oracle")
            }
        }
        Attacker::SubspaceForger { .. } | Attacker::QuantumCollective { .. } => Ok(None),
    }
}
