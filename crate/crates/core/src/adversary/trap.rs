use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::subspace::{learn_subspace, QueryChoice, SubspaceAdversary};
use crate::equality::{sample_with_probability, TestKind, TestOutcome};
use crate::error::{Error, Result};
use crate::protocol::{place_traps, LrvProver, LrvRound, OutcomeString};
use crate::qpuf::{privileged, QPufDevice, TransitHook};
use crate::qstate::{haar_random_state, orthogonal_state, overlap_sq, DensityMatrix, PureState};
use crate::seed::{SeedStream, SimRng};
use crate::stats::BinomialEstimate;

/// How a test outcome becomes a guess of `b` (1 = valid response).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum DecisionRule {
    /// Guess valid iff the test accepts.
    #[default]
    AcceptMeansValid,
    AlwaysValid,
    CoinFlip,
    /// Trust the test only when the challenge overlaps the learned span by at
    /// least `min_overlap`; otherwise flip a coin.
    Threshold {
        min_overlap: f64,
    },
}

/// Whether rounds are attacked one by one or as a block.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackMode {
    #[default]
    Collective,
    /// Joint processing of all rounds. Rounds are product states with
    /// independent marks, so the per-round rule is applied to each factor.
    Coherent,
}

/// One distinguishing attempt.
#[derive(Clone, Debug, PartialEq)]
pub struct TrapGuess {
    pub guessed_b: u8,
    pub test_outcome: TestOutcome,
    pub accept_probability: f64,
    /// Probability, over the test and any coin, of guessing `b = 1`.
    pub guess_valid_probability: f64,
    /// The adversary's forged reference.
    pub reference: PureState,
}

impl TrapGuess {
    /// The forged reference as a density matrix.
    pub fn reference_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.reference)
    }

    /// Probability that the guess equals `b`.
    pub fn correct_probability(&self, b: u8) -> f64 {
        if b == 1 {
            self.guess_valid_probability
        } else {
            1.0 - self.guess_valid_probability
        }
    }
}

/// Guesses whether `unknown` is the device's response to `challenge` by
/// testing it against the adversary's own forgery.
pub fn trap_distinguish<R: Rng + ?Sized>(
    adversary: &SubspaceAdversary,
    challenge: &PureState,
    unknown: &PureState,
    test: TestKind,
    rule: DecisionRule,
    rng: &mut R,
) -> Result<TrapGuess> {
    test.validate()?;
    let reference = adversary.emulation_forge(challenge, rng)?;
    let a = test.accept_from_fidelity_sq(overlap_sq(&reference, unknown));
    let test_outcome = sample_with_probability(a, rng);
    let trust = match rule {
        DecisionRule::Threshold { min_overlap } => adversary.overlap(challenge) >= min_overlap,
        _ => true,
    };
    let (guessed_b, guess_valid_probability) = match rule {
        DecisionRule::AlwaysValid => (1, 1.0),
        DecisionRule::CoinFlip => (u8::from(rng.random_bool(0.5)), 0.5),
        DecisionRule::AcceptMeansValid | DecisionRule::Threshold { .. } if trust => (u8::from(test_outcome.accept), a),
        _ => (u8::from(rng.random_bool(0.5)), 0.5),
    };
    Ok(TrapGuess { guessed_b, test_outcome, accept_probability: a, guess_valid_probability, reference })
}

/// Runs [`trap_distinguish`] on every round.
pub fn trap_distinguish_rounds<R: Rng + ?Sized>(
    adversary: &SubspaceAdversary,
    rounds: &[LrvRound],
    test: TestKind,
    rule: DecisionRule,
    mode: AttackMode,
    rng: &mut R,
) -> Result<Vec<TrapGuess>> {
    // both modes factor over rounds; see AttackMode::Coherent
    let _ = mode;
    rounds.iter().map(|r| trap_distinguish(adversary, &r.challenge, &r.reference, test, rule, rng)).collect()
}

/// The lrv string an adversary submits after guessing the marks: 0 on
/// guessed-valid rounds, and `min(N/4, guessed traps)` ones spread at random
/// over the guessed traps.
pub fn attack_string<R: Rng + ?Sized>(guesses: &[u8], rng: &mut R) -> Result<OutcomeString> {
    let n = guesses.len();
    let traps: Vec<usize> = (0..n).filter(|&i| guesses[i] == 0).collect();
    let ones = (n / 4).min(traps.len());
    let mut bits = vec![0u8; n];
    for j in sample(rng, traps.len(), ones) {
        bits[traps[j]] = 1;
    }
    OutcomeString::new(bits)
}

/// An lrv prover that learned part of the device in transit and tries to
/// tell valid rounds from traps.
#[derive(Clone, Debug)]
pub struct QuantumTrapAttacker {
    pub adversary: SubspaceAdversary,
    pub test: TestKind,
    pub rule: DecisionRule,
    pub mode: AttackMode,
    /// Guesses from the last call to `respond`.
    pub last_guesses: Vec<TrapGuess>,
}

impl QuantumTrapAttacker {
    pub fn new(adversary: SubspaceAdversary, test: TestKind, rule: DecisionRule, mode: AttackMode) -> Self {
        Self { adversary, test, rule, mode, last_guesses: Vec::new() }
    }
}

impl LrvProver for QuantumTrapAttacker {
    fn respond(&mut self, rounds: &[LrvRound], rng: &mut SimRng) -> Result<OutcomeString> {
        self.last_guesses = trap_distinguish_rounds(&self.adversary, rounds, self.test, self.rule, self.mode, rng)?;
        let bits: Vec<u8> = self.last_guesses.iter().map(|g| g.guessed_b).collect();
        attack_string(&bits, rng)
    }
}

/// Parameters of the stand-alone distinguishing experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapExperimentConfig {
    /// Transit queries used for learning.
    pub learn: usize,
    pub query_choice: QueryChoice,
    /// Total rounds.
    pub rounds: usize,
    /// Rounds per lrv batch; marks are placed per batch with `p * batch`
    /// valid rounds.
    pub batch: usize,
    pub p: f64,
    pub test: TestKind,
    pub rule: DecisionRule,
    pub mode: AttackMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapExperimentReport {
    pub config: TrapExperimentConfig,
    pub n: u32,
    pub learned_dimension: usize,
    /// Per-round guess accuracy.
    pub accuracy: BinomialEstimate,
    /// Mean over rounds of the exact probability of a correct guess.
    pub mean_correct_probability: f64,
    /// Batches in which every mark was guessed.
    pub joint: BinomialEstimate,
    /// Per-round guess accuracy on valid (`b = 1`) rounds.
    pub valid_accuracy: f64,
    /// Per-round guess accuracy on trap (`b = 0`) rounds.
    pub trap_accuracy: f64,
    /// Joint rate if rounds are independent: the mean over batches of the
    /// product of the per-class accuracies of its rounds.
    pub predicted_joint: f64,
    /// Mean over batches of the product of the exact per-round probabilities
    /// of a correct guess.
    pub predicted_joint_exact: f64,
}

/// Trials are drawn in chunks so the device matrix is streamed once per chunk.
const ROUND_CHUNK: usize = 32;

/// Learns once from `device`, then guesses the marks of `rounds` fresh
/// rounds. Round `i` draws from substream `i` of a child of `seed`; the
/// unknown state is computed with privileged access.
pub fn run_trap_experiment(
    device: &mut QPufDevice,
    cfg: &TrapExperimentConfig,
    seed: SeedStream,
) -> Result<TrapExperimentReport> {
    if cfg.batch == 0 || !cfg.rounds.is_multiple_of(cfg.batch) {
        return Err(Error::InvalidConfig(format!(
            "rounds = {} must be a positive multiple of batch = {}",
            cfg.rounds, cfg.batch
        )));
    }
    let dim = device.dim();
    let adversary = {
        let mut hook = TransitHook::new(device, cfg.learn as u64);
        learn_subspace(&mut hook, cfg.learn, cfg.query_choice, &mut seed.child(1).rng())?
    };
    let mark_seed = seed.child(2);
    let marks: Vec<u8> = (0..cfg.rounds / cfg.batch)
        .map(|b| place_traps(cfg.batch, cfg.p, &mut mark_seed.substream(b as u64)).map(|p| p.marks().to_vec()))
        .collect::<Result<Vec<_>>>()?
        .concat();
    let round_seed = seed.child(3);
    let mut correct = Vec::with_capacity(cfg.rounds);
    let mut correct_prob = Vec::with_capacity(cfg.rounds);
    for start in (0..cfg.rounds).step_by(ROUND_CHUNK) {
        let end = (start + ROUND_CHUNK).min(cfg.rounds);
        let mut rngs: Vec<SimRng> = (start..end).map(|i| round_seed.substream(i as u64)).collect();
        let mut inputs = Vec::with_capacity(end - start);
        let mut challenges = Vec::with_capacity(end - start);
        for (i, r) in (start..end).zip(rngs.iter_mut()) {
            let c = haar_random_state(dim, r);
            inputs.push(if marks[i] == 1 { c.clone() } else { orthogonal_state(&c, r)? });
            challenges.push(c);
        }
        let unknowns = privileged::true_responses(device, &inputs);
        for (k, r) in rngs.iter_mut().enumerate() {
            let rounds = [LrvRound { challenge: challenges[k].clone(), reference: unknowns[k].clone() }];
            let g = trap_distinguish_rounds(&adversary, &rounds, cfg.test, cfg.rule, cfg.mode, r)?.remove(0);
            let b = marks[start + k];
            correct.push(g.guessed_b == b);
            correct_prob.push(g.correct_probability(b));
        }
    }
    let hits = correct.iter().filter(|&&c| c).count() as u64;
    let class_accuracy = |b: u8| {
        let (n, k) = marks
            .iter()
            .zip(&correct)
            .filter(|(&m, _)| m == b)
            .fold((0u64, 0u64), |(n, k), (_, &c)| (n + 1, k + u64::from(c)));
        if n == 0 {
            0.0
        } else {
            k as f64 / n as f64
        }
    };
    let (valid_accuracy, trap_accuracy) = (class_accuracy(1), class_accuracy(0));
    let batches = (cfg.rounds / cfg.batch) as f64;
    let predicted_joint = marks
        .chunks(cfg.batch)
        .map(|m| m.iter().map(|&b| if b == 1 { valid_accuracy } else { trap_accuracy }).product::<f64>())
        .sum::<f64>()
        / batches;
    let predicted_joint_exact =
        correct_prob.chunks(cfg.batch).map(|c| c.iter().product::<f64>()).sum::<f64>() / batches;
    let joint_hits = correct.chunks(cfg.batch).filter(|c| c.iter().all(|&x| x)).count() as u64;
    let accuracy = BinomialEstimate::new(hits, cfg.rounds as u64);
    let mean_correct_probability = correct_prob.iter().sum::<f64>() / cfg.rounds as f64;
    Ok(TrapExperimentReport {
        config: cfg.clone(),
        n: dim.qubits(),
        learned_dimension: adversary.d(),
        valid_accuracy,
        trap_accuracy,
        predicted_joint,
        predicted_joint_exact,
        accuracy,
        mean_correct_probability,
        joint: BinomialEstimate::new(joint_hits, (cfg.rounds / cfg.batch) as u64),
    })
}
