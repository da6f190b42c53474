//! Adversaries against the identification protocols.
//!
//! Classical guessers submit lrv strings without touching the quantum
//! states. Quantum adversaries query the device during transit, learn the
//! induced isometry on the span of their queries, and either forge hrv
//! responses or test lrv references against their own forgeries to tell
//! valid rounds from traps.

mod classical;
mod game;
mod subspace;
mod trap;

pub use classical::{global_strategy_string, independent_guess_string, ClassicalProver, ClassicalStrategy};
pub use game::{analytic_value, run_attack_game, AttackGameRecord, Attacker, TrialRecord};
pub use subspace::{learn_subspace, ForgeStrategy, HaarResponder, QueryChoice, SubspaceAdversary};
pub use trap::{
    attack_string, run_trap_experiment, trap_distinguish, trap_distinguish_rounds, AttackMode, DecisionRule,
    QuantumTrapAttacker, TrapExperimentConfig, TrapExperimentReport, TrapGuess,
};
