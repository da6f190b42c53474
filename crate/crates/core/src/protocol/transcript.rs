use serde::{Deserialize, Serialize};

use super::config::{Protocol, ProtocolConfig};
use super::cver::{CverReport, OutcomeString, TrapPlacement};
use crate::equality::TestOutcome;
use crate::qpuf::DeviceDescriptor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Verifier,
    Prover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Quantum,
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    Challenge,
    Response,
    /// Challenge together with the valid or trap response.
    ChallengeWithReference,
    OutcomeString,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub seq: usize,
    pub from: Party,
    pub to: Party,
    pub channel: Channel,
    pub kind: MessageKind,
    pub round: Option<usize>,
    pub record: Option<usize>,
}

/// One equality test (high-resource variants) or one outcome bit (lrv).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    /// Database record used.
    pub record: usize,
    /// Repetition index within the record (SWAP variant).
    pub repetition: u32,
    /// lrv only: 1 when the valid response was sent.
    pub b: Option<u8>,
    /// High-resource variants: `F^2` between the received and stored state.
    pub fidelity_sq: Option<f64>,
    /// Probability that the round accepts (hrv) or reports 0 (lrv), when known.
    pub accept_probability: Option<f64>,
    /// Sampled outcome; absent in exact mode.
    pub outcome: Option<TestOutcome>,
}

/// Query and copy accounting for one run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledger {
    pub setup_queries: u64,
    pub transit_queries: u64,
    pub prover_queries: u64,
    /// Stored copies drawn from the verifier's database.
    pub copies_consumed: u64,
    pub quantum_messages: usize,
    pub classical_messages: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub protocol: Protocol,
    pub config: ProtocolConfig,
    /// Seed of this run.
    pub seed: u64,
    pub device: DeviceDescriptor,
    pub ledger: Ledger,
    pub messages: Vec<Message>,
}

impl Transcript {
    pub(crate) fn push(
        &mut self,
        from: Party,
        channel: Channel,
        kind: MessageKind,
        round: Option<usize>,
        record: Option<usize>,
    ) {
        let to = match from {
            Party::Verifier => Party::Prover,
            Party::Prover => Party::Verifier,
        };
        match channel {
            Channel::Quantum => self.ledger.quantum_messages += 1,
            Channel::Classical => self.ledger.classical_messages += 1,
        }
        self.messages.push(Message { seq: self.messages.len(), from, to, channel, kind, round, record });
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub accepted: bool,
    /// Exact acceptance probability, when the mode and prover allow it.
    pub accept_probability: Option<f64>,
    pub per_round: Vec<RoundRecord>,
    pub placement: Option<TrapPlacement>,
    pub outcome_string: Option<OutcomeString>,
    pub cver: Option<CverReport>,
    pub transcript: Transcript,
}
