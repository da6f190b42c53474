use crate::equality::{accept_probability, sample_outcome, TestKind};
use crate::error::Result;
use crate::qpuf::QPufDevice;
use crate::qstate::{DensityMatrix, PureState, StateRef};
use crate::seed::SimRng;

use super::cver::OutcomeString;

/// A state returned to the verifier; adversaries may answer with mixtures.
#[derive(Clone, Debug, PartialEq)]
pub enum ResponseState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl ResponseState {
    pub fn as_state_ref(&self) -> StateRef<'_> {
        match self {
            ResponseState::Pure(p) => StateRef::Pure(p),
            ResponseState::Mixed(m) => StateRef::Mixed(m),
        }
    }
}

impl From<PureState> for ResponseState {
    fn from(p: PureState) -> Self {
        ResponseState::Pure(p)
    }
}

/// Prover side of the high-resource protocols: one response per challenge
/// message.
pub trait HrvProver {
    fn respond(&mut self, challenge: &PureState, rng: &mut SimRng) -> Result<ResponseState>;

    /// Device queries made so far.
    fn queries(&self) -> u64 {
        0
    }
}

/// One lrv round as seen by the prover.
#[derive(Clone, Debug)]
pub struct LrvRound {
    pub challenge: PureState,
    /// Valid response or trap; the prover is not told which.
    pub reference: PureState,
}

/// Prover side of lrv: all rounds in, one classical string out.
pub trait LrvProver {
    fn respond(&mut self, rounds: &[LrvRound], rng: &mut SimRng) -> Result<OutcomeString>;

    /// `P[s_i = 0]` per round when the rounds are answered independently.
    /// Needed for exact mode; `None` when the prover has no such form.
    fn zero_probabilities(&mut self, rounds: &[LrvRound]) -> Result<Option<Vec<f64>>> {
        let _ = rounds;
        Ok(None)
    }

    fn queries(&self) -> u64 {
        0
    }
}

/// The legitimate device holder.
pub struct HonestProver<'a> {
    device: &'a mut QPufDevice,
    queries: u64,
}

impl<'a> HonestProver<'a> {
    pub fn new(device: &'a mut QPufDevice) -> Self {
        Self { device, queries: 0 }
    }

    fn eval(&mut self, challenge: &PureState) -> Result<PureState> {
        let out = self.device.qeval(challenge)?;
        self.queries += 1;
        Ok(out)
    }
}

impl HrvProver for HonestProver<'_> {
    fn respond(&mut self, challenge: &PureState, _rng: &mut SimRng) -> Result<ResponseState> {
        Ok(self.eval(challenge)?.into())
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}

impl LrvProver for HonestProver<'_> {
    fn respond(&mut self, rounds: &[LrvRound], rng: &mut SimRng) -> Result<OutcomeString> {
        let mut bits = Vec::with_capacity(rounds.len());
        for r in rounds {
            let mine = self.eval(&r.challenge)?;
            bits.push(sample_outcome(TestKind::Swap, &mine, &r.reference, rng)?.outcome_bit);
        }
        OutcomeString::new(bits)
    }

    fn zero_probabilities(&mut self, rounds: &[LrvRound]) -> Result<Option<Vec<f64>>> {
        let mut probs = Vec::with_capacity(rounds.len());
        for r in rounds {
            let mine = self.eval(&r.challenge)?;
            probs.push(accept_probability(TestKind::Swap, &mine, &r.reference)?);
        }
        Ok(Some(probs))
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}
