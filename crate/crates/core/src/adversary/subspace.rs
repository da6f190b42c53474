use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{HrvProver, ResponseState};
use crate::qpuf::{Forger, TransitHook};
use crate::qstate::{
    check_size, haar_random_state, orthonormalize_paired, Dimension, PureState, SubspaceBasis, RANK_TOL,
};
use crate::seed::SimRng;

/// How the adversary picks its transit queries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryChoice {
    #[default]
    Haar,
    /// Computational basis states `|0>, |1>, ...`.
    Structured,
}

/// How the learned map is extended to a new challenge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForgeStrategy {
    /// `normalize(V Pi c)`, or a Haar state in the unlearned output
    /// complement when that has the larger expected overlap. For a Haar
    /// challenge this gives `F^2 = ||Pi c||^2`, mean `d / D`.
    #[default]
    BayesOptimal,
    /// `normalize(V Pi c + sqrt(1 - ||Pi c||^2) r)` with `r` Haar in the
    /// unlearned output complement. Mean `F^2` is close to `(d / D)^2`.
    Mixed,
}

/// What an adversary knows after querying the device during transit.
///
/// The `i`-th learned input basis vector maps to the `i`-th learned output
/// basis vector; together they define the partial isometry `V` that the
/// device induces on the learned input span.
#[derive(Clone, Debug)]
pub struct SubspaceAdversary {
    learned_in: SubspaceBasis,
    learned_out: SubspaceBasis,
    queries: usize,
    strategy: ForgeStrategy,
}

impl SubspaceAdversary {
    /// An adversary that learned nothing.
    pub fn blind(dim: Dimension) -> Self {
        Self {
            learned_in: SubspaceBasis::empty(dim),
            learned_out: SubspaceBasis::empty(dim),
            queries: 0,
            strategy: ForgeStrategy::default(),
        }
    }

    pub fn with_strategy(mut self, strategy: ForgeStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn strategy(&self) -> ForgeStrategy {
        self.strategy
    }

    pub fn dim(&self) -> Dimension {
        self.learned_in.ambient()
    }

    /// Learned dimension `d`.
    pub fn d(&self) -> usize {
        self.learned_in.d()
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn learned_in(&self) -> &SubspaceBasis {
        &self.learned_in
    }

    pub fn learned_out(&self) -> &SubspaceBasis {
        &self.learned_out
    }

    /// `||Pi c||^2`: how much of `challenge` lies in the learned span.
    pub fn overlap(&self, challenge: &PureState) -> f64 {
        self.learned_in.coefficients(challenge).iter().map(|c| c.norm_sqr()).sum::<f64>().min(1.0)
    }

    /// Best guess at the device's response to `challenge`.
    pub fn emulation_forge<R: Rng + ?Sized>(&self, challenge: &PureState, rng: &mut R) -> Result<PureState> {
        let dim = self.dim();
        check_size(dim.size(), challenge.size())?;
        let d = self.d();
        if d == 0 {
            return Ok(haar_random_state(dim, rng));
        }
        let coeffs = self.learned_in.coefficients(challenge);
        let w = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().min(1.0);
        let mut mapped = self.learned_out.combine(&coeffs);
        if d >= dim.size() {
            return PureState::normalized(mapped);
        }
        match self.strategy {
            ForgeStrategy::BayesOptimal => {
                let complement_guess = (1.0 - w) / (dim.size() - d) as f64;
                if w.sqrt() < RANK_TOL || w < complement_guess {
                    self.learned_out.complement_haar_state(rng)
                } else {
                    PureState::normalized(mapped)
                }
            }
            ForgeStrategy::Mixed => {
                let r = self.learned_out.complement_haar_state(rng)?;
                let s = (1.0 - w).max(0.0).sqrt();
                for (m, a) in mapped.iter_mut().zip(r.amplitudes()) {
                    *m += s * a;
                }
                PureState::normalized(mapped)
            }
        }
    }
}

/// Queries `k` challenges through the transit hook and orthonormalizes the
/// pairs.
pub fn learn_subspace<R: Rng + ?Sized>(
    hook: &mut TransitHook<'_>,
    k: usize,
    choice: QueryChoice,
    rng: &mut R,
) -> Result<SubspaceAdversary> {
    let dim = hook.dim();
    if k as u64 > hook.remaining() {
        return Err(Error::BudgetExhausted { used: hook.used() });
    }
    if k == 0 {
        return Ok(SubspaceAdversary::blind(dim));
    }
    let challenges: Vec<PureState> = (0..k)
        .map(|i| match choice {
            QueryChoice::Haar => haar_random_state(dim, rng),
            QueryChoice::Structured => PureState::basis(dim, i % dim.size()),
        })
        .collect();
    let responses = hook.qeval_many(&challenges)?;
    let (learned_in, learned_out) = orthonormalize_paired(&challenges, &responses)?;
    Ok(SubspaceAdversary { learned_in, learned_out, queries: k, strategy: ForgeStrategy::default() })
}

impl Forger for SubspaceAdversary {
    fn forge(&self, challenge: &PureState, rng: &mut SimRng) -> PureState {
        self.emulation_forge(challenge, rng).expect("challenge lives in the learned device's space")
    }

    fn queries_used(&self) -> usize {
        self.queries
    }
}

impl HrvProver for SubspaceAdversary {
    fn respond(&mut self, challenge: &PureState, rng: &mut SimRng) -> Result<ResponseState> {
        Ok(self.emulation_forge(challenge, rng)?.into())
    }
}

/// Answers every challenge with a fresh Haar state.
#[derive(Clone, Copy, Debug, Default)]
pub struct HaarResponder;

impl HrvProver for HaarResponder {
    fn respond(&mut self, challenge: &PureState, rng: &mut SimRng) -> Result<ResponseState> {
        Ok(haar_random_state(challenge.dim(), rng).into())
    }
}
