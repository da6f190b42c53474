use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::m_valid;
use crate::error::{Error, Result};
use crate::protocol::{LrvProver, LrvRound, OutcomeString};
use crate::seed::SimRng;

/// A string-guessing strategy that ignores the quantum states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClassicalStrategy {
    /// Each bit is 0 with probability `alpha`.
    Independent { alpha: f64 },
    /// A uniform string whose one-count is uniform over `m_valid`.
    Global,
}

impl ClassicalStrategy {
    pub fn validate(&self) -> Result<()> {
        match self {
            ClassicalStrategy::Independent { alpha } if !(0.0..=1.0).contains(alpha) => {
                Err(Error::InvalidConfig(format!("alpha = {alpha} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

/// `n` independent bits, each 0 with probability `alpha`.
pub fn independent_guess_string<R: Rng + ?Sized>(n: usize, alpha: f64, rng: &mut R) -> Result<OutcomeString> {
    ClassicalStrategy::Independent { alpha }.validate()?;
    OutcomeString::new((0..n).map(|_| u8::from(!rng.random_bool(alpha))).collect())
}

/// Draws `c1` uniformly from `m_valid(n, p, tau)` and places `c1` ones
/// uniformly.
pub fn global_strategy_string<R: Rng + ?Sized>(n: usize, p: f64, tau: f64, rng: &mut R) -> Result<OutcomeString> {
    let window = m_valid(n, p, tau);
    if window.is_empty() {
        return Err(Error::Precondition(format!("a non-empty m_valid for N = {n}, p = {p}, tau = {tau}")));
    }
    let c1 = window[rng.random_range(0..window.len())];
    let mut bits = vec![0u8; n];
    for i in sample(rng, n, c1) {
        bits[i] = 1;
    }
    OutcomeString::new(bits)
}

/// An lrv prover that answers with a guessed string. `assumed_p` and
/// `assumed_tau` are the adversary's beliefs about the verifier.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalProver {
    pub strategy: ClassicalStrategy,
    pub assumed_p: f64,
    pub assumed_tau: f64,
}

impl LrvProver for ClassicalProver {
    fn respond(&mut self, rounds: &[LrvRound], rng: &mut SimRng) -> Result<OutcomeString> {
        match self.strategy {
            ClassicalStrategy::Independent { alpha } => independent_guess_string(rounds.len(), alpha, rng),
            ClassicalStrategy::Global => global_strategy_string(rounds.len(), self.assumed_p, self.assumed_tau, rng),
        }
    }

    fn zero_probabilities(&mut self, rounds: &[LrvRound]) -> Result<Option<Vec<f64>>> {
        Ok(match self.strategy {
            ClassicalStrategy::Independent { alpha } => Some(vec![alpha; rounds.len()]),
            ClassicalStrategy::Global => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{brute_force_cver, OracleStrategy};
    use crate::protocol::{cver, place_traps};
    use crate::seed::SeedStream;
    use crate::stats::binomial_sigma;

    fn pass_rate(
        trials: u64,
        seed: u64,
        mut draw: impl FnMut(&mut SimRng) -> OutcomeString,
        n: usize,
        tau: f64,
    ) -> f64 {
        let mut rng = SeedStream::new(seed).rng();
        let mut hits = 0u64;
        for _ in 0..trials {
            let s = draw(&mut rng);
            let pl = place_traps(n, 0.5, &mut rng).unwrap();
            hits += u64::from(cver(&s, &pl, tau, 0.5));
        }
        hits as f64 / trials as f64
    }

    #[test]
    fn extremes() {
        let mut rng = SeedStream::new(1).rng();
        assert_eq!(independent_guess_string(8, 1.0, &mut rng).unwrap(), OutcomeString::zeros(8));
        assert_eq!(independent_guess_string(8, 0.0, &mut rng).unwrap().ones(), 8);
        assert!(independent_guess_string(8, 1.5, &mut rng).is_err());
        for _ in 0..20 {
            assert_eq!(global_strategy_string(4, 0.5, 0.0, &mut rng).unwrap().ones(), 1);
        }
        assert!(global_strategy_string(2, 0.5, 0.0, &mut rng).is_err());
    }

    #[test]
    fn independent_rate_matches_oracle() {
        let trials = 200_000;
        let rate = pass_rate(trials, 2, |r| independent_guess_string(4, 0.75, r).unwrap(), 4, 0.0);
        let exact =
            brute_force_cver(4, 0.0, 0.5, &OracleStrategy::Independent { alpha: 0.75 }).unwrap().pass_probability;
        assert!((rate - exact).abs() < 4.0 * binomial_sigma(exact, trials), "{rate} vs {exact}");
    }

    #[test]
    fn global_rates_match_oracle() {
        let trials = 200_000;
        for (n, expected) in [(4, 0.5), (8, 3.0 / 14.0)] {
            let rate = pass_rate(trials, 3, |r| global_strategy_string(n, 0.5, 0.0, r).unwrap(), n, 0.0);
            assert!((rate - expected).abs() < 4.0 * binomial_sigma(expected, trials), "N={n}: {rate}");
        }
    }

    #[test]
    fn global_beats_independent_empirically() {
        let trials = 100_000;
        for (n, tau) in [(4, 0.0), (8, 0.0), (8, 1.0), (12, 1.0)] {
            let g = pass_rate(trials, 4, |r| global_strategy_string(n, 0.5, tau, r).unwrap(), n, tau);
            let i = pass_rate(trials, 5, |r| independent_guess_string(n, 0.75, r).unwrap(), n, tau);
            assert!(g > i, "N={n} tau={tau}: {g} vs {i}");
        }
    }
}
