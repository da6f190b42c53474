use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::integral;
use crate::error::{Error, Result};

/// Round markings: `b = 1` rounds carry the valid response, `b = 0` a trap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapPlacement {
    marks: Vec<u8>,
    valid: Vec<usize>,
}

impl TrapPlacement {
    pub fn from_marks(marks: Vec<u8>) -> Result<Self> {
        if marks.iter().any(|&b| b > 1) {
            return Err(Error::Precondition("marks must be bits".into()));
        }
        let valid = marks.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i).collect();
        Ok(Self { marks, valid })
    }

    /// Placement with `b = 1` exactly at `valid` (0-based).
    pub fn from_valid(len: usize, valid: &[usize]) -> Result<Self> {
        let mut marks = vec![0u8; len];
        for &i in valid {
            if i >= len {
                return Err(Error::Precondition(format!("index {i} out of range for N = {len}")));
            }
            marks[i] = 1;
        }
        Self::from_marks(marks)
    }

    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }

    pub fn marks(&self) -> &[u8] {
        &self.marks
    }

    /// Indices with `b = 1` (the set `P`), ascending.
    pub fn valid(&self) -> &[usize] {
        &self.valid
    }

    pub fn is_valid_round(&self, i: usize) -> bool {
        self.marks[i] == 1
    }

    pub fn trap_count(&self) -> usize {
        self.marks.len() - self.valid.len()
    }
}

/// Marks `pN` rounds uniformly at random as `b = 1`.
pub fn place_traps<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<TrapPlacement> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!("p = {p} outside [0, 1]")));
    }
    let valid_count = integral(p * n as f64, "p * N")?;
    let mut valid: Vec<usize> = sample(rng, n, valid_count).into_vec();
    valid.sort_unstable();
    TrapPlacement::from_valid(n, &valid)
}

/// The prover's `N`-bit answer.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct OutcomeString {
    bits: Vec<u8>,
}

impl OutcomeString {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Precondition("outcome string must contain bits".into()));
        }
        Ok(Self { bits })
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![0; n] }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}

impl fmt::Display for OutcomeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for OutcomeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OutcomeString({self})")
    }
}

impl From<OutcomeString> for String {
    fn from(s: OutcomeString) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for OutcomeString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Precondition(format!("invalid bit {c:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { bits })
    }
}

/// Breakdown of a classical verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CverReport {
    /// Every valid round reported 0.
    pub test1: bool,
    /// One-bits among trap rounds.
    pub trap_ones: usize,
    /// `kappa * (number of trap rounds)`.
    pub target: f64,
    pub test2: bool,
    pub accepted: bool,
}

/// Classical verdict over the outcome string.
///
/// Passes iff every `b = 1` round reported 0 and the number of one-bits among
/// trap rounds is within `tau` of `kappa` times the trap count.
///
/// # Panics
/// If the string and placement lengths differ.
pub fn cver(s: &OutcomeString, placement: &TrapPlacement, tau: f64, kappa: f64) -> bool {
    cver_report(s, placement, tau, kappa).accepted
}

pub fn cver_report(s: &OutcomeString, placement: &TrapPlacement, tau: f64, kappa: f64) -> CverReport {
    assert_eq!(s.len(), placement.len(), "outcome string and placement lengths differ");
    let test1 = placement.valid().iter().all(|&i| s.bits[i] == 0);
    let trap_ones = s.bits.iter().zip(placement.marks()).filter(|(&bit, &b)| b == 0 && bit == 1).count();
    let target = kappa * placement.trap_count() as f64;
    let test2 = test1 && count_within(trap_ones, target, tau);
    CverReport { test1, trap_ones, target, test2, accepted: test2 }
}

/// `|count - target| <= tau`, with slack for round-off in `target`.
pub fn count_within(count: usize, target: f64, tau: f64) -> bool {
    (count as f64 - target).abs() <= tau + 1e-9
}

/// Exact acceptance probability when round `i` independently reports 1 with
/// probability `one_probs[i]`.
pub fn cver_accept_probability(one_probs: &[f64], placement: &TrapPlacement, tau: f64, kappa: f64) -> f64 {
    assert_eq!(one_probs.len(), placement.len(), "one probability per round");
    let test1: f64 = placement.valid().iter().map(|&i| 1.0 - one_probs[i]).product();
    let trap_probs: Vec<f64> =
        (0..placement.len()).filter(|&i| !placement.is_valid_round(i)).map(|i| one_probs[i]).collect();
    let dist = poisson_binomial(&trap_probs);
    let target = kappa * trap_probs.len() as f64;
    let test2: f64 = dist.iter().enumerate().filter(|(c, _)| count_within(*c, target, tau)).map(|(_, p)| p).sum();
    (test1 * test2).clamp(0.0, 1.0)
}

/// Distribution of the number of successes among independent Bernoullis.
pub fn poisson_binomial(probs: &[f64]) -> Vec<f64> {
    let mut dist = vec![1.0];
    for &q in probs {
        let mut next = vec![0.0; dist.len() + 1];
        for (c, &p) in dist.iter().enumerate() {
            next[c] += p * (1.0 - q);
            next[c + 1] += p * q;
        }
        dist = next;
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::SeedStream;
    use crate::stats::chi_square_pvalue;
    use proptest::prelude::*;

    fn s(bits: &str) -> OutcomeString {
        OutcomeString::try_from(bits.to_string()).unwrap()
    }

    #[test]
    fn algorithm_trace() {
        // P = {1, 3} in 1-based numbering
        let placement = TrapPlacement::from_valid(4, &[0, 2]).unwrap();
        assert!(cver(&s("0100"), &placement, 0.0, 0.5));
        assert!(!cver(&s("1000"), &placement, 0.0, 0.5));
        assert!(!cver(&s("0000"), &placement, 0.0, 0.5));
        let r = cver_report(&s("0000"), &placement, 0.0, 0.5);
        assert!(r.test1 && !r.test2);
    }

    #[test]
    fn placement_uniformity() {
        let mut rng = SeedStream::new(1).rng();
        let subsets: Vec<Vec<usize>> = vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]];
        let mut counts = [0u64; 6];
        let draws = 100_000;
        for _ in 0..draws {
            let pl = place_traps(4, 0.5, &mut rng).unwrap();
            let idx = subsets.iter().position(|v| v.as_slice() == pl.valid()).unwrap();
            counts[idx] += 1;
        }
        let expected = [draws as f64 / 6.0; 6];
        assert!(chi_square_pvalue(&counts, &expected) > 0.001, "{counts:?}");
    }

    #[test]
    fn placement_extremes() {
        let mut rng = SeedStream::new(2).rng();
        assert_eq!(place_traps(6, 1.0, &mut rng).unwrap().marks(), &[1; 6]);
        assert_eq!(place_traps(6, 0.0, &mut rng).unwrap().marks(), &[0; 6]);
        assert!(place_traps(6, 0.25, &mut rng).is_err());
    }

    #[test]
    fn exact_probability_spot_values() {
        let placement = TrapPlacement::from_valid(4, &[0, 2]).unwrap();
        // honest: valid rounds never 1, traps fair coins
        let honest = [0.0, 0.5, 0.0, 0.5];
        assert!((cver_accept_probability(&honest, &placement, 0.0, 0.5) - 0.5).abs() < 1e-15);
        assert!((cver_accept_probability(&honest, &placement, 1.0, 0.5) - 1.0).abs() < 1e-15);
        assert_eq!(cver_accept_probability(&[1.0, 0.5, 0.0, 0.5], &placement, 1.0, 0.5), 0.0);
    }

    #[test]
    fn outcome_string_serde() {
        let x = s("0110");
        assert_eq!(serde_json::to_string(&x).unwrap(), "\"0110\"");
        assert_eq!(x.ones(), 2);
        assert!(serde_json::from_str::<OutcomeString>("\"012\"").is_err());
    }

    proptest! {
        #[test]
        fn cver_is_deterministic(bits in proptest::collection::vec(0u8..2, 8), seed in any::<u64>(), tau in 0u32..3) {
            let pl = place_traps(8, 0.5, &mut SeedStream::new(seed).rng()).unwrap();
            let st = OutcomeString::new(bits).unwrap();
            prop_assert_eq!(cver(&st, &pl, tau as f64, 0.5), cver(&st, &pl, tau as f64, 0.5));
        }

        #[test]
        fn exact_probability_matches_enumeration(
            probs in proptest::collection::vec(0.0f64..=1.0, 6),
            seed in any::<u64>(),
            tau in 0u32..3,
        ) {
            let pl = place_traps(6, 0.5, &mut SeedStream::new(seed).rng()).unwrap();
            let mut brute = 0.0;
            for mask in 0u32..64 {
                let bits: Vec<u8> = (0..6).map(|i| ((mask >> i) & 1) as u8).collect();
                let w: f64 = bits.iter().zip(&probs).map(|(&b, &q)| if b == 1 { q } else { 1.0 - q }).product();
                if cver(&OutcomeString::new(bits).unwrap(), &pl, tau as f64, 0.5) {
                    brute += w;
                }
            }
            let fast = cver_accept_probability(&probs, &pl, tau as f64, 0.5);
            prop_assert!((brute - fast).abs() < 1e-12);
        }
    }
}
