use serde::{Deserialize, Serialize};

use super::classical::m_valid;
use super::combinatorics::binomial_exact;
use super::SWAP_KAPPA;
use crate::error::{Error, Result};
use crate::protocol::{integral, OutcomeString};

/// Enumeration cap: `2^N` strings times `C(N, pN)` placements.
pub const ORACLE_MAX_N: usize = 12;

/// A distribution over outcome strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OracleStrategy {
    /// Each bit is 0 with probability `alpha`.
    Independent { alpha: f64 },
    /// `c1` uniform over `m_valid`, then a uniform string with `c1` ones.
    Global,
    /// A uniform string with exactly `ones` ones.
    FixedWeight { ones: usize },
    /// Uniform over the listed strings.
    UniformOver { strings: Vec<OutcomeString> },
}

/// Exact pass probabilities by enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n: usize,
    pub tau: f64,
    pub p: f64,
    pub kappa: f64,
    pub strategy: OracleStrategy,
    /// `C(N, pN)`.
    pub placements: u64,
    /// Probability the strategy's string passes both tests.
    pub pass_probability: f64,
    /// Probability it passes the valid-round test alone.
    pub test1_probability: f64,
    /// `sum_{c1 in m_valid}` of the pass probability of a uniform
    /// weight-`c1` string.
    pub weight_class_sum: f64,
    /// Best pass probability of any single string.
    pub per_string_optimum: f64,
    /// The string with the smallest bitmask (bit `i` = round `i`) achieving the
    /// optimum.
    pub optimal_string: OutcomeString,
}

fn to_string(mask: u32, n: usize) -> OutcomeString {
    OutcomeString::new((0..n).map(|i| ((mask >> i) & 1) as u8).collect()).expect("bits")
}

fn to_mask(s: &OutcomeString) -> u32 {
    s.bits().iter().enumerate().map(|(i, &b)| u32::from(b) << i).sum()
}

/// Exact pass probability of `strategy` against uniformly placed traps with
/// `kappa = 1/2`, by enumerating all placements and all `2^N` strings.
pub fn brute_force_cver(n: usize, tau: f64, p: f64, strategy: &OracleStrategy) -> Result<OracleReport> {
    if n == 0 || n > ORACLE_MAX_N {
        return Err(Error::TooLarge { n, cap: ORACLE_MAX_N });
    }
    if !(0.0..=1.0).contains(&p) || tau < 0.0 {
        return Err(Error::InvalidConfig(format!("need p in [0, 1] and tau >= 0, got p = {p}, tau = {tau}")));
    }
    let valid_count = integral(p * n as f64, "p * N")?;
    let full: u32 = (1 << n) - 1;
    let placements: Vec<u32> = (0..=full).filter(|m| m.count_ones() as usize == valid_count).collect();
    let target = SWAP_KAPPA * (n - valid_count) as f64;

    // passes[s] and test1[s] count placements
    let mut passes = vec![0u64; 1 << n];
    let mut test1 = vec![0u64; 1 << n];
    for s in 0..=full {
        for &valid in &placements {
            if s & valid != 0 {
                continue;
            }
            test1[s as usize] += 1;
            let trap_ones = (s & !valid & full).count_ones() as f64;
            if (trap_ones - target).abs() <= tau + 1e-9 {
                passes[s as usize] += 1;
            }
        }
    }
    let total = placements.len() as f64;

    let window = m_valid(n, p, tau);
    let weights: Vec<f64> = match strategy {
        OracleStrategy::Independent { alpha } => {
            if !(0.0..=1.0).contains(alpha) {
                return Err(Error::InvalidConfig(format!("alpha = {alpha} outside [0, 1]")));
            }
            (0..=full)
                .map(|s| {
                    let ones = s.count_ones() as i32;
                    alpha.powi(n as i32 - ones) * (1.0 - alpha).powi(ones)
                })
                .collect()
        }
        OracleStrategy::Global => {
            if window.is_empty() {
                return Err(Error::Precondition("a non-empty m_valid".into()));
            }
            let share = 1.0 / window.len() as f64;
            (0..=full)
                .map(|s| {
                    let c = s.count_ones() as usize;
                    if window.contains(&c) {
                        share / binomial_exact(n as u64, c as u64) as f64
                    } else {
                        0.0
                    }
                })
                .collect()
        }
        OracleStrategy::FixedWeight { ones } => {
            if *ones > n {
                return Err(Error::InvalidConfig(format!("{ones} ones in a {n}-bit string")));
            }
            let w = 1.0 / binomial_exact(n as u64, *ones as u64) as f64;
            (0..=full).map(|s| if s.count_ones() as usize == *ones { w } else { 0.0 }).collect()
        }
        OracleStrategy::UniformOver { strings } => {
            if strings.is_empty() || strings.iter().any(|s| s.len() != n) {
                return Err(Error::InvalidConfig(format!("a non-empty list of {n}-bit strings")));
            }
            let mut w = vec![0.0; 1 << n];
            for s in strings {
                w[to_mask(s) as usize] += 1.0 / strings.len() as f64;
            }
            w
        }
    };

    let expect =
        |counts: &[u64]| -> f64 { weights.iter().zip(counts).map(|(w, &c)| w * c as f64).sum::<f64>() / total };
    let weight_class_sum = window
        .iter()
        .map(|&c| {
            let hits: u64 = (0..=full).filter(|s| s.count_ones() as usize == c).map(|s| passes[s as usize]).sum();
            hits as f64 / (binomial_exact(n as u64, c as u64) as f64 * total)
        })
        .sum();
    let (best_mask, best) =
        passes.iter().enumerate().fold((0usize, 0u64), |acc, (s, &c)| if c > acc.1 { (s, c) } else { acc });
    Ok(OracleReport {
        n,
        tau,
        p,
        kappa: SWAP_KAPPA,
        strategy: strategy.clone(),
        placements: placements.len() as u64,
        pass_probability: expect(&passes),
        test1_probability: expect(&test1),
        weight_class_sum,
        per_string_optimum: best as f64 / total,
        optimal_string: to_string(best_mask as u32, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{global_strategy_value, global_success, global_success_p, independent_success};
    use crate::protocol::{cver, TrapPlacement};

    fn s(x: &str) -> OutcomeString {
        OutcomeString::try_from(x.to_string()).unwrap()
    }

    #[test]
    fn bitmask_verdict_matches_cver() {
        let n = 6;
        let placements: Vec<TrapPlacement> = (0u32..64)
            .filter(|m| m.count_ones() == 3)
            .map(|v| TrapPlacement::from_valid(n, &(0..n).filter(|i| v >> i & 1 == 1).collect::<Vec<_>>()).unwrap())
            .collect();
        for tau in [0.0, 1.0, 2.0] {
            for mask in 0u32..64 {
                let st = to_string(mask, n);
                let r =
                    brute_force_cver(n, tau, 0.5, &OracleStrategy::UniformOver { strings: vec![st.clone()] }).unwrap();
                let direct = placements.iter().filter(|p| cver(&st, p, tau, 0.5)).count() as f64 / 20.0;
                assert_eq!(r.pass_probability, direct);
            }
        }
    }

    #[test]
    fn global_spot_values() {
        let r = brute_force_cver(4, 0.0, 0.5, &OracleStrategy::Global).unwrap();
        assert!((r.pass_probability - 0.5).abs() < 1e-15);
        assert!((r.per_string_optimum - 0.5).abs() < 1e-15);
        let r = brute_force_cver(8, 0.0, 0.5, &OracleStrategy::Global).unwrap();
        assert!((r.pass_probability - 3.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn oracle_equals_formulas() {
        for n in [4usize, 8, 12] {
            for tau in [0.0, 1.0] {
                let r = brute_force_cver(n, tau, 0.5, &OracleStrategy::Global).unwrap();
                assert!((r.weight_class_sum - global_success(n, tau).unwrap().raw_value).abs() < 1e-12);
                assert!((r.pass_probability - global_strategy_value(n, tau).unwrap().raw_value).abs() < 1e-12);
                let alpha = 0.75;
                let ind = brute_force_cver(n, tau, 0.5, &OracleStrategy::Independent { alpha }).unwrap();
                let f = independent_success(n, tau, alpha).unwrap().exact.raw_value;
                assert!((ind.pass_probability - f).abs() < 1e-12, "N={n} tau={tau}");
            }
        }
    }

    #[test]
    fn independent_three_quarters_at_four() {
        let r = brute_force_cver(4, 0.0, 0.5, &OracleStrategy::Independent { alpha: 0.75 }).unwrap();
        assert!((r.pass_probability - 27.0 / 128.0).abs() < 1e-15);
    }

    #[test]
    fn strings_outside_window_never_pass() {
        for n in [4usize, 8, 12] {
            for tau in [0.0, 1.0] {
                let window = m_valid(n, 0.5, tau);
                for c in (0..=n).filter(|c| !window.contains(c)) {
                    let r = brute_force_cver(n, tau, 0.5, &OracleStrategy::FixedWeight { ones: c }).unwrap();
                    assert_eq!(r.pass_probability, 0.0, "N={n} tau={tau} c1={c}");
                }
            }
        }
    }

    #[test]
    fn two_round_example() {
        let r =
            brute_force_cver(2, 0.0, 0.5, &OracleStrategy::UniformOver { strings: vec![s("01"), s("10")] }).unwrap();
        assert!((r.test1_probability - 0.5).abs() < 1e-15);
        // kappa * 1 trap = 1/2 is not reachable by an integer count at tau = 0
        assert_eq!(r.pass_probability, 0.0);
        let r =
            brute_force_cver(2, 0.5, 0.5, &OracleStrategy::UniformOver { strings: vec![s("01"), s("10")] }).unwrap();
        assert!((r.pass_probability - 0.5).abs() < 1e-15);
    }

    #[test]
    fn series_terms_match_oracle_on_grid() {
        let n = 4;
        for k in (0..=n).filter(|k| (n - k) % 2 == 0) {
            let p = k as f64 / n as f64;
            let r = brute_force_cver(n, 0.0, p, &OracleStrategy::Global).unwrap();
            assert!((r.pass_probability - global_success_p(n, p).unwrap().conditional).abs() < 1e-15);
            assert!((r.pass_probability - crate::analysis::series_term(n, k)).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(brute_force_cver(13, 0.0, 0.5, &OracleStrategy::Global), Err(Error::TooLarge { .. })));
    }
}
