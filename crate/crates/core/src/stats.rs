//! Binomial confidence intervals and goodness-of-fit p-values.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

/// Default two-sided confidence level for reported intervals.
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Empirical success rate with an exact (Clopper-Pearson) interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinomialEstimate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    /// One-sided upper bound at `confidence`; the meaningful number when no
    /// successes are observed.
    pub upper_one_sided: f64,
}

impl BinomialEstimate {
    pub fn new(successes: u64, trials: u64) -> Self {
        Self::with_confidence(successes, trials, DEFAULT_CONFIDENCE)
    }

    pub fn with_confidence(successes: u64, trials: u64, confidence: f64) -> Self {
        assert!(successes <= trials, "more successes than trials");
        let rate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let (ci_low, ci_high) = clopper_pearson(successes, trials, confidence);
        Self {
            successes,
            trials,
            rate,
            ci_low,
            ci_high,
            confidence,
            upper_one_sided: one_sided_upper(successes, trials, confidence),
        }
    }

    /// Binomial standard deviation of the rate at probability `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        binomial_sigma(p, self.trials)
    }
}

/// Standard deviation of a Bernoulli(`p`) mean over `n` samples.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Two-sided exact interval from Beta quantiles.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let alpha = 1.0 - confidence;
    let (k, n) = (successes as f64, trials as f64);
    let low = if successes == 0 { 0.0 } else { beta_quantile(k, n - k + 1.0, alpha / 2.0) };
    let high = if successes == trials { 1.0 } else { beta_quantile(k + 1.0, n - k, 1.0 - alpha / 2.0) };
    (low, high)
}

/// One-sided exact upper bound. With zero successes this is
/// `1 - (1 - confidence)^(1/n)`.
pub fn one_sided_upper(successes: u64, trials: u64, confidence: f64) -> f64 {
    if trials == 0 || successes == trials {
        return 1.0;
    }
    if successes == 0 {
        return 1.0 - (1.0 - confidence).powf(1.0 / trials as f64);
    }
    let (k, n) = (successes as f64, trials as f64);
    beta_quantile(k + 1.0, n - k, confidence)
}

fn beta_quantile(a: f64, b: f64, q: f64) -> f64 {
    Beta::new(a, b).expect("positive shape parameters").inverse_cdf(q)
}

/// Kolmogorov-Smirnov p-value for samples against Uniform(0, 1).
pub fn ks_uniform_pvalue(samples: &[f64]) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let i = i as f64;
            ((i + 1.0) / n - x).max(x - i / n)
        })
        .fold(0.0, f64::max);
    kolmogorov_survival((n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d)
}

// Q_KS(t) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2)
fn kolmogorov_survival(t: f64) -> f64 {
    if t < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=200 {
        let j = j as f64;
        let term = (-2.0 * j * j * t * t).exp();
        sum += if j as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Pearson chi-square p-value for observed counts against expected counts.
pub fn chi_square_pvalue(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len(), "one expectation per cell");
    assert!(observed.len() >= 2, "need at least two cells");
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let diff = o as f64 - e;
            diff * diff / e
        })
        .sum();
    let dof = (observed.len() - 1) as f64;
    1.0 - ChiSquared::new(dof).expect("positive dof").cdf(stat)
}
