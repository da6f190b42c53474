use serde::{Deserialize, Serialize};

use super::combinatorics::{ln_binomial, ln_binomial_ratio, xlny};
use super::BoundReport;
use crate::error::{Error, Result};
use crate::protocol::count_within;

/// One-bit counts that can still pass the classical verdict: those within
/// `tau` of `N (1 - p) / 2`, restricted to `[0, N]`.
pub fn m_valid(n: usize, p: f64, tau: f64) -> Vec<usize> {
    let center = n as f64 * (1.0 - p) / 2.0;
    (0..=n).filter(|&c| count_within(c, center, tau)).collect()
}

fn quarter(n: usize) -> Result<usize> {
    if n == 0 || !n.is_multiple_of(4) {
        return Err(Error::Precondition(format!("N divisible by 4, got {n}")));
    }
    Ok(n / 4)
}

/// Pass probability of the independent guesser and its window-times-centre
/// approximation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependentSuccess {
    pub exact: BoundReport,
    pub approximation: BoundReport,
}

/// Each bit is 0 with probability `alpha`, independently, against `N/2`
/// uniformly placed traps (`p = 1/2`):
/// `alpha^(N/2) * sum_x C(N/2, x) (1-alpha)^x alpha^(N/2-x)` over trap
/// one-counts `x` within `tau` of `N/4`.
pub fn independent_success(n: usize, tau: f64, alpha: f64) -> Result<IndependentSuccess> {
    let q = quarter(n)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!("alpha = {alpha} outside [0, 1]")));
    }
    let half = 2 * q;
    let (h, a, b) = (half as f64, alpha, 1.0 - alpha);
    let raw: f64 = (0..=half)
        .filter(|&x| count_within(x, q as f64, tau))
        .map(|x| {
            let x_f = x as f64;
            (xlny(h, a) + ln_binomial(half as u64, x as u64) + xlny(x_f, b) + xlny(h - x_f, a)).exp()
        })
        .sum();
    let approx =
        ((2.0 * tau + 1.0).ln() + xlny(3.0 * q as f64, a) + xlny(q as f64, b) + ln_binomial(half as u64, q as u64))
            .exp();
    let inputs = [("N", n as f64), ("tau", tau), ("alpha", alpha)];
    Ok(IndependentSuccess {
        exact: BoundReport::probability("independent_exact", raw, &inputs),
        approximation: BoundReport::probability("independent_approx", approx, &inputs),
    })
}

fn global_terms(n: usize, tau: f64) -> Result<Vec<f64>> {
    let q = quarter(n)?;
    let half = (2 * q) as u64;
    Ok(m_valid(n, 0.5, tau).into_iter().map(|c| ln_binomial_ratio(half, n as u64, c as u64).exp()).collect())
}

/// `sum_{c1 in m_valid} C(N/2, c1) / C(N, c1)` at `p = 1/2`: each term is the
/// pass probability of a uniformly random string with `c1` ones. Exceeds 1
/// once `tau` is comparable to `N` and is then clamped.
pub fn global_success(n: usize, tau: f64) -> Result<BoundReport> {
    let raw = global_terms(n, tau)?.iter().sum();
    Ok(BoundReport::probability("global_sum", raw, &[("N", n as f64), ("tau", tau)]))
}

/// Pass probability of the global strategy that draws `c1` uniformly from
/// `m_valid`: the mean of the terms of [`global_success`].
pub fn global_strategy_value(n: usize, tau: f64) -> Result<BoundReport> {
    let terms = global_terms(n, tau)?;
    let raw = terms.iter().sum::<f64>() / terms.len() as f64;
    Ok(BoundReport::probability("global_strategy_mean", raw, &[("N", n as f64), ("tau", tau)]))
}

/// `(2 tau + 1) (N/2)! (3N/4)! / (N! (N/4)!)`, the centre term times the
/// window size.
pub fn global_success_closed_form(n: usize, tau: f64) -> Result<BoundReport> {
    let q = quarter(n)? as u64;
    let raw = ((2.0 * tau + 1.0).ln() + ln_binomial_ratio(2 * q, n as u64, q)).exp();
    Ok(BoundReport::probability("global_center_times_window", raw, &[("N", n as f64), ("tau", tau)]))
}

/// Guessing the valid positions outright: `1 / C(N, N/2)`.
pub fn guess_set_success(n: usize) -> Result<f64> {
    if !n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("N even, got {n}")));
    }
    Ok((-ln_binomial(n as u64, (n / 2) as u64)).exp())
}
