use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::combinatorics::{ln_binomial_ratio, ln_factorial, ln_factorial_real, Exact};
use crate::error::{Error, Result};
use crate::protocol::integral;

/// Global-strategy pass probability when a fraction `p` of rounds are valid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalSuccessP {
    pub n: usize,
    pub p: f64,
    /// Half the trap count, `(N - pN) / 2`; the strategy's one-count.
    pub z: usize,
    /// `C(N - pN, z) / C(N, z)`: pass probability when `p` is known.
    pub conditional: f64,
    /// The same value through `Gamma(2z) / Gamma(z) = 2^(2z-1) Gamma(z + 1/2) / sqrt(pi)`.
    pub gamma_route: f64,
    /// `1 / (N/2 + 1)`: chance of guessing `z` when `p` is hidden.
    pub guess_factor: f64,
    /// `conditional * guess_factor`.
    pub hidden_p: f64,
}

/// Needs `pN` integral and `(1 - p) N` even.
pub fn global_success_p(n: usize, p: f64) -> Result<GlobalSuccessP> {
    if n == 0 || !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!("need N > 0 and p in [0, 1], got N = {n}, p = {p}")));
    }
    let valid = integral(p * n as f64, "p * N")?;
    let traps = n - valid;
    if !traps.is_multiple_of(2) {
        return Err(Error::Precondition(format!("(1 - p) N even, got {traps}")));
    }
    let z = traps / 2;
    let conditional = ln_binomial_ratio(traps as u64, n as u64, z as u64).exp();
    let zf = z as f64;
    let gamma_route = ((2.0 / std::f64::consts::PI.sqrt()).ln() + (2.0 * zf - 1.0) * 2f64.ln()
        - ln_factorial(n as u64)
        + ln_gamma(zf + 0.5)
        + ln_gamma(n as f64 - zf + 1.0))
    .exp();
    let guess_factor = 1.0 / (n as f64 / 2.0 + 1.0);
    Ok(GlobalSuccessP { n, p, z, conditional, gamma_route, guess_factor, hidden_p: conditional * guess_factor })
}

/// `ln` of `(N-k)! ((N+k)/2)! / (N! ((N-k)/2)!)` for real `k` in `[0, N]`.
fn ln_series_term(n: usize, k: f64) -> f64 {
    let nf = n as f64;
    ln_factorial_real(nf - k) + ln_factorial_real((nf + k) / 2.0)
        - ln_factorial_real(nf)
        - ln_factorial_real((nf - k) / 2.0)
}

/// Term `k` of the uniform-`p` series; `k = pN`. For `N - k` even it equals
/// `global_success_p(N, k/N).conditional`.
pub fn series_term(n: usize, k: usize) -> f64 {
    ln_series_term(n, k as f64).exp()
}

/// `S(N) = sum_{k=0}^{N} (N-k)! ((N+k)/2)! / (N! ((N-k)/2)!)`.
pub fn series_inner_sum(n: usize) -> f64 {
    (0..=n).map(|k| series_term(n, k)).sum()
}

/// Largest `N` for [`series_inner_sum_exact`].
const EXACT_SERIES_MAX_N: usize = 20;

/// `S(N)` in exact rationals; half-integer factorial ratios are expanded as
/// `((N+k)/2)! / ((N-k)/2)! = prod_{j=1}^{k} ((N-k)/2 + j)`.
pub fn series_inner_sum_exact(n: usize) -> Result<Exact> {
    if n > EXACT_SERIES_MAX_N {
        return Err(Error::TooLarge { n, cap: EXACT_SERIES_MAX_N });
    }
    let n_i = n as i128;
    let mut sum = Exact::from_integer(0);
    for k in 0..=n_i {
        // (N-k)! / N! = 1 / (N (N-1) ... (N-k+1))
        let falling: i128 = (n_i - k + 1..=n_i).product();
        let base = Exact::new(n_i - k, 2);
        let rising = (1..=k).fold(Exact::from_integer(1), |acc, j| acc * (base + Exact::from_integer(j)));
        sum += rising / Exact::from_integer(falling);
    }
    Ok(sum)
}

/// Average pass probability over a uniformly chosen `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvgUniformP {
    pub n: usize,
    /// `S(N)`, which tends to 3.
    pub series_sum: f64,
    /// `2 S(N) / (N (N + 2))`.
    pub series: f64,
    /// `2/(N(N+2)) * integral_0^N term(k) dk` by Simpson's rule, the
    /// continuous-`p` form the series discretizes.
    pub integral: f64,
    /// `6 / (N (N + 2))`.
    pub asymptote: f64,
    /// Mean of `conditional` over `z` uniform in `{0, ..., N/2}`.
    pub discrete_uniform: f64,
}

pub fn avg_success_uniform_p(n: usize) -> Result<AvgUniformP> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("N even and positive, got {n}")));
    }
    let nf = n as f64;
    let scale = 2.0 / (nf * (nf + 2.0));
    let series_sum = series_inner_sum(n);
    let intervals = (20 * n).max(2000);
    let h = nf / intervals as f64;
    let simpson: f64 = (0..=intervals)
        .map(|i| {
            let w = if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * ln_series_term(n, (i as f64 * h).min(nf)).exp()
        })
        .sum::<f64>()
        * h
        / 3.0;
    let discrete_uniform = (0..=n / 2).map(|z| series_term(n, n - 2 * z)).sum::<f64>() / (n / 2 + 1) as f64;
    Ok(AvgUniformP {
        n,
        series_sum,
        series: scale * series_sum,
        integral: scale * simpson,
        asymptote: 6.0 / (nf * (nf + 2.0)),
        discrete_uniform,
    })
}
