use num_rational::Ratio;
use statrs::function::factorial;
use statrs::function::gamma::ln_gamma;

/// Exact rationals for the small-`N` oracles.
pub type Exact = Ratio<i128>;

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    factorial::ln_binomial(n, k)
}

/// `C(n, k)` through log-space; 0 when `k > n`.
pub fn binomial(n: u64, k: u64) -> f64 {
    ln_binomial(n, k).exp()
}

pub fn ln_factorial(n: u64) -> f64 {
    factorial::ln_factorial(n)
}

/// `ln Gamma(x + 1)`, the factorial continued to half-integers.
pub fn ln_factorial_real(x: f64) -> f64 {
    ln_gamma(x + 1.0)
}

/// `ln(C(a, k) / C(b, k))`, `-inf` when `k > a`.
pub fn ln_binomial_ratio(a: u64, b: u64, k: u64) -> f64 {
    ln_binomial(a, k) - ln_binomial(b, k)
}

/// `x * ln(y)` with `0 * ln(0) = 0`.
pub fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// `C(n, k)` as an exact integer; 0 when `k > n`. Overflows past `n ~ 120`.
pub fn binomial_exact(n: u64, k: u64) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: i128 = 1;
    for i in 0..k {
        c = c * i128::from(n - i) / i128::from(i + 1);
    }
    c
}

pub fn factorial_exact(n: u64) -> i128 {
    (1..=n).map(i128::from).product()
}

/// `C(a, k) / C(b, k)` exactly.
pub fn binomial_ratio_exact(a: u64, b: u64, k: u64) -> Exact {
    Exact::new(binomial_exact(a, k), binomial_exact(b, k))
}

pub fn to_f64(x: &Exact) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_space_matches_integers_up_to_twenty() {
        for n in 0..=20u64 {
            for k in 0..=n {
                let exact = binomial_exact(n, k) as f64;
                assert!((binomial(n, k) - exact).abs() / exact < 1e-10, "C({n},{k})");
            }
            let f = factorial_exact(n) as f64;
            assert!((ln_factorial(n).exp() - f).abs() / f < 1e-10);
        }
    }

    #[test]
    fn no_overflow_at_ten_thousand() {
        let l = ln_binomial(10_000, 5_000);
        assert!(l.is_finite());
        // Stirling: ln C(2m, m) ~ 2m ln 2 - ln(pi m) / 2
        let stirling = 10_000.0 * 2f64.ln() - 0.5 * (std::f64::consts::PI * 5_000.0).ln();
        assert!((l - stirling).abs() < 1e-4);
        assert!(ln_factorial(10_000).is_finite());
        assert!(ln_binomial_ratio(5_000, 10_000, 2_500).is_finite());
    }

    #[test]
    fn half_integer_factorial() {
        // (1/2)! = sqrt(pi) / 2
        let v = ln_factorial_real(0.5).exp();
        assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn exact_helpers() {
        assert_eq!(binomial_exact(8, 4), 70);
        assert_eq!(binomial_exact(3, 5), 0);
        assert_eq!(binomial_ratio_exact(4, 8, 2), Exact::new(3, 14));
        assert_eq!(xlny(0.0, 0.0), 0.0);
    }
}
