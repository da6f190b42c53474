use super::{BoundFlag, BoundReport};
use crate::error::{Error, Result};

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidConfig(format!("delta = {delta} outside [0, 1]")));
    }
    Ok(())
}

/// `(1/2 + delta/2)^(N M)`: an adversary whose responses all have
/// `F^2 <= delta` passes every SWAP test with at most this probability.
pub fn swap_soundness_bound(n: usize, m: u32, delta: f64) -> Result<BoundReport> {
    check_delta(delta)?;
    let raw = (0.5 + 0.5 * delta).powf(n as f64 * f64::from(m));
    let report = BoundReport::probability("swap_soundness", raw, &[("N", n as f64), ("M", m.into()), ("delta", delta)]);
    Ok(if delta >= 1.0 { report.with_flag(BoundFlag::Degenerate) } else { report })
}

/// `(1/(M+1) + M delta/(M+1))^N`, the GSWAP analogue.
pub fn gswap_soundness_bound(n: usize, m: u32, delta: f64) -> Result<BoundReport> {
    check_delta(delta)?;
    if m == 0 {
        return Err(Error::InvalidConfig("M must be at least 1".into()));
    }
    let mf = f64::from(m);
    let raw = (1.0 / (mf + 1.0) + mf * delta / (mf + 1.0)).powf(n as f64);
    let report = BoundReport::probability("gswap_soundness", raw, &[("N", n as f64), ("M", mf), ("delta", delta)]);
    Ok(if delta >= 1.0 { report.with_flag(BoundFlag::Degenerate) } else { report })
}

/// Hoeffding lower bound `1 - 2 exp(-4 tau^2 / N)` on the honest pass rate.
pub fn cver_completeness_bound(n: usize, tau: f64) -> Result<BoundReport> {
    if n == 0 || tau < 0.0 {
        return Err(Error::InvalidConfig(format!("need N > 0 and tau >= 0, got N = {n}, tau = {tau}")));
    }
    let raw = 1.0 - 2.0 * (-4.0 * tau * tau / n as f64).exp();
    Ok(BoundReport::probability("cver_completeness_hoeffding", raw, &[("N", n as f64), ("tau", tau)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_values() {
        let b = swap_soundness_bound(1, 20, 0.0).unwrap();
        assert_eq!(b.analytic_value, 2f64.powi(-20));
        assert!((b.analytic_value - 9.537e-7).abs() < 1e-10);
        assert_eq!(swap_soundness_bound(2, 10, 0.0).unwrap().analytic_value, 2f64.powi(-20));
        let d = swap_soundness_bound(3, 3, 1.0).unwrap();
        assert_eq!((d.analytic_value, d.flag), (1.0, BoundFlag::Degenerate));
        assert!(swap_soundness_bound(1, 1, 1.5).is_err());
    }

    #[test]
    fn gswap_values() {
        assert!((gswap_soundness_bound(10, 9, 0.0).unwrap().analytic_value - 1e-10).abs() < 1e-22);
        assert!((gswap_soundness_bound(4, 3, 0.0).unwrap().analytic_value - 0.00390625).abs() < 1e-15);
        for n in 1..6 {
            for delta in [0.0, 0.3, 0.9] {
                let a = gswap_soundness_bound(n, 1, delta).unwrap().analytic_value;
                let b = swap_soundness_bound(n, 1, delta).unwrap().analytic_value;
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn completeness_values() {
        for n in [4usize, 16, 64, 128] {
            let b = cver_completeness_bound(n, n as f64 / 4.0).unwrap();
            assert_eq!(b.analytic_value, 1.0 - 2.0 * (-(n as f64) / 4.0).exp());
        }
        let b = cver_completeness_bound(64, 16.0).unwrap();
        assert!((1.0 - b.analytic_value - 2.25e-7).abs() < 1e-9);
        let v = cver_completeness_bound(16, 0.0).unwrap();
        assert_eq!((v.analytic_value, v.flag, v.raw_value), (0.0, BoundFlag::Vacuous, -1.0));
    }
}
