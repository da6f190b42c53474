//! Equality tests between a (possibly mixed) state and a pure reference.
//!
//! Acceptance probabilities are computed from the squared fidelity rather
//! than by simulating the controlled-SWAP circuit; the resulting
//! distribution is the same. Outcome bit 0 means accept.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{check_size, PureState, StateRef};

/// Which equality test to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TestKind {
    /// One copy of each state; accepts with `1/2 + F^2/2`.
    Swap,
    /// One copy of the tested state against `m` reference copies; accepts
    /// with `1/(m+1) + m F^2/(m+1)`.
    Gswap { m: u32 },
    /// Idealized test accepting with `F^2`.
    Ideal,
}

impl TestKind {
    pub fn gswap(m: u32) -> Result<Self> {
        let kind = TestKind::Gswap { m };
        kind.validate()?;
        Ok(kind)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TestKind::Gswap { m: 0 } => Err(Error::InvalidConfig("GSWAP needs at least one copy".into())),
            _ => Ok(()),
        }
    }

    /// Acceptance probability as a function of `F^2`.
    pub fn accept_from_fidelity_sq(&self, f2: f64) -> f64 {
        let f2 = f2.clamp(0.0, 1.0);
        match *self {
            TestKind::Swap => 0.5 + 0.5 * f2,
            TestKind::Gswap { m } => {
                let m = f64::from(m);
                (1.0 + m * f2) / (m + 1.0)
            }
            TestKind::Ideal => f2,
        }
    }

    /// Acceptance probability for orthogonal inputs (the one-sided error of a
    /// single instance).
    pub fn base_error(&self) -> f64 {
        self.accept_from_fidelity_sq(0.0)
    }
}

/// Result of a single test instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub accept: bool,
    /// `0` on accept, `1` on reject.
    pub outcome_bit: u8,
}

impl TestOutcome {
    pub fn from_accept(accept: bool) -> Self {
        Self { accept, outcome_bit: u8::from(!accept) }
    }
}

/// `F^2` between a state and a pure reference: `|<a|b>|^2` or `<b|rho|b>`.
pub fn fidelity_sq<'a>(a: impl Into<StateRef<'a>>, b: &PureState) -> Result<f64> {
    let a = a.into();
    check_size(a.size(), b.size())?;
    let f2 = match a {
        StateRef::Pure(p) => p.inner(b).norm_sqr(),
        StateRef::Mixed(m) => m.expectation(b),
    };
    Ok(f2.clamp(0.0, 1.0))
}

/// Exact probability that `kind` accepts `a` against the pure state `b`.
pub fn accept_probability<'a>(kind: TestKind, a: impl Into<StateRef<'a>>, b: &PureState) -> Result<f64> {
    kind.validate()?;
    Ok(kind.accept_from_fidelity_sq(fidelity_sq(a, b)?))
}

/// One Bernoulli draw of the test.
pub fn sample_outcome<'a, R: Rng + ?Sized>(
    kind: TestKind,
    a: impl Into<StateRef<'a>>,
    b: &PureState,
    rng: &mut R,
) -> Result<TestOutcome> {
    let p = accept_probability(kind, a, b)?;
    Ok(sample_with_probability(p, rng))
}

/// Accept with probability `p`.
pub fn sample_with_probability<R: Rng + ?Sized>(p: f64, rng: &mut R) -> TestOutcome {
    // p = 1 must accept with certainty; random::<f64>() lies in [0, 1).
    TestOutcome::from_accept(rng.random::<f64>() < p)
}

/// Smallest repetition count (SWAP, IDEAL) or copy count (GSWAP) whose
/// one-sided error at fidelity `f` is at most `epsilon`.
pub fn repetitions_for_error(kind: TestKind, f: f64, epsilon: f64) -> Result<u64> {
    kind.validate()?;
    if !(0.0..1.0).contains(&f) {
        return Err(Error::Precondition(format!("fidelity {f} in [0, 1)")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Precondition(format!("epsilon {epsilon} in (0, 1)")));
    }
    let f2 = f * f;
    match kind {
        TestKind::Swap | TestKind::Ideal => {
            let p = kind.accept_from_fidelity_sq(f2);
            if p == 0.0 {
                return Ok(1);
            }
            let guess = (epsilon.ln() / p.ln() - 1e-9).ceil().max(1.0) as u64;
            Ok(adjust(guess, |m| p.powf(m as f64) <= epsilon))
        }
        TestKind::Gswap { .. } => {
            if epsilon <= f2 {
                return Err(Error::Unreachable {
                    epsilon,
                    reason: format!("GSWAP error never drops below F^2 = {f2}"),
                });
            }
            let ok = |m: u64| {
                let m = m as f64;
                (1.0 + m * f2) / (m + 1.0) <= epsilon
            };
            let guess = ((1.0 - epsilon) / (epsilon - f2) - 1e-9).ceil().max(1.0) as u64;
            Ok(adjust(guess, ok))
        }
    }
}

// Corrects an analytic estimate for round-off to the exact smallest m >= 1.
fn adjust(mut m: u64, ok: impl Fn(u64) -> bool) -> u64 {
    while !ok(m) {
        m += 1;
    }
    while m > 1 && ok(m - 1) {
        m -= 1;
    }
    m
}
