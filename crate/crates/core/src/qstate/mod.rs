//! Dense complex state-vector kernel.
//!
//! States live in `D = 2^n` dimensions with `n <= 12`. Everything here is a
//! plain value type; randomness is always passed in explicitly.

mod density;
mod state;
mod subspace;
mod unitary;

pub use density::DensityMatrix;
pub use state::{haar_random_state, orthogonal_state, PureState};
pub use subspace::{orthonormalize, orthonormalize_paired, subspace_overlap, SubspaceBasis};
pub use unitary::{haar_random_unitary, UnitaryMatrix};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for algebraic identities (norms, unitarity, orthogonality).
pub const ALGEBRAIC_TOL: f64 = 1e-10;
/// Residual norm below which a vector counts as linearly dependent.
pub const RANK_TOL: f64 = 1e-8;

/// Hilbert-space size of an `n`-qubit register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension {
    qubits: u32,
}

impl Dimension {
    /// Dense-representation cap (`D <= 4096`).
    pub const MAX_QUBITS: u32 = 12;

    pub fn new(qubits: u32) -> Result<Self> {
        if qubits == 0 || qubits > Self::MAX_QUBITS {
            return Err(Error::InvalidDimension(qubits));
        }
        Ok(Self { qubits })
    }

    /// Dimension for a vector length, if it is `2^n` with a valid `n`.
    pub fn from_size(size: usize) -> Result<Self> {
        if size < 2 || !size.is_power_of_two() {
            return Err(Error::Precondition(format!("vector length {size} is not a power of two >= 2")));
        }
        Self::new(size.trailing_zeros())
    }

    pub fn qubits(self) -> u32 {
        self.qubits
    }

    /// `D = 2^n`.
    pub fn size(self) -> usize {
        1usize << self.qubits
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Self::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.qubits
    }
}

/// Borrowed view of either kind of state, for operations accepting both.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Pure(&'a PureState),
    Mixed(&'a DensityMatrix),
}

impl StateRef<'_> {
    pub fn size(&self) -> usize {
        match self {
            StateRef::Pure(p) => p.size(),
            StateRef::Mixed(m) => m.size(),
        }
    }
}

impl<'a> From<&'a PureState> for StateRef<'a> {
    fn from(p: &'a PureState) -> Self {
        StateRef::Pure(p)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(m: &'a DensityMatrix) -> Self {
        StateRef::Mixed(m)
    }
}

/// Uhlmann fidelity `F(a, b) = Tr sqrt(sqrt(a) b sqrt(a))`.
///
/// For two pure states this is `|<a|b>|`; for a pure and a mixed state it is
/// `sqrt(<psi|rho|psi>)`. The result is clamped to `[0, 1]`.
pub fn fidelity<'a, 'b>(a: impl Into<StateRef<'a>>, b: impl Into<StateRef<'b>>) -> Result<f64> {
    let (a, b) = (a.into(), b.into());
    check_size(a.size(), b.size())?;
    let f = match (a, b) {
        (StateRef::Pure(x), StateRef::Pure(y)) => x.inner(y).norm(),
        (StateRef::Pure(p), StateRef::Mixed(m)) | (StateRef::Mixed(m), StateRef::Pure(p)) => {
            m.expectation(p).max(0.0).sqrt()
        }
        (StateRef::Mixed(x), StateRef::Mixed(y)) => density::mixed_fidelity(x, y),
    };
    Ok(f.clamp(0.0, 1.0))
}

/// Squared fidelity between two pure states, `|<a|b>|^2`.
pub fn overlap_sq(a: &PureState, b: &PureState) -> f64 {
    a.inner(b).norm_sqr().min(1.0)
}

pub(crate) fn check_size(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// `sum_i conj(a_i) b_i`
#[inline]
pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    C64::new(re, im)
}

/// `sum_i a_i b_i` (no conjugation).
#[inline]
pub(crate) fn dotu(a: &[C64], b: &[C64]) -> C64 {
    // Two independent accumulator pairs keep the FP pipeline busy.
    let (mut re0, mut im0, mut re1, mut im1) = (0.0, 0.0, 0.0, 0.0);
    let mut ca = a.chunks_exact(2);
    let mut cb = b.chunks_exact(2);
    for (x, y) in (&mut ca).zip(&mut cb) {
        re0 += x[0].re * y[0].re - x[0].im * y[0].im;
        im0 += x[0].re * y[0].im + x[0].im * y[0].re;
        re1 += x[1].re * y[1].re - x[1].im * y[1].im;
        im1 += x[1].re * y[1].im + x[1].im * y[1].re;
    }
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        re0 += x.re * y.re - x.im * y.im;
        im0 += x.re * y.im + x.im * y.re;
    }
    C64::new(re0 + re1, im0 + im1)
}

pub(crate) fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}
