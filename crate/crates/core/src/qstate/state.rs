use rand::Rng;
use rand_distr::StandardNormal;

use super::{check_size, inner, norm_sqr, Dimension, ALGEBRAIC_TOL, C64};
use crate::error::{Error, Result};

/// Unit-norm amplitude vector of length `D = 2^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized (within `1e-10`).
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        Dimension::from_size(amplitudes.len())?;
        let norm = norm_sqr(&amplitudes).sqrt();
        if (norm - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes and wraps; fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        Dimension::from_size(amplitudes.len())?;
        let norm = norm_sqr(&amplitudes).sqrt();
        if norm < f64::MIN_POSITIVE.sqrt() {
            return Err(Error::NotNormalized(norm));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { amplitudes })
    }

    /// Computational basis state `|index>`.
    ///
    /// # Panics
    /// If `index >= D`.
    pub fn basis(dim: Dimension, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim.size()];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub(crate) fn from_raw_unchecked(amplitudes: Vec<C64>) -> Self {
        debug_assert!((norm_sqr(&amplitudes).sqrt() - 1.0).abs() < 1e-8);
        Self { amplitudes }
    }

    pub fn dim(&self) -> Dimension {
        Dimension::from_size(self.amplitudes.len()).expect("length validated on construction")
    }

    pub fn size(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `<self|other>`
    ///
    /// # Panics
    /// On a dimension mismatch.
    pub fn inner(&self, other: &PureState) -> C64 {
        assert_eq!(self.size(), other.size(), "inner product of mismatched states");
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn try_inner(&self, other: &PureState) -> Result<C64> {
        check_size(self.size(), other.size())?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amplitudes).sqrt()
    }
}

pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub(crate) fn gaussian_vector<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Vec<C64> {
    (0..size).map(|_| complex_gaussian(rng)).collect()
}

/// Haar-random pure state: a normalized complex Gaussian vector.
pub fn haar_random_state<R: Rng + ?Sized>(dim: Dimension, rng: &mut R) -> PureState {
    loop {
        let v = gaussian_vector(dim.size(), rng);
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Haar-random state in the orthogonal complement of `phi`.
pub fn orthogonal_state<R: Rng + ?Sized>(phi: &PureState, rng: &mut R) -> Result<PureState> {
    if phi.size() < 2 {
        return Err(Error::Precondition("D >= 2 for an orthogonal complement".into()));
    }
    let basis = super::SubspaceBasis::from_orthonormal_unchecked(phi.dim(), vec![phi.clone()]);
    basis.complement_haar_state(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{fidelity, haar_random_unitary, overlap_sq};
    use crate::seed::SeedStream;

    fn d(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn haar_state_is_normalized_and_reproducible() {
        let s = SeedStream::new(11);
        let a = haar_random_state(d(1), &mut s.rng());
        let b = haar_random_state(d(1), &mut s.rng());
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert_eq!(a, b);
    }

    #[test]
    fn haar_state_first_amplitude_moment() {
        // |<0|psi>|^2 ~ Beta(1, D-1): mean 1/D, var (D-1)/(D^2 (D+1))
        let dim = d(4);
        let size = dim.size() as f64;
        let trials = 100_000;
        let mut rng = SeedStream::new(2024).rng();
        let mean = (0..trials).map(|_| haar_random_state(dim, &mut rng).amplitudes()[0].norm_sqr()).sum::<f64>()
            / trials as f64;
        let sigma = ((size - 1.0) / (size * size * (size + 1.0)) / trials as f64).sqrt();
        assert!((mean - 1.0 / size).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn orthogonal_state_single_qubit_is_phase_times_one() {
        let zero = PureState::basis(d(1), 0);
        let out = orthogonal_state(&zero, &mut SeedStream::new(5).rng()).unwrap();
        assert!(out.amplitudes()[0].norm() < 1e-12);
        assert!((out.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_state_is_orthogonal() {
        let mut rng = SeedStream::new(6).rng();
        for _ in 0..1000 {
            let phi = haar_random_state(d(4), &mut rng);
            let out = orthogonal_state(&phi, &mut rng).unwrap();
            assert!(fidelity(&phi, &out).unwrap() < 1e-10);
            assert!((out.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn orthogonality_survives_a_common_unitary() {
        let mut rng = SeedStream::new(8).rng();
        let u = haar_random_unitary(d(4), &mut rng);
        for _ in 0..100 {
            let phi = haar_random_state(d(4), &mut rng);
            let perp = orthogonal_state(&phi, &mut rng).unwrap();
            assert!(overlap_sq(&u.apply(&phi), &u.apply(&perp)) < 1e-20);
        }
    }

    #[test]
    fn rejects_bad_vectors() {
        assert!(PureState::from_amplitudes(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        assert!(PureState::normalized(vec![C64::new(0.0, 0.0); 4]).is_err());
        assert!(PureState::normalized(vec![C64::new(1.0, 0.0); 3]).is_err());
    }
}
