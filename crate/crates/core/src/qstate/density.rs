use nalgebra::DMatrix;

use super::{Dimension, PureState, ALGEBRAIC_TOL, C64};
use crate::error::{Error, Result};

/// Mixed state on `D` dimensions, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: Dimension,
    entries: Vec<C64>,
}

impl DensityMatrix {
    pub fn from_pure(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        let n = a.len();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(a[i] * a[j].conj());
            }
        }
        Self { dim: psi.dim(), entries }
    }

    /// Convex combination `sum_k w_k |psi_k><psi_k|`.
    pub fn mixture(components: &[(f64, PureState)]) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::InvalidDensityMatrix("empty mixture".into()));
        };
        let dim = first.dim();
        let n = dim.size();
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if components.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::InvalidDensityMatrix("weights must be a distribution".into()));
        }
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for (w, psi) in components {
            super::check_size(n, psi.size())?;
            let a = psi.amplitudes();
            for i in 0..n {
                for j in 0..n {
                    entries[i * n + j] += a[i] * a[j].conj() * *w;
                }
            }
        }
        Ok(Self { dim, entries })
    }

    /// Validates Hermiticity, unit trace and positivity (all within `1e-10`).
    pub fn from_entries(dim: Dimension, entries: Vec<C64>) -> Result<Self> {
        let n = dim.size();
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: entries.len() });
        }
        let rho = Self { dim, entries };
        for i in 0..n {
            for j in 0..n {
                if (rho.entry(i, j) - rho.entry(j, i).conj()).norm() > ALGEBRAIC_TOL {
                    return Err(Error::InvalidDensityMatrix("not Hermitian".into()));
                }
            }
        }
        let trace: f64 = (0..n).map(|i| rho.entry(i, i).re).sum();
        if (trace - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace}")));
        }
        if let Some(min) = rho.eigenvalues().into_iter().reduce(f64::min) {
            if min < -ALGEBRAIC_TOL {
                return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min}")));
            }
        }
        Ok(rho)
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.dim.size()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.size() + col]
    }

    /// `<psi|rho|psi>`
    pub fn expectation(&self, psi: &PureState) -> f64 {
        let a = psi.amplitudes();
        let n = a.len();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            let row = &self.entries[i * n..(i + 1) * n];
            acc += a[i].conj() * super::dotu(row, a);
        }
        acc.re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.to_matrix().symmetric_eigen().eigenvalues.iter().copied().collect()
    }

    fn to_matrix(&self) -> DMatrix<C64> {
        let n = self.size();
        DMatrix::from_row_slice(n, n, &self.entries)
    }
}

pub(super) fn mixed_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let eig = a.to_matrix().symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0));
    let v = &eig.eigenvectors;
    let sqrt_a = v * DMatrix::from_diagonal(&sqrt_vals) * v.adjoint();
    let m = &sqrt_a * b.to_matrix() * &sqrt_a;
    // symmetrize against round-off before the Hermitian solver
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    m.symmetric_eigen().eigenvalues.iter().map(|l| l.max(0.0).sqrt()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{fidelity, haar_random_state};
    use crate::seed::SeedStream;

    fn d(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn maximally_mixed_fidelity_with_pure() {
        let dim = d(2);
        let comps: Vec<_> = (0..4).map(|i| (0.25, PureState::basis(dim, i))).collect();
        let rho = DensityMatrix::mixture(&comps).unwrap();
        let mut rng = SeedStream::new(1).rng();
        let psi = haar_random_state(dim, &mut rng);
        assert!((fidelity(&psi, &rho).unwrap() - 0.5).abs() < 1e-10);
        // F(I/D, I/D) = 1
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn commuting_mixed_states() {
        // F = sum sqrt(p_i q_i) for states diagonal in one basis
        let dim = d(1);
        let r = DensityMatrix::mixture(&[(0.3, PureState::basis(dim, 0)), (0.7, PureState::basis(dim, 1))]).unwrap();
        let s = DensityMatrix::mixture(&[(0.6, PureState::basis(dim, 0)), (0.4, PureState::basis(dim, 1))]).unwrap();
        let expected = (0.3f64 * 0.6).sqrt() + (0.7f64 * 0.4).sqrt();
        assert!((fidelity(&r, &s).unwrap() - expected).abs() < 1e-10);
        assert!((fidelity(&s, &r).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn validation() {
        let dim = d(1);
        let good = vec![C64::new(0.5, 0.0), C64::new(0.0, 0.1), C64::new(0.0, -0.1), C64::new(0.5, 0.0)];
        assert!(DensityMatrix::from_entries(dim, good).is_ok());
        let non_herm = vec![C64::new(0.5, 0.0), C64::new(0.0, 0.1), C64::new(0.0, 0.1), C64::new(0.5, 0.0)];
        assert!(DensityMatrix::from_entries(dim, non_herm).is_err());
        let bad_trace = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)];
        assert!(DensityMatrix::from_entries(dim, bad_trace).is_err());
        let negative = vec![C64::new(1.2, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-0.2, 0.0)];
        assert!(DensityMatrix::from_entries(dim, negative).is_err());
    }
}
