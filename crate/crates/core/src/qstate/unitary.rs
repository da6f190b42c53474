use rand::Rng;

use super::state::gaussian_vector;
use super::{check_size, dotu, inner, Dimension, PureState, ALGEBRAIC_TOL, C64};
use crate::error::{Error, Result};

/// Dense `D x D` unitary, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    dim: Dimension,
    entries: Vec<C64>,
}

impl UnitaryMatrix {
    pub fn identity(dim: Dimension) -> Self {
        let n = dim.size();
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            entries[i * n + i] = C64::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    /// Row-major entries; fails unless `U^dagger U = I` within `1e-10`.
    pub fn from_entries(dim: Dimension, entries: Vec<C64>) -> Result<Self> {
        let n = dim.size();
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: entries.len() });
        }
        let u = Self { dim, entries };
        let defect = u.unitarity_defect();
        if defect > ALGEBRAIC_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(u)
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

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn row(&self, row: usize) -> &[C64] {
        let n = self.size();
        &self.entries[row * n..(row + 1) * n]
    }

    /// `U |psi>`
    ///
    /// # Panics
    /// On a dimension mismatch.
    pub fn apply(&self, psi: &PureState) -> PureState {
        assert_eq!(psi.size(), self.size(), "unitary applied to mismatched state");
        let x = psi.amplitudes();
        let out = (0..self.size()).map(|i| dotu(self.row(i), x)).collect();
        PureState::from_raw_unchecked(out)
    }

    pub fn try_apply(&self, psi: &PureState) -> Result<PureState> {
        check_size(self.size(), psi.size())?;
        Ok(self.apply(psi))
    }

    /// Applies `U` to several states in one pass over the matrix.
    pub fn apply_batch(&self, states: &[PureState]) -> Vec<PureState> {
        let n = self.size();
        for s in states {
            assert_eq!(s.size(), n, "unitary applied to mismatched state");
        }
        let mut out: Vec<Vec<C64>> = vec![Vec::with_capacity(n); states.len()];
        for i in 0..n {
            let row = self.row(i);
            for (o, s) in out.iter_mut().zip(states) {
                o.push(dotu(row, s.amplitudes()));
            }
        }
        out.into_iter().map(PureState::from_raw_unchecked).collect()
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        let n = self.size();
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        Self { dim: self.dim, entries }
    }

    /// Max-entry norm of `U^dagger U - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.size();
        let cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| self.entries[i * n + j]).collect()).collect();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                let g = inner(&cols[a], &cols[b]);
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Haar-random unitary.
///
/// Draws a complex Ginibre matrix, takes its Householder QR factorization and
/// multiplies each column of `Q` by the phase of the matching diagonal entry
/// of `R`, which makes the distribution exactly Haar.
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: Dimension, rng: &mut R) -> UnitaryMatrix {
    let n = dim.size();
    // column-major working copy
    let mut cols: Vec<Vec<C64>> = (0..n).map(|_| gaussian_vector(n, rng)).collect();
    let mut reflectors: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut r_phase: Vec<C64> = Vec::with_capacity(n);

    for k in 0..n {
        let x = &cols[k][k..];
        let norm_x = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        // R_kk = -phase * |x|
        r_phase.push(-phase);
        let mut v: Vec<C64> = x.to_vec();
        v[0] += phase * norm_x;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vnorm);
        for col in cols.iter_mut().skip(k + 1) {
            reflect(&v, &mut col[k..]);
        }
        reflectors.push(v);
    }

    // Q = H_0 H_1 ... H_{n-1}, accumulated right to left.
    let mut q: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut c = vec![C64::new(0.0, 0.0); n];
            c[j] = C64::new(1.0, 0.0);
            c
        })
        .collect();
    for k in (0..n).rev() {
        let v = &reflectors[k];
        if v.is_empty() {
            continue;
        }
        for col in q.iter_mut().skip(k) {
            reflect(v, &mut col[k..]);
        }
    }

    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    for (j, col) in q.iter().enumerate() {
        let ph = r_phase[j];
        for (i, z) in col.iter().enumerate() {
            entries[i * n + j] = z * ph;
        }
    }
    UnitaryMatrix { dim, entries }
}

// x <- (I - 2 v v^dagger) x
#[inline]
fn reflect(v: &[C64], x: &mut [C64]) {
    let w = inner(v, x) * 2.0;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= vi * w;
    }
}
