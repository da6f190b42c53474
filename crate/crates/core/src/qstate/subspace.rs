use rand::Rng;

use super::state::gaussian_vector;
use super::{check_size, inner, norm_sqr, Dimension, PureState, C64, RANK_TOL};
use crate::error::{Error, Result};

/// Orthonormal basis of a `d`-dimensional subspace of `C^D`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    dim: Dimension,
    vectors: Vec<PureState>,
}

impl SubspaceBasis {
    /// The zero subspace.
    pub fn empty(dim: Dimension) -> Self {
        Self { dim, vectors: Vec::new() }
    }

    pub(crate) fn from_orthonormal_unchecked(dim: Dimension, vectors: Vec<PureState>) -> Self {
        Self { dim, vectors }
    }

    pub fn ambient(&self) -> Dimension {
        self.dim
    }

    /// Dimension `d` of the span.
    pub fn d(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    /// Adds `v` if it has a residual of at least `1e-8` outside the span.
    /// Returns whether the span grew.
    pub fn extend(&mut self, v: &PureState) -> Result<bool> {
        check_size(self.dim.size(), v.size())?;
        let mut r = v.amplitudes().to_vec();
        self.remove_components(&mut r);
        Ok(self.push_residual(r))
    }

    /// Coefficients `<e_i|phi>`.
    pub fn coefficients(&self, phi: &PureState) -> Vec<C64> {
        self.vectors.iter().map(|e| e.inner(phi)).collect()
    }

    /// `sum_i c_i |e_i>` as a raw (unnormalized) vector.
    pub fn combine(&self, coefficients: &[C64]) -> Vec<C64> {
        assert_eq!(coefficients.len(), self.d(), "one coefficient per basis vector");
        let mut out = vec![C64::new(0.0, 0.0); self.dim.size()];
        for (c, e) in coefficients.iter().zip(&self.vectors) {
            for (o, a) in out.iter_mut().zip(e.amplitudes()) {
                *o += c * a;
            }
        }
        out
    }

    /// Orthogonal projection `Pi |phi>` as a raw vector.
    pub fn project(&self, phi: &PureState) -> Vec<C64> {
        self.combine(&self.coefficients(phi))
    }

    /// Haar-random unit vector in the orthogonal complement of the span.
    pub fn complement_haar_state<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PureState> {
        if self.d() >= self.dim.size() {
            return Err(Error::Precondition("subspace has no orthogonal complement".into()));
        }
        loop {
            let mut g = gaussian_vector(self.dim.size(), rng);
            self.remove_components(&mut g);
            if norm_sqr(&g).sqrt() > RANK_TOL {
                return PureState::normalized(g);
            }
        }
    }

    // Two passes of modified Gram-Schmidt keep the residual orthogonal to
    // working precision.
    fn remove_components(&self, r: &mut [C64]) {
        for _ in 0..2 {
            for e in &self.vectors {
                let c = inner(e.amplitudes(), r);
                for (x, a) in r.iter_mut().zip(e.amplitudes()) {
                    *x -= c * a;
                }
            }
        }
    }

    fn push_residual(&mut self, r: Vec<C64>) -> bool {
        let norm = norm_sqr(&r).sqrt();
        if norm < RANK_TOL || self.d() >= self.dim.size() {
            return false;
        }
        self.vectors.push(PureState::normalized(r).expect("nonzero residual"));
        true
    }
}

/// Modified Gram-Schmidt over `states`, dropping linearly dependent vectors.
pub fn orthonormalize(states: &[PureState]) -> Result<SubspaceBasis> {
    let first = states.first().ok_or_else(|| Error::Precondition("orthonormalize needs at least one state".into()))?;
    let mut basis = SubspaceBasis::empty(first.dim());
    for s in states {
        basis.extend(s)?;
    }
    Ok(basis)
}

/// Orthonormalizes `inputs` and applies the same linear combinations to
/// `outputs`.
///
/// When `outputs[i] = U inputs[i]` for a unitary `U`, the returned output
/// basis satisfies `f_i = U e_i`, so the pair defines the partial isometry
/// that `U` induces on the input span.
pub fn orthonormalize_paired(inputs: &[PureState], outputs: &[PureState]) -> Result<(SubspaceBasis, SubspaceBasis)> {
    if inputs.len() != outputs.len() {
        return Err(Error::DimensionMismatch { expected: inputs.len(), actual: outputs.len() });
    }
    let Some(first) = inputs.first() else {
        return Err(Error::Precondition("orthonormalize needs at least one state".into()));
    };
    let dim = first.dim();
    let mut ins: Vec<PureState> = Vec::new();
    let mut outs: Vec<PureState> = Vec::new();
    for (x, y) in inputs.iter().zip(outputs) {
        check_size(dim.size(), x.size())?;
        check_size(dim.size(), y.size())?;
        let mut rx = x.amplitudes().to_vec();
        let mut ry = y.amplitudes().to_vec();
        for _ in 0..2 {
            for (e, f) in ins.iter().zip(&outs) {
                let c = inner(e.amplitudes(), &rx);
                for ((a, b), (ea, fa)) in
                    rx.iter_mut().zip(ry.iter_mut()).zip(e.amplitudes().iter().zip(f.amplitudes()))
                {
                    *a -= c * ea;
                    *b -= c * fa;
                }
            }
        }
        let nx = norm_sqr(&rx).sqrt();
        if nx < RANK_TOL || ins.len() >= dim.size() {
            continue;
        }
        rx.iter_mut().for_each(|z| *z /= nx);
        ry.iter_mut().for_each(|z| *z /= nx);
        ins.push(PureState::normalized(rx)?);
        // Renormalizing absorbs round-off; the norm is 1 up to that.
        outs.push(PureState::normalized(ry)?);
    }
    Ok((SubspaceBasis::from_orthonormal_unchecked(dim, ins), SubspaceBasis::from_orthonormal_unchecked(dim, outs)))
}

/// `||Pi phi||^2 = sum_i |<e_i|phi>|^2`.
pub fn subspace_overlap(phi: &PureState, basis: &SubspaceBasis) -> Result<f64> {
    check_size(basis.dim.size(), phi.size())?;
    let w: f64 = basis.vectors.iter().map(|e| e.inner(phi).norm_sqr()).sum();
    Ok(w.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{haar_random_state, haar_random_unitary, ALGEBRAIC_TOL};
    use crate::seed::SeedStream;
    use proptest::prelude::*;

    fn d(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn max_gram_defect(b: &SubspaceBasis) -> f64 {
        let v = b.vectors();
        let mut worst: f64 = 0.0;
        for i in 0..v.len() {
            for j in 0..v.len() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v[i].inner(&v[j]) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn duplicates_collapse() {
        let zero = PureState::basis(d(1), 0);
        let b = orthonormalize(&[zero.clone(), zero]).unwrap();
        assert_eq!(b.d(), 1);
    }

    #[test]
    fn zero_and_plus_span_the_qubit() {
        let zero = PureState::basis(d(1), 0);
        let plus = PureState::normalized(vec![C64::new(1.0, 0.0); 2]).unwrap();
        let b = orthonormalize(&[zero, plus]).unwrap();
        assert_eq!(b.d(), 2);
        let second = &b.vectors()[1];
        assert!(second.amplitudes()[0].norm() < 1e-12);
        assert!((second.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generic_haar_states_are_independent() {
        let mut rng = SeedStream::new(10).rng();
        let states: Vec<_> = (0..20).map(|_| haar_random_state(d(10), &mut rng)).collect();
        let b = orthonormalize(&states).unwrap();
        assert_eq!(b.d(), 20);
        assert!(max_gram_defect(&b) < ALGEBRAIC_TOL);
    }

    #[test]
    fn overlap_in_span_and_orthogonal() {
        let mut rng = SeedStream::new(12).rng();
        let states: Vec<_> = (0..3).map(|_| haar_random_state(d(4), &mut rng)).collect();
        let b = orthonormalize(&states).unwrap();
        for s in &states {
            assert!((subspace_overlap(s, &b).unwrap() - 1.0).abs() < 1e-10);
        }
        let perp = b.complement_haar_state(&mut rng).unwrap();
        assert!(subspace_overlap(&perp, &b).unwrap() < 1e-20);
    }

    #[test]
    fn full_basis_overlap_is_one() {
        let mut rng = SeedStream::new(13).rng();
        let dim = d(4);
        let states: Vec<_> = (0..dim.size()).map(|_| haar_random_state(dim, &mut rng)).collect();
        let b = orthonormalize(&states).unwrap();
        assert_eq!(b.d(), dim.size());
        let phi = haar_random_state(dim, &mut rng);
        assert!((subspace_overlap(&phi, &b).unwrap() - 1.0).abs() < 1e-9);
        assert!(b.complement_haar_state(&mut rng).is_err());
    }

    #[test]
    fn haar_overlap_mean_is_dimension_ratio() {
        // ||Pi phi||^2 ~ Beta(d, D-d): mean d/D, var d(D-d)/(D^2 (D+1))
        let mut rng = SeedStream::new(14).rng();
        let (dim, k) = (d(6), 8usize);
        let size = dim.size() as f64;
        let states: Vec<_> = (0..k).map(|_| haar_random_state(dim, &mut rng)).collect();
        let b = orthonormalize(&states).unwrap();
        let trials = 100_000;
        let mean = (0..trials).map(|_| subspace_overlap(&haar_random_state(dim, &mut rng), &b).unwrap()).sum::<f64>()
            / trials as f64;
        let kf = k as f64;
        let sigma = (kf * (size - kf) / (size * size * (size + 1.0)) / trials as f64).sqrt();
        assert!((mean - kf / size).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn paired_basis_is_the_induced_isometry() {
        let mut rng = SeedStream::new(15).rng();
        let dim = d(5);
        let u = haar_random_unitary(dim, &mut rng);
        let mut ins: Vec<_> = (0..6).map(|_| haar_random_state(dim, &mut rng)).collect();
        ins.push(ins[0].clone());
        let outs: Vec<_> = ins.iter().map(|s| u.apply(s)).collect();
        let (bi, bo) = orthonormalize_paired(&ins, &outs).unwrap();
        assert_eq!(bi.d(), 6);
        assert_eq!(bo.d(), 6);
        for (e, f) in bi.vectors().iter().zip(bo.vectors()) {
            assert!((u.apply(e).inner(f).re - 1.0).abs() < 1e-10);
        }
        assert!(max_gram_defect(&bo) < ALGEBRAIC_TOL);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reorthonormalizing_is_idempotent(seed in any::<u64>(), k in 1usize..12) {
            let mut rng = SeedStream::new(seed).rng();
            let dim = d(3);
            let states: Vec<_> = (0..k).map(|_| haar_random_state(dim, &mut rng)).collect();
            let b = orthonormalize(&states).unwrap();
            prop_assert_eq!(b.d(), k.min(dim.size()));
            let again = orthonormalize(b.vectors()).unwrap();
            prop_assert_eq!(again.d(), b.d());
            for v in b.vectors() {
                prop_assert!((subspace_overlap(v, &again).unwrap() - 1.0).abs() < 1e-10);
            }
        }

        #[test]
        fn unitaries_preserve_norm_and_fidelity(seed in any::<u64>(), n in 1u32..6) {
            let mut rng = SeedStream::new(seed).rng();
            let dim = d(n);
            let u = haar_random_unitary(dim, &mut rng);
            let a = haar_random_state(dim, &mut rng);
            let b = haar_random_state(dim, &mut rng);
            let (ua, ub) = (u.apply(&a), u.apply(&b));
            prop_assert!((ua.norm() - 1.0).abs() < 1e-10);
            let f0 = crate::qstate::fidelity(&a, &b).unwrap();
            let f1 = crate::qstate::fidelity(&ua, &ub).unwrap();
            prop_assert!((f0 - f1).abs() < 1e-10);
        }

        #[test]
        fn fidelity_is_symmetric(seed in any::<u64>()) {
            let mut rng = SeedStream::new(seed).rng();
            let a = haar_random_state(d(3), &mut rng);
            let b = haar_random_state(d(3), &mut rng);
            let ab = crate::qstate::fidelity(&a, &b).unwrap();
            let ba = crate::qstate::fidelity(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-14);
            prop_assert!((0.0..=1.0).contains(&ab));
        }
    }
}
