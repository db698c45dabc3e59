//! Linear MMSE estimation of one sample from an arbitrary index set, and
//! the correspondence between inverse-covariance diagonals and LMMSEs.
//!
//! Indices are 0-based positions into a run of consecutive samples; all
//! second-order information comes from the stationary covariance sequence.

use nalgebra::{DMatrix, DVector};

use crate::covariance::{CovarianceSequence, TinValue, ToeplitzCovariance, SINGULARITY_RTOL};
use crate::error::{Result, TinError};
use crate::linalg::{self, Cholesky};

/// A sorted set of distinct sample indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(TinError::Parse("index set contains duplicates".into()));
        }
        Ok(Self { indices })
    }

    /// All indices of [0, n) except `i`.
    pub fn all_but(n: usize, i: usize) -> Self {
        Self { indices: (0..n).filter(|&j| j != i).collect() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// The set with one more index.
    pub fn with(&self, i: usize) -> Result<Self> {
        let mut v = self.indices.clone();
        v.push(i);
        Self::new(v)
    }
}

fn check_span(seq: &CovarianceSequence, indices: &[usize]) -> Result<()> {
    let lo = indices.iter().min().copied().unwrap_or(0);
    let hi = indices.iter().max().copied().unwrap_or(0);
    if hi - lo >= seq.len() {
        return Err(TinError::IndexOutOfBounds { index: hi - lo, bound: seq.len() });
    }
    Ok(())
}

fn cov_submatrix(seq: &CovarianceSequence, s: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(s.len(), s.len(), |a, b| seq.lag(s[a].abs_diff(s[b])))
}

fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    m.clone().symmetric_eigen().eigenvalues.iter().filter(|&&l| l > tol).count()
}

/// LMMSE of estimating X_i from the samples indexed by `s`:
/// c_ii - r^T C_S^{-1} r, computed with a Cholesky solve.
///
/// A singular C_S is resolved by rank: if X_i lies in the span of X_S the
/// error is exactly 0, otherwise the input is reported as degenerate.
pub fn lmmse(seq: &CovarianceSequence, i: usize, s: &IndexSet) -> Result<f64> {
    if s.contains(i) {
        return Ok(0.0);
    }
    let mut all = s.indices().to_vec();
    all.push(i);
    check_span(seq, &all)?;
    if s.is_empty() {
        return Ok(seq.c0());
    }
    let c_s = cov_submatrix(seq, s.indices());
    let r = DVector::from_fn(s.len(), |a, _| seq.lag(s.indices()[a].abs_diff(i)));
    let chol = Cholesky::factor(&c_s);
    if chol.min_pivot() <= SINGULARITY_RTOL * seq.c0() {
        let tol = SINGULARITY_RTOL * seq.c0() * all.len() as f64;
        let joint = cov_submatrix(seq, &all);
        if rank(&joint, tol) == rank(&c_s, tol) {
            return Ok(0.0);
        }
        return Err(TinError::DegenerateInput);
    }
    let x = chol.solve(&r);
    Ok((seq.c0() - r.dot(&x)).max(0.0))
}

/// Diagonal of M^{-1}; by the inverse-diagonal/LMMSE correspondence the
/// i-th entry equals 1/LMMSE(i | all others).
pub fn inverse_diagonal_reciprocals(m: &ToeplitzCovariance) -> Result<Vec<f64>> {
    let chol = linalg::factor_pd(&m.matrix(), SINGULARITY_RTOL * m.c0())?;
    Ok(chol.inverse().diagonal().iter().copied().collect())
}

/// Normalized Tin as the mean of the reciprocal leave-one-out LMMSEs.
pub fn tin_via_lmmse(m: &ToeplitzCovariance) -> Result<TinValue> {
    let n = m.order();
    let seq = CovarianceSequence::new(m.bands().to_vec())?;
    let mut recips = Vec::with_capacity(n);
    for i in 0..n {
        let e = lmmse(&seq, i, &IndexSet::all_but(n, i))?;
        if e <= SINGULARITY_RTOL * m.c0() {
            return Ok(TinValue::Infinite);
        }
        recips.push(1.0 / e);
    }
    Ok(TinValue::Finite(linalg::pairwise_sum(&recips) / n as f64))
}

/// Checks that leave-one-out LMMSEs cannot increase when a sample is
/// appended at either end of the window (order n vs n+1).
pub fn check_lmmse_monotonicity(seq: &CovarianceSequence, n: usize) -> Result<bool> {
    if n + 1 > seq.len() {
        return Err(TinError::OrderOutOfRange { requested: n + 1, available: seq.len() });
    }
    let slack = 1e-9 * seq.c0();
    for i in 0..n {
        let base = lmmse(seq, i, &IndexSet::all_but(n, i))?;
        let grown = lmmse(seq, i, &IndexSet::all_but(n + 1, i))?;
        let shifted = lmmse(seq, i + 1, &IndexSet::all_but(n + 1, i + 1))?;
        if base < grown - slack || base < shifted - slack {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::{normalized_tin, toeplitz_from_sequence};
    use approx::assert_relative_eq;

    fn seq(v: &[f64]) -> CovarianceSequence {
        CovarianceSequence::new(v.to_vec()).unwrap()
    }

    /// AR(1) with a_1 = -0.5, sigma_w2 = 1: c_l = (4/3) 0.5^l.
    fn ar1_seq(len: usize) -> CovarianceSequence {
        seq(&(0..len).map(|l| 4.0 / 3.0 * 0.5f64.powi(l as i32)).collect::<Vec<_>>())
    }

    #[test]
    fn white_process_lmmse_is_c0() {
        let s = seq(&[2.0, 0.0, 0.0, 0.0]);
        for i in 0..4 {
            let e = lmmse(&s, i, &IndexSet::all_but(4, i)).unwrap();
            assert_relative_eq!(e, 2.0, max_relative = 1e-12);
        }
        assert_relative_eq!(
            lmmse(&s, 1, &IndexSet::new(vec![]).unwrap()).unwrap(),
            2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn ar1_interior_two_sided() {
        // Estimating the middle sample from both neighbors: sigma^2/(1+a^2).
        let s = ar1_seq(3);
        let e = lmmse(&s, 1, &IndexSet::new(vec![0, 2]).unwrap()).unwrap();
        assert_relative_eq!(e, 0.8, max_relative = 1e-12);
    }

    #[test]
    fn inverse_diagonal_matches_lmmse() {
        let s = seq(&[1.0, 0.6054, 0.1324, 0.0904]);
        let t = toeplitz_from_sequence(&s, 4).unwrap();
        let diag = inverse_diagonal_reciprocals(&t).unwrap();
        for (i, d) in diag.iter().enumerate() {
            let e = lmmse(&s, i, &IndexSet::all_but(4, i)).unwrap();
            assert_relative_eq!(*d, 1.0 / e, max_relative = 1e-10);
        }
    }

    #[test]
    fn inverse_diagonal_two_by_two() {
        let t = toeplitz_from_sequence(&seq(&[1.0, 0.5]), 2).unwrap();
        let diag = inverse_diagonal_reciprocals(&t).unwrap();
        assert_relative_eq!(diag[0], 4.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(diag[1], 4.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn tin_via_lmmse_matches_definition() {
        let s = seq(&[1.0, 0.6054, 0.1324, 0.0904]);
        let t = toeplitz_from_sequence(&s, 4).unwrap();
        let a = normalized_tin(&t).unwrap().to_f64();
        let b = tin_via_lmmse(&t).unwrap().to_f64();
        assert_relative_eq!(a, b, max_relative = 1e-10);

        let white = toeplitz_from_sequence(&seq(&[2.0, 0.0]), 2).unwrap();
        assert_relative_eq!(tin_via_lmmse(&white).unwrap().to_f64(), 0.5, max_relative = 1e-12);

        let sing = toeplitz_from_sequence(&seq(&[1.0, 1.0]), 2).unwrap();
        assert!(tin_via_lmmse(&sing).unwrap().is_infinite());
    }

    #[test]
    fn singular_span_gives_zero() {
        // Fully correlated pair: X_1 is in the span of X_0.
        let s = seq(&[1.0, 1.0]);
        let e = lmmse(&s, 1, &IndexSet::new(vec![0]).unwrap()).unwrap();
        assert!(e.abs() < 1e-12);
    }

    #[test]
    fn monotonicity_white_and_ar1() {
        let s = seq(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(check_lmmse_monotonicity(&s, 3).unwrap());
        let s = ar1_seq(6);
        assert!(check_lmmse_monotonicity(&s, 4).unwrap());
    }
}
