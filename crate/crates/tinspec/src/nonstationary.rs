//! k-out-of-n averaged Tin for general (non-Toeplitz) covariance
//! matrices: the mean, over all k-subsets S, of (1/k) tr{C_S^{-1}}.

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::covariance::{TinValue, SINGULARITY_RTOL};
use crate::error::{Result, TinError};
use crate::linalg::{pairwise_sum, Cholesky};

/// Largest n for which all C(n, k) subsets are enumerated exactly.
pub const EXACT_ENUMERATION_CAP: usize = 20;

/// Symmetric PSD matrix of a possibly non-stationary process.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralCovariance {
    m: DMatrix<f64>,
}

impl GeneralCovariance {
    /// Validates symmetry and positive semidefiniteness (eigenvalues down
    /// to roundoff below zero are accepted).
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(TinError::EmptySequence);
        }
        let scale = m.amax().max(f64::MIN_POSITIVE);
        if (m.transpose() - &m).amax() > 1e-12 * scale {
            return Err(TinError::NotPositiveSemidefinite);
        }
        let min_eig = m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-9 * scale {
            return Err(TinError::NotPositiveSemidefinite);
        }
        Ok(Self { m })
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    fn submatrix(&self, s: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(s.len(), s.len(), |a, b| self.m[(s[a], s[b])])
    }

    /// (1/k) tr{C_S^{-1}} for one subset, +inf when C_S is singular.
    fn subset_tin(&self, s: &[usize], scale: f64) -> TinValue {
        let chol = Cholesky::factor(&self.submatrix(s));
        if chol.min_pivot() <= SINGULARITY_RTOL * scale {
            TinValue::Infinite
        } else {
            TinValue::Finite(chol.trace_inverse() / s.len() as f64)
        }
    }

    fn diag_scale(&self) -> f64 {
        self.m.diagonal().iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE)
    }
}

/// Exact k-of-n averaged Tin: mean over all C(n, k) subsets of the
/// normalized Tin of the subset covariance; +inf if any subset is
/// singular. Requires n <= EXACT_ENUMERATION_CAP.
pub fn k_of_n_tin(c: &GeneralCovariance, k: usize) -> Result<TinValue> {
    let n = c.n();
    if k == 0 || k > n {
        return Err(TinError::BadSubsetSize { k, n });
    }
    if n > EXACT_ENUMERATION_CAP {
        return Err(TinError::OrderOutOfRange { requested: n, available: EXACT_ENUMERATION_CAP });
    }
    let scale = c.diag_scale();
    let mut terms = Vec::new();
    for s in (0..n).combinations(k) {
        match c.subset_tin(&s, scale) {
            TinValue::Infinite => return Ok(TinValue::Infinite),
            TinValue::Finite(t) => terms.push(t),
        }
    }
    Ok(TinValue::Finite(pairwise_sum(&terms) / terms.len() as f64))
}

/// Monte-Carlo estimate of the k-of-n Tin from uniformly sampled
/// subsets, with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledTin {
    pub estimate: TinValue,
    pub std_error: f64,
    pub n_samples: usize,
}

/// Uniform-subset sampling estimator for n beyond the enumeration cap.
/// A singular sampled subset makes the estimate +inf immediately.
pub fn k_of_n_tin_sampled(
    c: &GeneralCovariance,
    k: usize,
    n_samples: usize,
    seed: u64,
) -> Result<SampledTin> {
    let n = c.n();
    if k == 0 || k > n {
        return Err(TinError::BadSubsetSize { k, n });
    }
    if n_samples == 0 {
        return Err(TinError::Parse("sample count must be positive".into()));
    }
    let scale = c.diag_scale();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut terms = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let mut s: Vec<usize> = sample(&mut rng, n, k).into_iter().collect();
        s.sort_unstable();
        match c.subset_tin(&s, scale) {
            TinValue::Infinite => {
                return Ok(SampledTin {
                    estimate: TinValue::Infinite,
                    std_error: f64::INFINITY,
                    n_samples,
                })
            }
            TinValue::Finite(t) => terms.push(t),
        }
    }
    let mean = pairwise_sum(&terms) / n_samples as f64;
    let var = if n_samples > 1 {
        terms.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n_samples - 1) as f64
    } else {
        0.0
    };
    Ok(SampledTin {
        estimate: TinValue::Finite(mean),
        std_error: (var / n_samples as f64).sqrt(),
        n_samples,
    })
}

/// True iff the k-of-n Tin is non-decreasing in k over 1..n.
pub fn check_subset_monotonicity(c: &GeneralCovariance) -> Result<bool> {
    let mut prev = k_of_n_tin(c, 1)?;
    for k in 2..=c.n() {
        let cur = k_of_n_tin(c, k)?;
        match (prev, cur) {
            (TinValue::Infinite, TinValue::Finite(_)) => return Ok(false),
            (TinValue::Finite(a), TinValue::Finite(b)) if b < a - 1e-9 * a.abs().max(1.0) => {
                return Ok(false);
            }
            _ => {}
        }
        prev = cur;
    }
    Ok(true)
}

/// Both sides of the subset counting identity behind the monotonicity
/// proof: summing the normalized subset Tins of all k-element
/// sub-subsets of every (k+1)-subset counts each k-subset exactly
/// (n - k) times. Returns (lhs, rhs).
pub fn counting_identity_sides(c: &GeneralCovariance, k: usize) -> Result<(f64, f64)> {
    let n = c.n();
    if k + 1 > n || k == 0 {
        return Err(TinError::BadSubsetSize { k, n });
    }
    if n > 12 {
        return Err(TinError::OrderOutOfRange { requested: n, available: 12 });
    }
    // lhs: over |S| = k+1, over i in S, over the k-subset S \ {i}:
    // (1/k) tr of the inverse of C_{S \ {i}}.
    let mut lhs = 0.0;
    for s in (0..n).combinations(k + 1) {
        for drop in 0..s.len() {
            let sub: Vec<usize> = s.iter().enumerate().filter(|(a, _)| *a != drop).map(|(_, &i)| i).collect();
            let chol = Cholesky::factor(&c.submatrix(&sub));
            lhs += chol.trace_inverse() / k as f64;
        }
    }
    // rhs: (n - k) times the plain sum over |S| = k.
    let mut rhs = 0.0;
    for s in (0..n).combinations(k) {
        let chol = Cholesky::factor(&c.submatrix(&s));
        rhs += chol.trace_inverse() / k as f64;
    }
    rhs *= (n - k) as f64;
    Ok((lhs, rhs))
}
