//! Covariance sequences, Toeplitz covariance matrices, and the normalized
//! trace-inverse ("Tin") of their leading orders.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TinError};
use crate::linalg::{self, Cholesky};

/// A matrix counts as singular when its smallest Cholesky pivot is at or
/// below this fraction of c_0 (scale-invariant).
pub const SINGULARITY_RTOL: f64 = 1e-12;

/// Slack allowed below zero when deciding whether a sequence is admissible
/// (its Toeplitz matrices positive semidefinite).
pub const ADMISSIBILITY_RTOL: f64 = 1e-9;

/// Normalized trace-inverse value: finite, or +inf for a singular matrix.
///
/// Kept as a tagged value rather than an IEEE infinity so monotonicity
/// comparisons are explicit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TinValue {
    Finite(f64),
    Infinite,
}

impl TinValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, TinValue::Infinite)
    }

    /// Finite value, or IEEE +inf.
    pub fn to_f64(&self) -> f64 {
        match self {
            TinValue::Finite(v) => *v,
            TinValue::Infinite => f64::INFINITY,
        }
    }

    /// 1/M_n, with 1/inf = 0 (the harmonic-mean LMMSE reading).
    pub fn reciprocal(&self) -> f64 {
        match self {
            TinValue::Finite(v) => 1.0 / v,
            TinValue::Infinite => 0.0,
        }
    }
}

impl PartialOrd for TinValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for TinValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TinValue::Finite(v) => write!(f, "{v}"),
            TinValue::Infinite => write!(f, "inf"),
        }
    }
}

/// A finite run c_0..c_{m-1} of autocovariances of a zero-mean WSS process.
///
/// Construction validates admissibility: c_0 > 0 and the order-m Toeplitz
/// matrix PSD (its principal submatrices then are as well).
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSequence {
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CovarianceSequenceJson {
    c: Vec<f64>,
}

impl CovarianceSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(TinError::EmptySequence);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(TinError::Parse("non-finite covariance value".into()));
        }
        let c0 = values[0];
        if c0 <= 0.0 {
            return Err(TinError::NonPositiveVariance(c0));
        }
        let m = values.len();
        let min_eig = linalg::min_eigenvalue(&toeplitz_matrix(&values, m));
        if min_eig < -ADMISSIBILITY_RTOL * c0 {
            return Err(TinError::Inadmissible { order: m, min_eig });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn c0(&self) -> f64 {
        self.values[0]
    }

    /// c_l for 0 <= l < len.
    pub fn lag(&self, l: usize) -> f64 {
        self.values[l]
    }

    /// `{"c": [...]}`
    pub fn to_json(&self) -> String {
        serde_json::to_string(&CovarianceSequenceJson { c: self.values.clone() }).unwrap()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let parsed: CovarianceSequenceJson =
            serde_json::from_str(s).map_err(|e| TinError::Parse(e.to_string()))?;
        Self::new(parsed.c)
    }

    /// CSV with a `lag,value` header, one lag per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lag,value\n");
        for (l, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{l},{v:.12e}\n"));
        }
        out
    }

    pub fn from_csv(s: &str) -> Result<Self> {
        let mut values = Vec::new();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with("lag") {
                continue;
            }
            let mut parts = line.split(',');
            let lag: usize = parts
                .next()
                .and_then(|p| p.trim().parse().ok())
                .ok_or_else(|| TinError::Parse(format!("bad CSV line: {line}")))?;
            let value: f64 = parts
                .next()
                .and_then(|p| p.trim().parse().ok())
                .ok_or_else(|| TinError::Parse(format!("bad CSV line: {line}")))?;
            if lag != values.len() {
                return Err(TinError::Parse(format!(
                    "lags must be consecutive from 0, got {lag} at position {}",
                    values.len()
                )));
            }
            values.push(value);
        }
        Self::new(values)
    }
}

/// Symmetric Toeplitz covariance matrix C_n with entry (i,j) = c_{|i-j|}.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzCovariance {
    bands: Vec<f64>,
}

impl ToeplitzCovariance {
    pub fn order(&self) -> usize {
        self.bands.len()
    }

    pub fn c0(&self) -> f64 {
        self.bands[0]
    }

    /// Entry (i,j) = c_{|i-j|}.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.bands[i.abs_diff(j)]
    }

    /// First row c_0..c_{n-1}.
    pub fn bands(&self) -> &[f64] {
        &self.bands
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        toeplitz_matrix(&self.bands, self.bands.len())
    }
}

fn toeplitz_matrix(c: &[f64], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| c[i.abs_diff(j)])
}

/// Build C_n from the first n lags of a sequence.
pub fn toeplitz_from_sequence(seq: &CovarianceSequence, n: usize) -> Result<ToeplitzCovariance> {
    if n < 1 || n > seq.len() {
        return Err(TinError::OrderOutOfRange { requested: n, available: seq.len() });
    }
    Ok(ToeplitzCovariance { bands: seq.values()[..n].to_vec() })
}

/// True iff the smallest Cholesky pivot exceeds tol * c_0.
pub fn is_positive_definite(m: &ToeplitzCovariance, tol: f64) -> bool {
    Cholesky::factor(&m.matrix()).min_pivot() > tol * m.c0()
}

/// Normalized Tin M_n = tr(C_n^{-1}) / n, or +inf when C_n is singular.
pub fn normalized_tin(m: &ToeplitzCovariance) -> Result<TinValue> {
    let chol = Cholesky::factor(&m.matrix());
    let pivot = chol.min_pivot();
    let c0 = m.c0();
    if pivot < -ADMISSIBILITY_RTOL * c0 {
        Err(TinError::NotPositiveSemidefinite)
    } else if pivot <= SINGULARITY_RTOL * c0 {
        Ok(TinValue::Infinite)
    } else {
        Ok(TinValue::Finite(chol.trace_inverse() / m.order() as f64))
    }
}

/// M_1..M_{n_max}. Once a singular order is hit every later order is
/// singular too, so the tail is filled with +inf without refactoring.
pub fn tin_sequence(seq: &CovarianceSequence, n_max: usize) -> Result<Vec<TinValue>> {
    if n_max < 1 || n_max > seq.len() {
        return Err(TinError::OrderOutOfRange { requested: n_max, available: seq.len() });
    }
    let mut out = Vec::with_capacity(n_max);
    let mut singular = false;
    for n in 1..=n_max {
        if singular {
            out.push(TinValue::Infinite);
            continue;
        }
        let t = normalized_tin(&toeplitz_from_sequence(seq, n)?)?;
        if t.is_infinite() {
            singular = true;
        }
        out.push(t);
    }
    debug_assert!(out.windows(2).all(|w| {
        w[1].to_f64() >= w[0].to_f64() * (1.0 - 1e-9) || w[1].is_infinite()
    }));
    Ok(out)
}

/// The four blocks of M^{-1} for a symmetric PD matrix split after row n1.
#[derive(Debug, Clone)]
pub struct BlockInverse {
    pub top_left: DMatrix<f64>,
    pub top_right: DMatrix<f64>,
    pub bottom_left: DMatrix<f64>,
    pub bottom_right: DMatrix<f64>,
}

impl BlockInverse {
    pub fn assemble(&self) -> DMatrix<f64> {
        let n1 = self.top_left.nrows();
        let n2 = self.bottom_right.nrows();
        let mut out = DMatrix::zeros(n1 + n2, n1 + n2);
        out.view_mut((0, 0), (n1, n1)).copy_from(&self.top_left);
        out.view_mut((0, n1), (n1, n2)).copy_from(&self.top_right);
        out.view_mut((n1, 0), (n2, n1)).copy_from(&self.bottom_left);
        out.view_mut((n1, n1), (n2, n2)).copy_from(&self.bottom_right);
        out
    }
}

/// Blockwise inverse via Schur complements: the diagonal blocks of M^{-1}
/// are the inverses of the Schur complements of the opposite diagonal
/// blocks, and the off-diagonal blocks follow as -A_11^{-1} A_12 (M\A_11)^{-1}.
pub fn partitioned_inverse(m: &DMatrix<f64>, n1: usize) -> Result<BlockInverse> {
    let n = m.nrows();
    if n1 < 1 || n1 >= n {
        return Err(TinError::BadSplit { split: n1, order: n });
    }
    let n2 = n - n1;
    let a11 = m.view((0, 0), (n1, n1)).into_owned();
    let a12 = m.view((0, n1), (n1, n2)).into_owned();
    let a21 = m.view((n1, 0), (n2, n1)).into_owned();
    let a22 = m.view((n1, n1), (n2, n2)).into_owned();

    let scale = m.diagonal().amax();
    let a11_inv = crate::linalg::factor_pd(&a11, SINGULARITY_RTOL * scale)?.inverse();
    let a22_inv = crate::linalg::factor_pd(&a22, SINGULARITY_RTOL * scale)?.inverse();

    // Schur complements of A_22 and A_11 in M.
    let s22 = &a11 - &a12 * &a22_inv * &a21;
    let s11 = &a22 - &a21 * &a11_inv * &a12;
    let s22_inv = crate::linalg::factor_pd(&s22, SINGULARITY_RTOL * scale)?.inverse();
    let s11_inv = crate::linalg::factor_pd(&s11, SINGULARITY_RTOL * scale)?.inverse();

    Ok(BlockInverse {
        top_right: -&a11_inv * &a12 * &s11_inv,
        bottom_left: -&a22_inv * &a21 * &s22_inv,
        top_left: s22_inv,
        bottom_right: s11_inv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn seq(v: &[f64]) -> CovarianceSequence {
        CovarianceSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn toeplitz_construction() {
        let t = toeplitz_from_sequence(&seq(&[2.0]), 1).unwrap();
        assert_eq!(t.matrix(), DMatrix::from_row_slice(1, 1, &[2.0]));

        let t = toeplitz_from_sequence(&seq(&[1.0, 0.5]), 2).unwrap();
        assert_eq!(t.matrix(), DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]));

        let s = seq(&[1.0, 0.6054, 0.1324, 0.0904]);
        let t = toeplitz_from_sequence(&s, 4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(t.entry(i, j), s.lag(i.abs_diff(j)));
            }
        }
        assert!(toeplitz_from_sequence(&s, 5).is_err());
        assert!(toeplitz_from_sequence(&s, 0).is_err());
    }

    #[test]
    fn positive_definiteness() {
        let ident = toeplitz_from_sequence(&seq(&[1.0, 0.0, 0.0]), 3).unwrap();
        assert!(is_positive_definite(&ident, 1e-10));
        let rank1 = toeplitz_from_sequence(&seq(&[1.0, 1.0]), 2).unwrap();
        assert!(!is_positive_definite(&rank1, 1e-10));
        let paper = toeplitz_from_sequence(&seq(&[1.0, 0.6054, 0.1324, 0.0904]), 4).unwrap();
        assert!(is_positive_definite(&paper, 1e-10));
    }

    #[test]
    fn normalized_tin_white_and_singular() {
        let white = toeplitz_from_sequence(&seq(&[2.0, 0.0, 0.0]), 3).unwrap();
        assert_relative_eq!(normalized_tin(&white).unwrap().to_f64(), 0.5, max_relative = 1e-12);

        let rank1 = toeplitz_from_sequence(&seq(&[1.0, 1.0]), 2).unwrap();
        assert!(normalized_tin(&rank1).unwrap().is_infinite());
    }

    #[test]
    fn normalized_tin_matches_eigenvalue_route() {
        let t = toeplitz_from_sequence(&seq(&[1.0, 0.6054, 0.1324, 0.0904]), 4).unwrap();
        let tin = normalized_tin(&t).unwrap().to_f64();
        let eigs = t.matrix().symmetric_eigen().eigenvalues;
        let via_eigs = eigs.iter().map(|l| 1.0 / l).sum::<f64>() / 4.0;
        assert_relative_eq!(tin, via_eigs, max_relative = 1e-10);
    }

    #[test]
    fn tin_sequence_white_is_constant() {
        let s = seq(&[2.0, 0.0, 0.0, 0.0]);
        let ms = tin_sequence(&s, 4).unwrap();
        for m in ms {
            assert_relative_eq!(m.to_f64(), 0.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn tin_sequence_singular_tail() {
        let s = seq(&[1.0, 1.0, 1.0]);
        let ms = tin_sequence(&s, 3).unwrap();
        assert_eq!(ms[0], TinValue::Finite(1.0));
        assert!(ms[1].is_infinite());
        assert!(ms[2].is_infinite());
    }

    #[test]
    fn inadmissible_sequence_rejected() {
        assert!(CovarianceSequence::new(vec![1.0, 2.0]).is_err());
        assert!(CovarianceSequence::new(vec![-1.0]).is_err());
        assert!(CovarianceSequence::new(vec![]).is_err());
    }

    #[test]
    fn partitioned_inverse_small_cases() {
        let d = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 5.0]);
        let b = partitioned_inverse(&d, 1).unwrap();
        assert_relative_eq!(b.top_left[(0, 0)], 0.5, max_relative = 1e-14);
        assert_relative_eq!(b.bottom_right[(0, 0)], 0.2, max_relative = 1e-14);
        assert_eq!(b.top_right[(0, 0)], 0.0);

        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let b = partitioned_inverse(&m, 1).unwrap();
        assert_relative_eq!(b.top_left[(0, 0)], 4.0 / 3.0, max_relative = 1e-12);
        let direct = m.try_inverse().unwrap();
        assert!((b.assemble() - direct).amax() < 1e-12);
    }

    #[test]
    fn serialization_round_trip() {
        let s = seq(&[1.0, 0.6054, 0.1324, 0.0904]);
        assert_eq!(CovarianceSequence::from_json(&s.to_json()).unwrap(), s);
        let back = CovarianceSequence::from_csv(&s.to_csv()).unwrap();
        for (a, b) in back.values().iter().zip(s.values()) {
            assert_relative_eq!(a, b, max_relative = 1e-10);
        }
    }
}
