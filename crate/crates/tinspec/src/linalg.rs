//! Dense symmetric linear algebra helpers.
//!
//! Everything here is O(n^3) Cholesky-based; matrix sizes are desk-scale
//! so no structured (Levinson-type) solvers are used on the baseline path.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, TinError};

/// Cholesky factorization that keeps going past tiny pivots so the caller
/// can apply its own scale-relative singularity rule.
pub(crate) struct Cholesky {
    /// Lower factor L with L L^T = A (valid only if `min_pivot` is positive).
    l: DMatrix<f64>,
    /// Smallest diagonal pivot d_k = L_kk^2 encountered (may be <= 0).
    min_pivot: f64,
}

impl Cholesky {
    /// Factor a symmetric matrix. Stops early only on a non-finite or
    /// negative pivot; a tiny positive pivot is recorded, not rejected.
    pub fn factor(a: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        let mut l = a.lower_triangle();
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let mut d = l[(k, k)];
            for j in 0..k {
                d -= l[(k, j)] * l[(k, j)];
            }
            min_pivot = min_pivot.min(d);
            if d <= 0.0 || d.is_nan() {
                // Leave the rest of the factor unusable; min_pivot tells the story.
                return Self { l, min_pivot };
            }
            let lkk = d.sqrt();
            l[(k, k)] = lkk;
            for i in (k + 1)..n {
                let mut s = l[(i, k)];
                for j in 0..k {
                    s -= l[(i, j)] * l[(k, j)];
                }
                l[(i, k)] = s / lkk;
            }
        }
        Self { l, min_pivot }
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    /// Solve A x = b in place. Caller must have checked `min_pivot`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.l.nrows();
        let mut x = b.clone();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.l[(i, j)] * x[j];
            }
            x[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.l[(j, i)] * x[j];
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    /// Full inverse via n unit-vector solves.
    pub fn inverse(&self) -> DMatrix<f64> {
        let n = self.l.nrows();
        let mut inv = DMatrix::zeros(n, n);
        for j in 0..n {
            let e = DVector::from_fn(n, |i, _| if i == j { 1.0 } else { 0.0 });
            inv.set_column(j, &self.solve(&e));
        }
        // Symmetrize away solve roundoff.
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                inv[(i, j)] = v;
                inv[(j, i)] = v;
            }
        }
        inv
    }

    /// Trace of A^{-1} without forming the full inverse:
    /// tr A^{-1} = ||L^{-1}||_F^2.
    pub fn trace_inverse(&self) -> f64 {
        let n = self.l.nrows();
        let mut total = 0.0;
        for j in 0..n {
            // Column j of L^{-1} by forward substitution.
            let mut col = vec![0.0; n];
            col[j] = 1.0 / self.l[(j, j)];
            for i in (j + 1)..n {
                let mut s = 0.0;
                for (k, ck) in col.iter().enumerate().take(i).skip(j) {
                    s -= self.l[(i, k)] * ck;
                }
                col[i] = s / self.l[(i, i)];
            }
            total += col[j..].iter().map(|v| v * v).sum::<f64>();
        }
        total
    }
}

/// Factor a symmetric PD matrix, rejecting pivots at or below
/// `singular_threshold` (absolute, same scale as the matrix entries).
pub(crate) fn factor_pd(a: &DMatrix<f64>, singular_threshold: f64) -> Result<Cholesky> {
    let chol = Cholesky::factor(a);
    if chol.min_pivot() <= singular_threshold {
        Err(TinError::Singular)
    } else {
        Ok(chol)
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub(crate) fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    a.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Pairwise (cascade) summation: deterministic and accumulation-order stable.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cholesky_solve_matches_direct() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let chol = factor_pd(&a, 0.0).unwrap();
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let x = chol.solve(&b);
        let r = &a * &x - &b;
        assert!(r.norm() < 1e-12);
        let inv = chol.inverse();
        assert_relative_eq!(chol.trace_inverse(), inv.trace(), max_relative = 1e-12);
    }

    #[test]
    fn singular_matrix_reports_tiny_pivot() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let chol = Cholesky::factor(&a);
        assert!(chol.min_pivot() <= 1e-12);
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (0..1001).map(|i| (i as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert_relative_eq!(pairwise_sum(&xs), naive, max_relative = 1e-12);
    }
}
