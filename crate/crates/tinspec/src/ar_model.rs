//! Autoregressive models: Yule-Walker fitting, covariance extension,
//! explicit inverse-covariance formulas, and one-/two-sided prediction
//! LMMSEs.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::covariance::{CovarianceSequence, SINGULARITY_RTOL};
use crate::error::{Result, TinError};
use crate::linalg;

/// Roots must satisfy |root| < 1 - STABILITY_MARGIN.
pub const STABILITY_MARGIN: f64 = 1e-9;

/// AR(p) model: coefficients a_0 = 1, a_1..a_p and excitation variance
/// sigma_w2, with sum_l a_l X_{i-l} = W_i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArModel {
    #[serde(rename = "a")]
    coeffs: Vec<f64>,
    sigma_w2: f64,
}

impl ArModel {
    /// Validates a_0 = 1, sigma_w2 > 0, and stability.
    pub fn new(coeffs: Vec<f64>, sigma_w2: f64) -> Result<Self> {
        if coeffs.is_empty() || coeffs[0] != 1.0 {
            return Err(TinError::BadLeadingCoefficient(coeffs.first().copied().unwrap_or(f64::NAN)));
        }
        if sigma_w2 <= 0.0 || sigma_w2.is_nan() {
            return Err(TinError::NonPositiveExcitationVariance(sigma_w2));
        }
        let model = Self { coeffs, sigma_w2 };
        if !roots_strictly_within(&model.coeffs, 1.0 - STABILITY_MARGIN) {
            return Err(TinError::UnstableModel { modulus: model.max_root_modulus() });
        }
        Ok(model)
    }

    /// Build a (guaranteed stable) model from reflection coefficients in
    /// (-1, 1) via the Levinson step-up recursion.
    pub fn from_reflection(ks: &[f64], sigma_w2: f64) -> Result<Self> {
        if ks.iter().any(|k| k.abs() >= 1.0) {
            return Err(TinError::Parse("reflection coefficients must lie in (-1,1)".into()));
        }
        let mut a = vec![1.0];
        for &k in ks {
            let prev = a.clone();
            a.push(0.0);
            let m = prev.len();
            for i in 1..=m {
                a[i] = prev.get(i).copied().unwrap_or(0.0) + k * prev[m - i];
            }
        }
        Self::new(a, sigma_w2)
    }

    /// a_0..a_p.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// a_l with the convention a_l = 0 for l > p.
    pub fn coeff(&self, l: usize) -> f64 {
        self.coeffs.get(l).copied().unwrap_or(0.0)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn sigma_w2(&self) -> f64 {
        self.sigma_w2
    }

    /// Largest root modulus of z^p + a_1 z^{p-1} + ... + a_p, found by
    /// bisecting the Schur-Cohn radius test (robust where iterative
    /// eigensolvers stall, e.g. on nilpotent companion matrices).
    fn max_root_modulus(&self) -> f64 {
        if self.order() == 0 {
            return 0.0;
        }
        // Cauchy bound: all roots lie within 1 + max |a_l|.
        let mut lo = 0.0;
        let mut hi = 1.0 + self.coeffs[1..].iter().fold(0.0f64, |m, a| m.max(a.abs()));
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if roots_strictly_within(&self.coeffs, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Autocovariances c_0..c_{max_lag} implied by the model.
    ///
    /// Lags 0..p come from the linear system
    /// sum_l a_l c_{|k-l|} = sigma_w2 * delta_k, k = 0..p; later lags from
    /// the AR recursion.
    pub fn autocovariances(&self, max_lag: usize) -> Vec<f64> {
        let p = self.order();
        if p == 0 {
            let mut c = vec![0.0; max_lag + 1];
            c[0] = self.sigma_w2;
            return c;
        }
        let mut m = DMatrix::zeros(p + 1, p + 1);
        for k in 0..=p {
            for l in 0..=p {
                m[(k, k.abs_diff(l))] += self.coeffs[l];
            }
        }
        let mut rhs = DVector::zeros(p + 1);
        rhs[0] = self.sigma_w2;
        let head = m.lu().solve(&rhs).expect("stable AR model has solvable covariance system");
        let mut c: Vec<f64> = head.iter().copied().collect();
        while c.len() <= max_lag {
            let k = c.len();
            let next = -(1..=p).map(|l| self.coeffs[l] * c[k - l]).sum::<f64>();
            c.push(next);
        }
        c.truncate(max_lag + 1);
        c
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: ArModel = serde_json::from_str(s).map_err(|e| TinError::Parse(e.to_string()))?;
        Self::new(raw.coeffs, raw.sigma_w2)
    }
}

/// Schur-Cohn (Jury) test: true iff every root of the monic polynomial
/// z^p + a_1 z^{p-1} + ... + a_p has modulus < rho. Scaling the l-th
/// coefficient by rho^{-l} maps the radius-rho disk to the unit disk.
fn roots_strictly_within(coeffs: &[f64], rho: f64) -> bool {
    let p = coeffs.len() - 1;
    if p == 0 {
        return true;
    }
    let mut b: Vec<f64> = coeffs.iter().enumerate().map(|(l, c)| c / rho.powi(l as i32)).collect();
    if b.iter().any(|v| !v.is_finite()) {
        return false;
    }
    for m in (1..=p).rev() {
        let k = b[m];
        if k.abs() >= 1.0 {
            return false;
        }
        let denom = 1.0 - k * k;
        let prev = b.clone();
        for i in 1..m {
            b[i] = (prev[i] - k * prev[m - i]) / denom;
        }
    }
    true
}

/// True iff all roots of A(z) lie strictly inside the unit circle.
pub fn is_stable(coeffs: &[f64], sigma_w2: f64) -> bool {
    ArModel::new(coeffs.to_vec(), sigma_w2).is_ok()
}

/// Fit an AR(p) model to lags c_0..c_p by solving the Yule-Walker system
/// C_{p+1} (a_0..a_p)^T = sigma_w2 e_1 as a dense symmetric solve.
pub fn yule_walker_fit(seq: &CovarianceSequence) -> Result<ArModel> {
    let p = seq.len() - 1;
    let c0 = seq.c0();
    // C_{p+1} must be PD.
    let full = DMatrix::from_fn(p + 1, p + 1, |i, j| seq.lag(i.abs_diff(j)));
    linalg::factor_pd(&full, SINGULARITY_RTOL * c0)?;
    if p == 0 {
        return ArModel::new(vec![1.0], c0);
    }
    let c_p = DMatrix::from_fn(p, p, |i, j| seq.lag(i.abs_diff(j)));
    let cbar = DVector::from_fn(p, |i, _| seq.lag(i + 1));
    let chol = linalg::factor_pd(&c_p, SINGULARITY_RTOL * c0)?;
    let abar = -chol.solve(&cbar);
    let sigma_w2 = c0 + abar.dot(&cbar);
    let mut coeffs = vec![1.0];
    coeffs.extend(abar.iter());
    ArModel::new(coeffs, sigma_w2)
}

/// Extend known lags c_0..c_p by the AR recursion
/// c_k = -sum_{l=1}^p a_l c_{k-l} up to lag n.
pub fn ar_extend_covariance(model: &ArModel, c_known: &[f64], n: usize) -> Result<CovarianceSequence> {
    let p = model.order();
    if c_known.len() < p + 1 {
        return Err(TinError::OrderOutOfRange { requested: p + 1, available: c_known.len() });
    }
    let mut c = c_known.to_vec();
    while c.len() <= n {
        let k = c.len();
        let next = -(1..=p).map(|l| model.coeff(l) * c[k - l]).sum::<f64>();
        c.push(next);
    }
    c.truncate(n + 1);
    CovarianceSequence::new(c)
}

/// Explicit inverse of the model's order-n Toeplitz covariance:
/// [C_n^{-1}]_{ij} sigma_w2 = sum_{l=0}^{i-1} a_l a_{l+j-i}
///                          - sum_{l=n+1-j}^{n+i-j} a_l a_{l+j-i},
/// for 1 <= i <= j <= n (a_l = 0 beyond p), symmetric completion below.
pub fn gohberg_semencul_inverse(model: &ArModel, n: usize) -> Result<DMatrix<f64>> {
    if n < model.order() {
        return Err(TinError::OrderOutOfRange { requested: model.order(), available: n });
    }
    let sw2 = model.sigma_w2();
    let a = |l: i64| -> f64 {
        if l < 0 {
            0.0
        } else {
            model.coeff(l as usize)
        }
    };
    let mut out = DMatrix::zeros(n, n);
    for i in 1..=n as i64 {
        for j in i..=n as i64 {
            let d = j - i;
            let mut v = 0.0;
            for l in 0..i {
                v += a(l) * a(l + d);
            }
            for l in (n as i64 + 1 - j)..=(n as i64 + i - j) {
                v -= a(l) * a(l + d);
            }
            v /= sw2;
            out[((i - 1) as usize, (j - 1) as usize)] = v;
            out[((j - 1) as usize, (i - 1) as usize)] = v;
        }
    }
    Ok(out)
}

/// Closed-form normalized Tin of the model's C_n:
/// M_n = (1/sigma_w2) sum_{l=0}^{n} (1 - 2l/n) a_l^2.
pub fn ar_normalized_tin(model: &ArModel, n: usize) -> Result<f64> {
    if n < model.order() {
        return Err(TinError::OrderOutOfRange { requested: model.order(), available: n });
    }
    let mut s = 0.0;
    for l in 0..=n {
        let al = model.coeff(l);
        s += (1.0 - 2.0 * l as f64 / n as f64) * al * al;
    }
    Ok(s / model.sigma_w2())
}

/// One-sided and two-sided prediction LMMSEs of the model:
/// OSP = sigma_w2, TSP = sigma_w2 / sum_l a_l^2.
pub fn ar_osp_tsp_lmmse(model: &ArModel) -> (f64, f64) {
    let sum_sq: f64 = model.coeffs().iter().map(|a| a * a).sum();
    (model.sigma_w2(), model.sigma_w2() / sum_sq)
}
