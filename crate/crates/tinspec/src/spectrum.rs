//! Sampled power spectral densities, numerical iDTFT, spectral means, and
//! infinite-order prediction quantities.
//!
//! The grid is f_k = -1/2 + k/n for k = 0..n-1. On the periodic frequency
//! domain this uniform grid is the midpoint rule, exact for trigonometric
//! polynomials up to the grid order; it also contains f = -1/2 and f = 0,
//! so comb-type spectral zeros land on grid points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ar_model::ArModel;
use crate::covariance::{CovarianceSequence, TinValue};
use crate::error::{Result, TinError};
use crate::linalg::pairwise_sum;

/// Default number of frequency samples.
pub const DEFAULT_GRID: usize = 1 << 14;

/// A spectrum "touches zero" when min S < this fraction of its mean.
pub const SPECTRUM_ZERO_RTOL: f64 = 1e-12;

/// Power spectral density sampled on the uniform grid over [-1/2, 1/2).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    values: Vec<f64>,
}

impl SpectrumGrid {
    /// Wrap raw samples; rejects negative values and asymmetric spectra
    /// (S(f) = S(-f) must hold for a real process).
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(TinError::InvalidSpectrum("empty grid".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(TinError::InvalidSpectrum("values must be finite and >= 0".into()));
        }
        let n = values.len();
        let scale = values.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for k in 1..n {
            let mirror = n - k;
            if (values[k] - values[mirror % n]).abs() > 1e-9 * scale {
                return Err(TinError::InvalidSpectrum("grid is not even-symmetric".into()));
            }
        }
        Ok(Self { values })
    }

    /// Evaluate `s(f)` on the grid; tiny negative excursions (roundoff on
    /// spectra with exact zeros) are clamped to 0.
    pub fn from_fn(n_grid: usize, s: impl Fn(f64) -> f64) -> Result<Self> {
        let raw: Vec<f64> = (0..n_grid).map(|k| s(frequency(k, n_grid))).collect();
        let scale = raw.iter().cloned().fold(0.0, f64::max);
        let clamped = raw
            .into_iter()
            .map(|v| {
                if v < 0.0 && v > -1e-12 * scale {
                    0.0
                } else {
                    v
                }
            })
            .collect();
        Self::from_values(clamped)
    }

    /// Finite DTFT of a covariance run: S(f) = c_0 + 2 sum_l c_l cos(2 pi l f).
    pub fn from_covariances(c: &[f64], n_grid: usize) -> Result<Self> {
        Self::from_fn(n_grid, |f| {
            let mut s = c[0];
            for (l, cl) in c.iter().enumerate().skip(1) {
                s += 2.0 * cl * (std::f64::consts::TAU * l as f64 * f).cos();
            }
            s
        })
    }

    pub fn n_grid(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn frequency(&self, k: usize) -> f64 {
        frequency(k, self.values.len())
    }

    /// Arithmetic mean of the grid (the quadrature of the integral of S,
    /// i.e. c_0).
    pub fn arithmetic_mean(&self) -> f64 {
        pairwise_sum(&self.values) / self.values.len() as f64
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn touches_zero(&self) -> bool {
        self.min_value() < SPECTRUM_ZERO_RTOL * self.arithmetic_mean()
    }

    /// `f,S` CSV; optionally with `log_S` and `inv_S` columns for the
    /// log/inverse scale plots (ln 0 and 1/0 rendered as inf markers).
    pub fn to_csv(&self, with_scales: bool) -> String {
        let mut out = String::from(if with_scales { "f,S,log_S,inv_S\n" } else { "f,S\n" });
        for (k, v) in self.values.iter().enumerate() {
            let f = self.frequency(k);
            if with_scales {
                let log_s = if *v > 0.0 { format!("{:.12e}", v.ln()) } else { "-inf".into() };
                let inv_s = if *v > 0.0 { format!("{:.12e}", 1.0 / v) } else { "inf".into() };
                out.push_str(&format!("{f:.12e},{v:.12e},{log_s},{inv_s}\n"));
            } else {
                out.push_str(&format!("{f:.12e},{v:.12e}\n"));
            }
        }
        out
    }
}

fn frequency(k: usize, n: usize) -> f64 {
    -0.5 + k as f64 / n as f64
}

/// "Root-AR" spectrum: reciprocal square root of a positive cosine
/// polynomial, in either coefficient or pole form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RarSpectrum {
    /// S(f) = 1 / sqrt(sum_l lambda_l cos(2 pi l f)).
    Coefficients(Vec<f64>),
    /// S(f) = gamma / prod_k |1 - xi_k e^{-j 2 pi f}|.
    Poles { gamma: f64, poles: Vec<Complex64> },
}

impl RarSpectrum {
    /// Pole form with validation: gamma > 0, |xi| < 1, complex poles in
    /// conjugate pairs.
    pub fn from_poles(gamma: f64, poles: Vec<Complex64>) -> Result<Self> {
        if gamma <= 0.0 || gamma.is_nan() {
            return Err(TinError::InvalidSpectrum(format!("gamma must be > 0, got {gamma}")));
        }
        if poles.iter().any(|p| p.norm() >= 1.0) {
            return Err(TinError::InvalidSpectrum("poles must lie strictly inside the unit disk".into()));
        }
        // Conjugate closure: every pole with nonzero imaginary part needs a partner.
        let mut unmatched: Vec<Complex64> = Vec::new();
        for p in poles.iter().filter(|p| p.im.abs() > 1e-12) {
            if let Some(pos) = unmatched.iter().position(|q| (q.conj() - p).norm() < 1e-9) {
                unmatched.swap_remove(pos);
            } else {
                unmatched.push(*p);
            }
        }
        if !unmatched.is_empty() {
            return Err(TinError::InvalidSpectrum("complex poles must come in conjugate pairs".into()));
        }
        Ok(RarSpectrum::Poles { gamma, poles })
    }

    pub fn from_coefficients(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(TinError::InvalidSpectrum("empty coefficient set".into()));
        }
        Ok(RarSpectrum::Coefficients(lambdas))
    }

    /// Number of covariance constraints the spectrum can carry (m).
    pub fn order_plus_one(&self) -> usize {
        match self {
            RarSpectrum::Coefficients(l) => l.len(),
            RarSpectrum::Poles { poles, .. } => poles.len() + 1,
        }
    }

    /// Coefficient form of 1/S^2. For poles this is the autocorrelation of
    /// the real polynomial prod_k (1 - xi_k x), scaled by 1/gamma^2.
    pub fn to_coefficients(&self) -> Vec<f64> {
        match self {
            RarSpectrum::Coefficients(l) => l.clone(),
            RarSpectrum::Poles { gamma, poles } => {
                let mut poly = vec![Complex64::new(1.0, 0.0)];
                for xi in poles {
                    let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
                    for (i, c) in poly.iter().enumerate() {
                        next[i] += c;
                        next[i + 1] -= c * xi;
                    }
                    poly = next;
                }
                let p: Vec<f64> = poly.iter().map(|c| c.re).collect();
                let m = p.len();
                let g2 = gamma * gamma;
                (0..m)
                    .map(|k| {
                        let s: f64 = (0..m - k).map(|l| p[l] * p[l + k]).sum();
                        if k == 0 {
                            s / g2
                        } else {
                            2.0 * s / g2
                        }
                    })
                    .collect()
            }
        }
    }

    /// Point evaluation; negative cosine polynomials yield NaN in the
    /// coefficient form (caught when building a grid).
    pub fn evaluate(&self, f: f64) -> f64 {
        match self {
            RarSpectrum::Coefficients(lambdas) => {
                let mut q = 0.0;
                for (l, lam) in lambdas.iter().enumerate() {
                    q += lam * (std::f64::consts::TAU * l as f64 * f).cos();
                }
                1.0 / q.sqrt()
            }
            RarSpectrum::Poles { gamma, poles } => {
                let z = Complex64::from_polar(1.0, -std::f64::consts::TAU * f);
                let denom: f64 = poles.iter().map(|xi| (Complex64::new(1.0, 0.0) - xi * z).norm()).product();
                gamma / denom
            }
        }
    }
}

/// Spectrum of an AR model: sigma_w2 / sum_k lambda_k cos(2 pi k f) with
/// lambda_0 = sum a_l^2 and lambda_k = 2 sum a_l a_{l+k}.
pub fn psd_from_ar(model: &ArModel, n_grid: usize) -> SpectrumGrid {
    let lambdas = ar_cosine_coefficients(model);
    let sw2 = model.sigma_w2();
    SpectrumGrid::from_fn(n_grid, |f| {
        let mut q = 0.0;
        for (k, lam) in lambdas.iter().enumerate() {
            q += lam * (std::f64::consts::TAU * k as f64 * f).cos();
        }
        sw2 / q
    })
    .expect("stable AR spectrum is positive")
}

/// lambda_0..lambda_p of the AR denominator cosine polynomial |A|^2.
pub fn ar_cosine_coefficients(model: &ArModel) -> Vec<f64> {
    let p = model.order();
    (0..=p)
        .map(|k| {
            let s: f64 = (0..=p - k).map(|l| model.coeff(l) * model.coeff(l + k)).sum();
            if k == 0 {
                s
            } else {
                2.0 * s
            }
        })
        .collect()
}

/// Sample a RAR spectrum on the grid.
pub fn psd_rar(spec: &RarSpectrum, n_grid: usize) -> Result<SpectrumGrid> {
    if let RarSpectrum::Coefficients(lambdas) = spec {
        for k in 0..n_grid {
            let f = frequency(k, n_grid);
            let q: f64 = lambdas
                .iter()
                .enumerate()
                .map(|(l, lam)| lam * (std::f64::consts::TAU * l as f64 * f).cos())
                .sum();
            if q <= 0.0 {
                return Err(TinError::InvalidSpectrum(format!(
                    "cosine polynomial nonpositive at f = {f}"
                )));
            }
        }
    }
    SpectrumGrid::from_fn(n_grid, |f| spec.evaluate(f))
}

/// Numerical iDTFT: c_l = integral of S cos(2 pi l f) df on the grid.
pub fn idtft_covariances(s: &SpectrumGrid, max_lag: usize) -> Result<CovarianceSequence> {
    let n = s.n_grid() as f64;
    let mut c = Vec::with_capacity(max_lag + 1);
    for l in 0..=max_lag {
        let terms: Vec<f64> = s
            .values()
            .iter()
            .enumerate()
            .map(|(k, v)| v * (std::f64::consts::TAU * l as f64 * s.frequency(k)).cos())
            .collect();
        c.push(pairwise_sum(&terms) / n);
    }
    CovarianceSequence::new(c)
}

/// M_inf = integral df / S: the reciprocal harmonic mean of the grid, or
/// +inf when the spectrum touches zero.
pub fn m_infinity(s: &SpectrumGrid) -> TinValue {
    if s.touches_zero() {
        return TinValue::Infinite;
    }
    let recips: Vec<f64> = s.values().iter().map(|v| 1.0 / v).collect();
    TinValue::Finite(pairwise_sum(&recips) / s.n_grid() as f64)
}

/// One-sided prediction LMMSE: geometric mean exp(integral log S df);
/// 0 for a spectrum touching zero.
pub fn osp_lmmse_szego(s: &SpectrumGrid) -> f64 {
    if s.touches_zero() {
        return 0.0;
    }
    let logs: Vec<f64> = s.values().iter().map(|v| v.ln()).collect();
    (pairwise_sum(&logs) / s.n_grid() as f64).exp()
}

/// One-sided and two-sided prediction gains
/// (0.5 log(c_0 / OSP), 0.5 log(c_0 / TSP)); the TSP gain is +inf when
/// the spectrum touches zero.
pub fn prediction_gains(s: &SpectrumGrid) -> (f64, f64) {
    let c0 = s.arithmetic_mean();
    let osp = osp_lmmse_szego(s);
    let osp_gain = if osp > 0.0 { 0.5 * (c0 / osp).ln() } else { f64::INFINITY };
    let tsp_gain = match m_infinity(s) {
        TinValue::Finite(m) => 0.5 * (c0 * m).ln(),
        TinValue::Infinite => f64::INFINITY,
    };
    (osp_gain, tsp_gain)
}
