//! Covariance extension beyond a known prefix of lags, under competing
//! criteria:
//!
//! * MaxEnt: the AR recursion of the fitted model (maximum entropy rate).
//! * MinTin one step / greedy: the next lag minimizing the trace of the
//!   inverse of the implied next-order Toeplitz matrix, equivalently
//!   maximizing the fitted two-sided prediction LMMSE.
//! * MinTin at infinite order: a root-AR spectrum fit, which minimizes
//!   M_inf subject to the lag constraints.
//! * MA matching: a finite-support admissible sequence with the same
//!   prefix (triangular-window construction).
//! * MaxTin: a prefix-matching extension whose spectrum has exact zeros,
//!   so the Tin sequence diverges.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::ar_model::{ar_extend_covariance, yule_walker_fit, ArModel};
use crate::covariance::{CovarianceSequence, TinValue, SINGULARITY_RTOL};
use crate::error::{Result, TinError};
use crate::linalg::Cholesky;
use crate::optim::nelder_mead;
use crate::spectrum::{idtft_covariances, psd_rar, RarSpectrum, SpectrumGrid, DEFAULT_GRID};

/// Relative threshold below which the MinTin correction denominator is
/// treated as zero (the extension then coincides with MaxEnt).
const ALPHA_DEGENERACY_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletionMethod {
    Maxent,
    MintinStep,
    MintinGreedy,
    MintinRar,
    Maxtin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FittedModel {
    Ar(ArModel),
    Rar(RarSpectrum),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub residual: Option<f64>,
    pub iterations: usize,
}

/// An extended covariance sequence together with the method that produced
/// it. The stored lags always start with the given prefix exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionResult {
    pub method: CompletionMethod,
    pub covariances: Vec<f64>,
    pub model: Option<FittedModel>,
    pub diagnostics: Diagnostics,
}

impl CompletionResult {
    /// The extension as a validated sequence.
    pub fn sequence(&self) -> Result<CovarianceSequence> {
        CovarianceSequence::new(self.covariances.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }

    /// `lag,value` CSV of the extended covariances.
    pub fn covariances_csv(&self) -> String {
        let mut out = String::from("lag,value\n");
        for (l, v) in self.covariances.iter().enumerate() {
            out.push_str(&format!("{l},{v:.12e}\n"));
        }
        out
    }
}

/// Next covariance lag keeping the AR(p) fit of the prefix valid:
/// c_{p+1} = -sum_{l=1}^p a_l c_{p+1-l}.
pub fn maxent_next(seq: &CovarianceSequence) -> Result<f64> {
    let model = yule_walker_fit(seq)?;
    let p = seq.len() - 1;
    Ok(-(1..=p).map(|l| model.coeff(l) * seq.lag(p + 1 - l)).sum::<f64>())
}

/// Extend by the AR recursion up to lag `n_lags` (MaxEnt completion).
pub fn maxent_extend(seq: &CovarianceSequence, n_lags: usize) -> Result<CompletionResult> {
    let model = yule_walker_fit(seq)?;
    let ext = ar_extend_covariance(&model, seq.values(), n_lags)?;
    Ok(CompletionResult {
        method: CompletionMethod::Maxent,
        covariances: ext.values().to_vec(),
        model: Some(FittedModel::Ar(model)),
        diagnostics: Diagnostics { residual: None, iterations: 0 },
    })
}

/// Next covariance lag minimizing tr{C_{p+2}^{-1}}, equivalently
/// maximizing the fitted AR(p+1) two-sided prediction LMMSE:
/// c^MaxTSP = c^MaxEnt + (alpha - sign(alpha) sqrt(alpha^2 - 1)) sigma_w2,
/// alpha = sum_l a_l^2 / sum_{l=1}^p a_l a_{p+1-l}.
///
/// When the denominator vanishes (e.g. the prefix matches an AR(p') with
/// p' <= p/2) the result is exactly the MaxEnt lag.
pub fn mintin_next(seq: &CovarianceSequence) -> Result<f64> {
    let model = yule_walker_fit(seq)?;
    let p = seq.len() - 1;
    let base = -(1..=p).map(|l| model.coeff(l) * seq.lag(p + 1 - l)).sum::<f64>();
    let num: f64 = model.coeffs().iter().map(|a| a * a).sum();
    let den: f64 = (1..=p).map(|l| model.coeff(l) * model.coeff(p + 1 - l)).sum();
    if den.abs() <= ALPHA_DEGENERACY_RTOL * num {
        return Ok(base);
    }
    let alpha = num / den;
    if alpha.abs() < 1.0 {
        return Err(TinError::MintinDegeneracy { alpha });
    }
    let correction = (alpha - alpha.signum() * (alpha * alpha - 1.0).sqrt()) * model.sigma_w2();
    Ok(base + correction)
}

/// Repeatedly append the one-step MinTin lag up to lag `n_lags`.
pub fn greedy_mintin_extend(seq: &CovarianceSequence, n_lags: usize) -> Result<CompletionResult> {
    let mut c = seq.values().to_vec();
    let mut steps = 0;
    while c.len() <= n_lags {
        let cur = CovarianceSequence::new(c.clone())?;
        let next = if cur.len() == 1 { 0.0 } else { mintin_next(&cur)? };
        c.push(next);
        steps += 1;
    }
    c.truncate(n_lags + 1);
    CovarianceSequence::new(c.clone())?;
    Ok(CompletionResult {
        method: CompletionMethod::MintinGreedy,
        covariances: c,
        model: None,
        diagnostics: Diagnostics { residual: None, iterations: steps },
    })
}

/// Normalized Tin of C_{p+2} built from the prefix plus a trial lag,
/// via the rank-one bordering identity
/// tr{C_{p+2}^{-1}} = tr{C_{p+1}^{-1}}
///                  + (1 + cbar^T C^{-2} cbar) / (c_0 - cbar^T C^{-1} cbar)
/// with C = C_{p+1} and cbar = (c_1, ..., c_p, c_next).
/// Inadmissible trial lags give +inf.
pub fn mintin_step_tin_oracle(seq: &CovarianceSequence, c_next: f64) -> Result<TinValue> {
    let p = seq.len() - 1;
    let n = p + 1;
    let c0 = seq.c0();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| seq.lag(i.abs_diff(j)));
    let chol = Cholesky::factor(&m);
    if chol.min_pivot() <= SINGULARITY_RTOL * c0 {
        return Err(TinError::Singular);
    }
    let cbar = nalgebra::DVector::from_fn(n, |i, _| if i + 1 < n { seq.lag(i + 1) } else { c_next });
    let x = chol.solve(&cbar);
    let denom = c0 - cbar.dot(&x);
    if denom <= SINGULARITY_RTOL * c0 {
        return Ok(TinValue::Infinite);
    }
    let total = chol.trace_inverse() + (1.0 + x.dot(&x)) / denom;
    Ok(TinValue::Finite(total / (p + 2) as f64))
}

/// Solver controls for [`rar_fit`].
#[derive(Debug, Clone)]
pub struct RarFitParams {
    pub n_starts: usize,
    pub max_evals: usize,
    /// Converged when the lag residual norm < tol_rel * c_0.
    pub tol_rel: f64,
    pub seed: u64,
}

impl Default for RarFitParams {
    fn default() -> Self {
        Self { n_starts: 16, max_evals: 6000, tol_rel: 1e-8, seed: 0 }
    }
}

/// One local optimum of the fit.
#[derive(Debug, Clone)]
pub struct RarCandidate {
    pub spectrum: RarSpectrum,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct RarFitOutcome {
    /// Best fit (lowest residual; ties broken by parameter order).
    pub spectrum: RarSpectrum,
    pub residual: f64,
    pub evaluations: usize,
    /// All multi-start optima within the convergence tolerance.
    pub candidates: Vec<RarCandidate>,
}

/// Parameter layout for the pole-form search: log-gamma, then for each
/// conjugate/real-root pair the two Schur parameters of a monic quadratic
/// (covers both complex pairs and two distinct real poles), then an
/// optional single real pole. All pole parameters pass through tanh, so
/// every parameter vector maps to a stable spectrum.
fn params_to_spectrum(x: &[f64], n_pairs: usize, has_real: bool) -> RarSpectrum {
    let gamma = x[0].exp();
    let mut poles: Vec<Complex64> = Vec::with_capacity(2 * n_pairs + has_real as usize);
    for pair in 0..n_pairs {
        let k1 = x[1 + 2 * pair].tanh();
        let k2 = x[2 + 2 * pair].tanh();
        // Monic quadratic x^2 + b1 x + b2, Schur-stable for |k1|,|k2| < 1.
        let b1 = k1 * (1.0 + k2);
        let b2 = k2;
        let disc = Complex64::new(b1 * b1 - 4.0 * b2, 0.0).sqrt();
        poles.push((-Complex64::new(b1, 0.0) + disc) / 2.0);
        poles.push((-Complex64::new(b1, 0.0) - disc) / 2.0);
    }
    if has_real {
        poles.push(Complex64::new(x[x.len() - 1].tanh(), 0.0));
    }
    RarSpectrum::Poles { gamma, poles }
}

/// Fit the minimal-M_inf spectrum matching lags c_0..c_{m-1}: a root-AR
/// spectrum with m-1 poles, found by multi-start simplex search on the
/// pole-form parameters against the iDTFT lag residuals.
pub fn rar_fit(seq: &CovarianceSequence, n_grid: usize, params: &RarFitParams) -> Result<RarFitOutcome> {
    let m = seq.len();
    let c0 = seq.c0();
    let t = crate::covariance::toeplitz_from_sequence(seq, m)?;
    if !crate::covariance::is_positive_definite(&t, SINGULARITY_RTOL) {
        return Err(TinError::Singular);
    }
    let n_pairs = (m - 1) / 2;
    let has_real = (m - 1) % 2 == 1;
    let dim = 1 + 2 * n_pairs + has_real as usize;

    // Precomputed grid tables: unit-circle samples and cos(2 pi l f_k).
    let freqs: Vec<f64> = (0..n_grid).map(|k| -0.5 + k as f64 / n_grid as f64).collect();
    let zs: Vec<Complex64> =
        freqs.iter().map(|f| Complex64::from_polar(1.0, -std::f64::consts::TAU * f)).collect();
    let cos_table: Vec<Vec<f64>> = (0..m)
        .map(|l| freqs.iter().map(|f| (std::f64::consts::TAU * l as f64 * f).cos()).collect())
        .collect();

    let lag_residual = |spec: &RarSpectrum| -> f64 {
        let (gamma, poles) = match spec {
            RarSpectrum::Poles { gamma, poles } => (*gamma, poles),
            RarSpectrum::Coefficients(_) => unreachable!("search runs in pole form"),
        };
        let mut lags = vec![0.0; m];
        for (k, z) in zs.iter().enumerate() {
            let denom_sq: f64 = poles.iter().map(|xi| (Complex64::new(1.0, 0.0) - xi * z).norm_sqr()).product();
            let s = gamma / denom_sq.sqrt();
            for (lag, row) in lags.iter_mut().zip(&cos_table) {
                *lag += s * row[k];
            }
        }
        let scale = 1.0 / n_grid as f64;
        let mut r2 = 0.0;
        for (l, v) in lags.iter().enumerate() {
            let d = v * scale - seq.lag(l);
            r2 += d * d;
        }
        r2.sqrt()
    };
    let objective = |x: &[f64]| lag_residual(&params_to_spectrum(x, n_pairs, has_real));

    let target = params.tol_rel * c0;
    let mut rng = ChaCha12Rng::seed_from_u64(params.seed);
    let mut evaluations = 0usize;
    let mut results: Vec<(f64, Vec<f64>)> = Vec::new();
    for _ in 0..params.n_starts.max(1) {
        // Random poles with |xi| in [0.3, 0.995]; gamma scaled so the
        // initial spectrum has roughly the right power.
        let mut x0 = vec![0.0; dim];
        for pair in 0..n_pairs {
            let r: f64 = rng.random_range(0.3..0.995);
            let th: f64 = rng.random_range(0.05 * std::f64::consts::PI..0.95 * std::f64::consts::PI);
            let b1 = -2.0 * r * th.cos();
            let b2 = r * r;
            let k2 = b2;
            let k1 = b1 / (1.0 + b2);
            x0[1 + 2 * pair] = k1.clamp(-0.999, 0.999).atanh();
            x0[2 + 2 * pair] = k2.clamp(-0.999, 0.999).atanh();
        }
        if has_real {
            let r: f64 = rng.random_range(0.3..0.995);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            x0[dim - 1] = (sign * r).atanh();
        }
        // Match c_0 at the initial poles by rescaling gamma.
        x0[0] = 0.0;
        let spec0 = params_to_spectrum(&x0, n_pairs, has_real);
        let power = match psd_rar(&spec0, 512.max(n_grid / 16)) {
            Ok(s) => s.arithmetic_mean(),
            Err(_) => 1.0,
        };
        if power > 0.0 && power.is_finite() {
            x0[0] = (c0 / power).ln();
        }

        let mut x = x0;
        let mut best = f64::MAX;
        for step in [0.4, 0.1, 0.02] {
            let (xn, fx, ev) = nelder_mead(&objective, &x, step, params.max_evals, target);
            evaluations += ev;
            x = xn;
            best = fx;
            if best < target {
                break;
            }
        }
        results.push((best, x));
    }

    results.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then_with(|| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    });
    let (best_res, best_x) = results[0].clone();
    if best_res >= target {
        return Err(TinError::NonConvergence { residual: best_res, starts: params.n_starts });
    }
    let candidates = results
        .iter()
        .filter(|(r, _)| *r < target)
        .map(|(r, x)| RarCandidate {
            spectrum: params_to_spectrum(x, n_pairs, has_real),
            residual: *r,
        })
        .collect();
    Ok(RarFitOutcome {
        spectrum: params_to_spectrum(&best_x, n_pairs, has_real),
        residual: best_res,
        evaluations,
        candidates,
    })
}

/// Extend the prefix by the lags of the fitted minimal-M_inf spectrum.
/// The prefix itself is kept exactly; later lags come from the iDTFT.
pub fn rar_extend(
    seq: &CovarianceSequence,
    n_lags: usize,
    n_grid: usize,
    params: &RarFitParams,
) -> Result<CompletionResult> {
    let fit = rar_fit(seq, n_grid, params)?;
    let s = psd_rar(&fit.spectrum, n_grid)?;
    let ext = idtft_covariances(&s, n_lags)?;
    let mut c = ext.values().to_vec();
    let keep = seq.len().min(c.len());
    c[..keep].copy_from_slice(&seq.values()[..keep]);
    CovarianceSequence::new(c.clone())?;
    Ok(CompletionResult {
        method: CompletionMethod::MintinRar,
        covariances: c,
        model: Some(FittedModel::Rar(fit.spectrum)),
        diagnostics: Diagnostics { residual: Some(fit.residual), iterations: fit.evaluations },
    })
}

/// Finite-support admissible sequence matching lags c_0..c_{m-1}:
/// MA-equivalent covariance with support below `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaMatch {
    /// Support size: lags k and beyond are zero.
    pub support: usize,
    pub covariances: CovarianceSequence,
}

/// Match the prefix with a finite-support covariance: scale the lags by
/// k/(k-l) (admissible for large enough k by Gershgorin), fit an AR
/// model, extend to lag k-1, and apply the triangular window (k-l)/k.
/// The window cancels the scaling on the prefix, so the match is exact.
pub fn ma_match(seq: &CovarianceSequence) -> Result<MaMatch> {
    let m = seq.len();
    let c0 = seq.c0();
    let cap = 64 * m;
    for k in m..=cap {
        let scaled: Vec<f64> = (0..m).map(|l| seq.lag(l) * k as f64 / (k - l) as f64).collect();
        let scaled_seq = match CovarianceSequence::new(scaled) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let t = crate::covariance::toeplitz_from_sequence(&scaled_seq, m)?;
        if !crate::covariance::is_positive_definite(&t, 1e-9) {
            continue;
        }
        let model = match yule_walker_fit(&scaled_seq) {
            Ok(mo) => mo,
            Err(_) => continue,
        };
        let extended = match ar_extend_covariance(&model, scaled_seq.values(), k.saturating_sub(1)) {
            Ok(e) => e,
            Err(_) => continue,
        };
        let mut windowed: Vec<f64> =
            extended.values().iter().enumerate().map(|(l, v)| v * (k - l) as f64 / k as f64).collect();
        debug_assert!(windowed
            .iter()
            .zip(seq.values())
            .all(|(a, b)| (a - b).abs() <= 1e-12 * c0.max(1.0)));
        // The window cancels the scaling exactly on the prefix; make that
        // bitwise true.
        windowed[..m].copy_from_slice(seq.values());
        let cov = match CovarianceSequence::new(windowed) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if SpectrumGrid::from_covariances(cov.values(), DEFAULT_GRID).is_err() {
            continue;
        }
        return Ok(MaMatch { support: k, covariances: cov });
    }
    Err(TinError::MaSupportNotFound { cap })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxTinVariant {
    /// Periodize the finite-support covariance with period m+q; the
    /// process repeats itself, so C_n is singular beyond the period.
    Periodic,
    /// Pass the finite-support process through h = (delta_0 +
    /// delta_{m+q})/sqrt(2); the spectrum gains the factor
    /// 1 + cos(2 pi f (m+q)), with exact zeros.
    Comb,
}

/// Prefix-matching extension whose Tin sequence diverges: among all
/// admissible completions this attains the maximal (infinite) M_inf.
/// The output carries lags 0..4*(m+q).
pub fn maxtin_construct(seq: &CovarianceSequence, variant: MaxTinVariant) -> Result<CompletionResult> {
    let m = seq.len();
    let ma = ma_match(seq)?;
    let q = ma.support - 1;
    let period = m + q;
    let cma = |l: i64| -> f64 {
        let a = l.unsigned_abs() as usize;
        if a <= q {
            ma.covariances.lag(a)
        } else {
            0.0
        }
    };
    let n_lags = 4 * period;
    let c: Vec<f64> = (0..=n_lags as i64)
        .map(|l| match variant {
            MaxTinVariant::Comb => cma(l) + 0.5 * (cma(l - period as i64) + cma(l + period as i64)),
            MaxTinVariant::Periodic => {
                let span = l / period as i64 + 2;
                (-span..=span).map(|j| cma(l - j * period as i64)).sum()
            }
        })
        .collect();
    let cov = CovarianceSequence::new(c)?;
    Ok(CompletionResult {
        method: CompletionMethod::Maxtin,
        covariances: cov.values().to_vec(),
        model: None,
        diagnostics: Diagnostics { residual: None, iterations: 0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::{normalized_tin, tin_sequence, toeplitz_from_sequence};
    use crate::spectrum::m_infinity;
    use approx::assert_relative_eq;

    fn seq(v: &[f64]) -> CovarianceSequence {
        CovarianceSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn maxent_next_values() {
        assert_relative_eq!(maxent_next(&seq(&[2.0, 0.0])).unwrap(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(maxent_next(&seq(&[1.0, 0.5])).unwrap(), 0.25, max_relative = 1e-12);
    }

    #[test]
    fn maxent_extension_is_geometric() {
        let r = maxent_extend(&seq(&[1.0, 0.5]), 6).unwrap();
        for (l, v) in r.covariances.iter().enumerate() {
            assert_relative_eq!(*v, 0.5f64.powi(l as i32), max_relative = 1e-12);
        }
        assert_eq!(r.method, CompletionMethod::Maxent);
        assert!(matches!(r.model, Some(FittedModel::Ar(_))));
    }

    #[test]
    fn mintin_next_ar1_worked_case() {
        // a_1 = -0.5, sigma_w2 = 0.75, alpha = 1.25/0.25 = 5.
        let c2 = mintin_next(&seq(&[1.0, 0.5])).unwrap();
        let expect = 0.25 + (5.0 - 24.0f64.sqrt()) * 0.75;
        assert_relative_eq!(c2, expect, max_relative = 1e-12);
        assert!((c2 - 0.32577).abs() < 1e-4);
    }

    #[test]
    fn mintin_reduces_to_maxent_for_low_order_prefix() {
        // AR(1) lags given up to lag 2: a_2 = 0, so the correction
        // denominator vanishes and the result is the MaxEnt lag exactly.
        let s = seq(&[1.0, 0.5, 0.25]);
        let a = mintin_next(&s).unwrap();
        let b = maxent_next(&s).unwrap();
        assert_eq!(a, b);
        assert_relative_eq!(a, 0.125, max_relative = 1e-10);
    }

    #[test]
    fn mintin_beats_maxent_on_next_order_tin() {
        for s in [seq(&[1.0, 0.5]), seq(&[1.0, 0.6054, 0.1324, 0.0904]), seq(&[2.0, -0.7, 0.3])] {
            let n = s.len() + 1;
            let gm = greedy_mintin_extend(&s, n - 1).unwrap().sequence().unwrap();
            let me = maxent_extend(&s, n - 1).unwrap().sequence().unwrap();
            let tg = normalized_tin(&toeplitz_from_sequence(&gm, n).unwrap()).unwrap().to_f64();
            let tm = normalized_tin(&toeplitz_from_sequence(&me, n).unwrap()).unwrap().to_f64();
            assert!(tg <= tm + 1e-12, "{tg} > {tm}");
        }
    }

    #[test]
    fn greedy_on_white_is_zero() {
        let r = greedy_mintin_extend(&seq(&[3.0]), 5).unwrap();
        assert_eq!(&r.covariances[1..], &[0.0; 5]);
    }

    #[test]
    fn step_oracle_matches_direct_inverse() {
        let s = seq(&[1.0, 0.6054, 0.1324, 0.0904]);
        for c_next in [-0.1, 0.0, 0.05, 0.12] {
            let via_identity = mintin_step_tin_oracle(&s, c_next).unwrap().to_f64();
            let mut c = s.values().to_vec();
            c.push(c_next);
            let full = seq(&c);
            let direct = normalized_tin(&toeplitz_from_sequence(&full, 5).unwrap()).unwrap().to_f64();
            assert_relative_eq!(via_identity, direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn step_oracle_white_and_inadmissible() {
        let s = seq(&[2.0, 0.0, 0.0]);
        assert_relative_eq!(
            mintin_step_tin_oracle(&s, 0.0).unwrap().to_f64(),
            0.5,
            max_relative = 1e-12
        );
        // |c_next| > c_0 cannot extend a white prefix.
        assert!(mintin_step_tin_oracle(&s, 2.5).unwrap().is_infinite());
    }

    #[test]
    fn step_oracle_minimum_at_closed_form() {
        let s = seq(&[1.0, 0.5]);
        let star = mintin_next(&s).unwrap();
        let at_star = mintin_step_tin_oracle(&s, star).unwrap().to_f64();
        for d in [-0.05, -0.01, 0.01, 0.05] {
            let t = mintin_step_tin_oracle(&s, star + d).unwrap().to_f64();
            assert!(t >= at_star - 1e-12);
        }
    }

    #[test]
    fn rar_fit_white() {
        let out = rar_fit(&seq(&[2.0]), 1 << 10, &RarFitParams::default()).unwrap();
        let s = psd_rar(&out.spectrum, 1 << 10).unwrap();
        for v in s.values() {
            assert_relative_eq!(*v, 2.0, max_relative = 1e-6);
        }
    }

    #[test]
    fn rar_fit_recovers_duplicated_ar_pole() {
        // AR(1) lags up to lag 2 (m = 3 >= 2p'+1): the minimal-M_inf
        // spectrum is the AR(1) spectrum itself, i.e. pole 0.5 twice with
        // gamma = sigma_w2 = 1.
        let s = seq(&[4.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0]);
        let out = rar_fit(&s, 1 << 12, &RarFitParams::default()).unwrap();
        match &out.spectrum {
            RarSpectrum::Poles { gamma, poles } => {
                assert_eq!(poles.len(), 2);
                for p in poles {
                    assert!((p - Complex64::new(0.5, 0.0)).norm() < 1e-3, "pole {p}");
                }
                assert!((gamma - 1.0).abs() < 1e-3);
            }
            _ => panic!("expected pole form"),
        }
        let back = idtft_covariances(&psd_rar(&out.spectrum, 1 << 12).unwrap(), 2).unwrap();
        for l in 0..=2 {
            assert_relative_eq!(back.lag(l), s.lag(l), epsilon = 1e-7);
        }
    }

    #[test]
    fn rar_fit_deterministic() {
        let s = seq(&[1.0, 0.5]);
        let a = rar_fit(&s, 1 << 10, &RarFitParams::default()).unwrap();
        let b = rar_fit(&s, 1 << 10, &RarFitParams::default()).unwrap();
        assert_eq!(a.spectrum, b.spectrum);
        assert_eq!(a.residual, b.residual);
        assert!(!a.candidates.is_empty());
    }

    #[test]
    fn ma_match_white_and_ar1() {
        let w = ma_match(&seq(&[2.0, 0.0, 0.0])).unwrap();
        assert_eq!(w.support, 3);
        assert_eq!(w.covariances.values(), &[2.0, 0.0, 0.0]);

        let m = ma_match(&seq(&[1.0, 0.5])).unwrap();
        assert_eq!(m.covariances.lag(0), 1.0);
        assert_eq!(m.covariances.lag(1), 0.5);
        assert!(m.covariances.len() <= m.support);
        let s = SpectrumGrid::from_covariances(m.covariances.values(), 1 << 12).unwrap();
        assert!(s.min_value() >= 0.0);
    }

    #[test]
    fn maxtin_comb_on_white() {
        let r = maxtin_construct(&seq(&[2.0]), MaxTinVariant::Comb).unwrap();
        // m = 1, q = 0, period 1: lag 1 carries c_0/2, rest of prefix 0.
        assert_eq!(r.covariances[0], 2.0);
        assert_relative_eq!(r.covariances[1], 1.0, max_relative = 1e-14);
        let s = SpectrumGrid::from_covariances(&r.covariances, 1 << 10).unwrap();
        assert!(m_infinity(&s).is_infinite());
        // The comb spectrum has isolated zeros: every finite-order matrix
        // stays PD, but the Tin sequence keeps growing.
        let tins = tin_sequence(&r.sequence().unwrap(), r.covariances.len() - 1).unwrap();
        assert!(tins.iter().all(|t| !t.is_infinite()));
        assert!(tins.last().unwrap().to_f64() > tins[0].to_f64());
    }

    #[test]
    fn maxtin_periodic_singular_in_finite_order() {
        let r = maxtin_construct(&seq(&[1.0, 0.5]), MaxTinVariant::Periodic).unwrap();
        assert_eq!(r.covariances[0], 1.0);
        assert_eq!(r.covariances[1], 0.5);
        let tins = tin_sequence(&r.sequence().unwrap(), r.covariances.len() - 1).unwrap();
        assert!(tins.iter().any(|t| t.is_infinite()));
    }

    #[test]
    fn completion_result_serialization() {
        let r = maxent_extend(&seq(&[1.0, 0.5]), 4).unwrap();
        let json = r.to_json();
        assert!(json.contains("\"maxent\""));
        let back: CompletionResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let csv = r.covariances_csv();
        assert!(csv.starts_with("lag,value\n"));
        assert_eq!(csv.lines().count(), 6);
    }
}
