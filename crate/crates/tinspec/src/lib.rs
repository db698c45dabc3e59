//! Trace-inverse (Tin) analysis of stationary covariance matrices.
//!
//! The normalized Tin of an n-th order Toeplitz covariance matrix,
//! M_n = (1/n) tr{C_n^{-1}}, equals the average reciprocal leave-one-out
//! LMMSE of the n samples and is monotonically non-decreasing in n. This
//! crate computes Tin sequences, one-/two-sided prediction LMMSEs, AR and
//! root-AR models, spectral limits, and covariance completions that
//! extremize the Tin (maximum-entropy, minimum-Tin, and maximum-Tin
//! extensions), plus the k-out-of-n subset average for non-stationary
//! covariances.

pub mod ar_model;
pub mod completion;
pub mod covariance;
pub mod error;
mod linalg;
pub mod lmmse;
pub mod nonstationary;
mod optim;
pub mod spectrum;

pub use ar_model::ArModel;
pub use completion::{CompletionMethod, CompletionResult, MaxTinVariant, RarFitParams};
pub use covariance::{CovarianceSequence, TinValue, ToeplitzCovariance};
pub use error::{Result, TinError};
pub use nonstationary::GeneralCovariance;
pub use spectrum::{RarSpectrum, SpectrumGrid};
