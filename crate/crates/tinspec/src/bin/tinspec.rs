//! Command-line surface: Tin sequences, covariance completions, spectra,
//! subset Tins, and MA matching, emitted as CSV or JSON.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use tinspec::ar_model::yule_walker_fit;
use tinspec::completion::{
    greedy_mintin_extend, ma_match, maxent_extend, maxtin_construct, rar_extend, MaxTinVariant,
    RarFitParams,
};
use tinspec::covariance::{tin_sequence, toeplitz_from_sequence};
use tinspec::nonstationary::{k_of_n_tin, k_of_n_tin_sampled, GeneralCovariance};
use tinspec::spectrum::{psd_from_ar, psd_rar, SpectrumGrid, DEFAULT_GRID};
use tinspec::{CovarianceSequence, TinError};

#[derive(Parser)]
#[command(name = "tinspec", version, about = "Trace-inverse analysis of stationary covariances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Covariance file: CSV (`lag,value` rows) or JSON (`{"c": [...]}`).
    #[arg(long, value_name = "PATH", conflicts_with = "c")]
    cov: Option<PathBuf>,
    /// Inline covariances, e.g. "1,0.6054,0.1324,0.0904".
    #[arg(long, value_name = "LAGS")]
    c: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Normalized Tin sequence M_1..M_n of the input covariances.
    Tin {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Largest matrix order (default: number of given lags).
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Extend the covariance prefix under a completion criterion.
    Complete {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, value_enum)]
        method: Method,
        /// Extend up to this lag.
        #[arg(long)]
        lags: usize,
        /// Frequency-grid size for the spectrum fit.
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Solver seed (overridden by TINSPEC_SEED).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Construction used by --method maxtin.
        #[arg(long, value_enum, default_value_t = Variant::Comb)]
        variant: Variant,
    },
    /// Power spectral density on a uniform frequency grid.
    Spectrum {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Spectral model fitted to the input lags.
        #[arg(long, value_enum, default_value_t = SpectrumModel::Maxent)]
        model: SpectrumModel,
        /// Solver seed (overridden by TINSPEC_SEED).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Omit the log_S and inv_S columns.
        #[arg(long)]
        no_scales: bool,
    },
    /// Average Tin over k-element subsets of the implied Toeplitz matrix.
    SubsetTin {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, short)]
        k: usize,
        /// Sample this many subsets instead of enumerating all of them.
        #[arg(long)]
        samples: Option<usize>,
        /// Sampling seed (overridden by TINSPEC_SEED).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Finite-support admissible covariance matching the prefix.
    MaMatch {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Maxent,
    MintinGreedy,
    MintinRar,
    Maxtin,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    Comb,
    Periodic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpectrumModel {
    /// AR spectrum of the Yule-Walker fit (maximum-entropy completion).
    Maxent,
    /// Root-AR spectrum of the minimal-M_inf fit.
    MintinRar,
    /// Finite DTFT of the given lags only.
    Dtft,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let solver_failure = matches!(
                e,
                TinError::NonConvergence { .. } | TinError::MaSupportNotFound { .. }
            );
            ExitCode::from(if solver_failure { 3 } else { 2 })
        }
    }
}

fn run(cli: Cli) -> tinspec::Result<()> {
    match cli.command {
        Command::Tin { input, output, n_max } => {
            let seq = read_input(&input)?;
            let n_max = n_max.unwrap_or(seq.len());
            let tins = tin_sequence(&seq, n_max)?;
            let monotone = tins.windows(2).all(|w| {
                w[1].is_infinite() || w[1].to_f64() >= w[0].to_f64() * (1.0 - 1e-9) - 1e-12
            });
            match output.format {
                Format::Csv => {
                    let mut s = String::from("n,M_n,inv_M_n\n");
                    for (i, t) in tins.iter().enumerate() {
                        s.push_str(&format!("{},{},{}\n", i + 1, sig(t.to_f64()), sig(t.reciprocal())));
                    }
                    s.push_str(&format!("# monotone,{monotone}\n"));
                    emit(&output, &s)
                }
                Format::Json => {
                    let rows: Vec<serde_json::Value> = tins
                        .iter()
                        .enumerate()
                        .map(|(i, t)| {
                            serde_json::json!({
                                "n": i + 1,
                                "m_n": json_num(t.to_f64()),
                                "inv_m_n": json_num(t.reciprocal()),
                            })
                        })
                        .collect();
                    let doc = serde_json::json!({ "tin": rows, "monotone": monotone });
                    emit(&output, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
                }
            }
        }
        Command::Complete { input, output, method, lags, grid, seed, variant } => {
            let seq = read_input(&input)?;
            let seed = seed_override(seed)?;
            let result = match method {
                Method::Maxent => maxent_extend(&seq, lags)?,
                Method::MintinGreedy => greedy_mintin_extend(&seq, lags)?,
                Method::MintinRar => {
                    let params = RarFitParams { seed, ..RarFitParams::default() };
                    rar_extend(&seq, lags, grid, &params)?
                }
                Method::Maxtin => {
                    let v = match variant {
                        Variant::Comb => MaxTinVariant::Comb,
                        Variant::Periodic => MaxTinVariant::Periodic,
                    };
                    maxtin_construct(&seq, v)?
                }
            };
            match output.format {
                Format::Csv => emit(&output, &result.covariances_csv()),
                Format::Json => emit(&output, &format!("{}\n", result.to_json())),
            }
        }
        Command::Spectrum { input, output, grid, model, seed, no_scales } => {
            let seq = read_input(&input)?;
            let seed = seed_override(seed)?;
            let s: SpectrumGrid = match model {
                SpectrumModel::Maxent => psd_from_ar(&yule_walker_fit(&seq)?, grid),
                SpectrumModel::MintinRar => {
                    let params = RarFitParams { seed, ..RarFitParams::default() };
                    let fit = tinspec::completion::rar_fit(&seq, grid, &params)?;
                    psd_rar(&fit.spectrum, grid)?
                }
                SpectrumModel::Dtft => SpectrumGrid::from_covariances(seq.values(), grid)?,
            };
            match output.format {
                Format::Csv => emit(&output, &s.to_csv(!no_scales)),
                Format::Json => {
                    let doc = serde_json::json!({
                        "n_grid": s.n_grid(),
                        "values": s.values(),
                    });
                    emit(&output, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
                }
            }
        }
        Command::SubsetTin { input, output, k, samples, seed } => {
            let seq = read_input(&input)?;
            let seed = seed_override(seed)?;
            let n = seq.len();
            let t = toeplitz_from_sequence(&seq, n)?;
            let c = GeneralCovariance::new(DMatrix::from_fn(n, n, |i, j| t.entry(i, j)))?;
            let (value, std_error) = match samples {
                Some(ns) => {
                    let est = k_of_n_tin_sampled(&c, k, ns, seed)?;
                    (est.estimate, Some(est.std_error))
                }
                None => (k_of_n_tin(&c, k)?, None),
            };
            match output.format {
                Format::Csv => {
                    let mut s = String::from("k,n,M_k,std_error\n");
                    let se = std_error.map_or(String::new(), sig);
                    s.push_str(&format!("{k},{n},{},{se}\n", sig(value.to_f64())));
                    emit(&output, &s)
                }
                Format::Json => {
                    let doc = serde_json::json!({
                        "k": k,
                        "n": n,
                        "m_k": json_num(value.to_f64()),
                        "std_error": std_error,
                    });
                    emit(&output, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
                }
            }
        }
        Command::MaMatch { input, output } => {
            let seq = read_input(&input)?;
            let m = ma_match(&seq)?;
            match output.format {
                Format::Csv => {
                    let mut s = format!("# support,{}\n", m.support);
                    s.push_str(&m.covariances.to_csv());
                    emit(&output, &s)
                }
                Format::Json => {
                    let doc = serde_json::json!({
                        "support": m.support,
                        "c": m.covariances.values(),
                    });
                    emit(&output, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
                }
            }
        }
    }
}

fn read_input(input: &InputArgs) -> tinspec::Result<CovarianceSequence> {
    if let Some(inline) = &input.c {
        let values: std::result::Result<Vec<f64>, _> =
            inline.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let values = values.map_err(|e| TinError::Parse(format!("bad inline lag: {e}")))?;
        return CovarianceSequence::new(values);
    }
    let path = input.cov.as_ref().ok_or_else(|| {
        TinError::Parse("missing input: pass --cov <path> or --c \"<lags>\"".into())
    })?;
    let text = std::fs::read_to_string(path).map_err(TinError::Io)?;
    if text.trim_start().starts_with('{') {
        CovarianceSequence::from_json(&text)
    } else {
        CovarianceSequence::from_csv(&text)
    }
}

fn seed_override(cli_seed: u64) -> tinspec::Result<u64> {
    match std::env::var("TINSPEC_SEED") {
        Ok(v) => v.trim().parse().map_err(|e| TinError::Parse(format!("bad TINSPEC_SEED: {e}"))),
        Err(_) => Ok(cli_seed),
    }
}

fn emit(output: &OutputArgs, text: &str) -> tinspec::Result<()> {
    match &output.output {
        Some(path) => std::fs::write(path, text).map_err(TinError::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// 12-significant-digit rendering; +inf as the literal `inf`.
fn sig(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.11e}")
    }
}

fn json_num(v: f64) -> serde_json::Value {
    if v.is_infinite() {
        serde_json::Value::String(if v > 0.0 { "inf".into() } else { "-inf".into() })
    } else {
        serde_json::json!(v)
    }
}
