//! End-to-end tests of the command-line binary.

use std::process::{Command, Output};

fn tinspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tinspec"))
        .args(args)
        .env_remove("TINSPEC_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn tin_white_is_constant_and_monotone() {
    let out = tinspec(&["tin", "--c", "2,0,0,0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n,M_n,inv_M_n\n"));
    let rows: Vec<&str> = text.lines().skip(1).take(4).collect();
    for row in &rows {
        let m: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((m - 0.5).abs() < 1e-10);
    }
    assert!(text.contains("# monotone,true"));
}

#[test]
fn tin_singular_input_shows_inf() {
    let out = tinspec(&["tin", "--c", "1,1"]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().nth(2).unwrap().contains("inf"));
}

#[test]
fn inadmissible_input_exits_2() {
    let out = tinspec(&["tin", "--c", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn missing_input_exits_2() {
    let out = tinspec(&["tin"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn complete_maxent_geometric_decay() {
    let out = tinspec(&["complete", "--method", "maxent", "--lags", "6", "--c", "1,0.5"]);
    assert!(out.status.success());
    for (l, line) in stdout(&out).lines().skip(1).enumerate() {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v - 0.5f64.powi(l as i32)).abs() < 1e-10, "lag {l}: {v}");
    }
}

#[test]
fn complete_json_has_model_and_diagnostics() {
    let out = tinspec(&[
        "complete", "--method", "maxent", "--lags", "4", "--c", "1,0.5", "--format", "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["method"], "maxent");
    assert_eq!(doc["covariances"].as_array().unwrap().len(), 5);
    assert!(doc["model"]["ar"]["a"].is_array());
    assert!(doc["diagnostics"].is_object());
}

#[test]
fn complete_mintin_rar_deterministic() {
    let args = [
        "complete", "--method", "mintin-rar", "--lags", "8", "--grid", "1024", "--c", "1,0.5",
        "--format", "json",
    ];
    let a = tinspec(&args);
    let b = tinspec(&args);
    assert!(a.status.success(), "stderr: {}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn seed_env_var_overrides() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_tinspec"))
            .args([
                "subset-tin", "--k", "2", "--samples", "50", "--c", "1,0.4,0.2", "--format", "json",
            ])
            .env("TINSPEC_SEED", seed)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("1");
    let c = run("2");
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn spectrum_white_is_flat() {
    let out = tinspec(&["spectrum", "--c", "2", "--grid", "64", "--no-scales"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("f,S\n"));
    let lines: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(lines.len(), 64);
    for line in lines {
        let s: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((s - 2.0).abs() < 1e-10);
    }
}

#[test]
fn spectrum_scale_columns_present() {
    let out = tinspec(&["spectrum", "--c", "1,0.5", "--grid", "32"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("f,S,log_S,inv_S\n"));
}

#[test]
fn subset_tin_exact_matches_toeplitz_tin() {
    // For k = n the subset average is just the normalized Tin.
    let out = tinspec(&["subset-tin", "--k", "3", "--c", "1,0.5,0.25", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let m3 = doc["m_k"].as_f64().unwrap();
    let tin = tinspec::covariance::normalized_tin(
        &tinspec::covariance::toeplitz_from_sequence(
            &tinspec::CovarianceSequence::new(vec![1.0, 0.5, 0.25]).unwrap(),
            3,
        )
        .unwrap(),
    )
    .unwrap()
    .to_f64();
    assert!((m3 - tin).abs() < 1e-12);
}

#[test]
fn ma_match_reports_support() {
    let out = tinspec(&["ma-match", "--c", "1,0.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# support,"));
    assert!(text.contains("lag,value"));
}

#[test]
fn file_round_trip_complete_then_tin() {
    let dir = std::env::temp_dir().join(format!("tinspec-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let ext = dir.join("ext.csv");
    let out = tinspec(&[
        "complete", "--method", "mintin-greedy", "--lags", "10", "--c", "1,0.6054,0.1324,0.0904",
        "--output", ext.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = tinspec(&["tin", "--cov", ext.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 13); // header + 11 rows + monotone flag
    assert!(text.contains("# monotone,true"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn json_input_accepted() {
    let dir = std::env::temp_dir().join(format!("tinspec-cli-json-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cov.json");
    std::fs::write(&path, r#"{"c": [1.0, 0.5]}"#).unwrap();
    let out = tinspec(&["tin", "--cov", path.to_str().unwrap()]);
    assert!(out.status.success());
    std::fs::remove_dir_all(&dir).ok();
}
