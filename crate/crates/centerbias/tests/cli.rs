//! End-to-end tests of the command-line binary: argument handling, exit
//! codes, table shapes, and the documented identities between commands.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_centerbias")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("output is UTF-8")
}

fn fixture_zeros() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/zeros_chi4_100.txt")
}

fn chi4_config(dir: &Path, xmax: u64) -> PathBuf {
    let path = dir.join(format!("chi4_{xmax}.json"));
    let text = format!(
        r#"{{
  "lfunction": {{
    "family": "dirichlet",
    "modulus": 4,
    "values": [null, [1.0, 0.0], null, [-1.0, 0.0]]
  }},
  "xmax": {xmax},
  "zeros_path": {:?}
}}
"#,
        fixture_zeros()
    );
    std::fs::write(&path, text).unwrap();
    path
}

/// Parse a CSV table into (header, rows-of-f64); NaN cells parse as NaN.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header row")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|c| c.parse::<f64>().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    (header, rows)
}

#[test]
fn bias_single_point_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = chi4_config(dir.path(), 10);
    let text = stdout_of(&["bias", "--config", cfg.to_str().unwrap()]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(
        header,
        ["x", "bias", "loglog_x", "fit_slope", "predicted_slope"]
    );
    assert_eq!(rows.len(), 1);
    // −1/√3 + 1/√5 − 1/√7, and no slope from a single sample
    assert!((rows[0][1] - (-0.50810114669889505)).abs() < 1e-15);
    assert!(rows[0][3].is_nan());
    assert_eq!(rows[0][4], -0.5);
}

#[test]
fn bias_csv_round_trips_library_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = chi4_config(dir.path(), 1000);
    let text = stdout_of(&["bias", "--config", cfg.to_str().unwrap()]);
    let (_, rows) = parse_csv(&text);
    let spec = centerbias::LFunctionSpec::new(
        "chi4",
        std::sync::Arc::new(centerbias::DirichletCharacter::chi4()),
        0,
        -1,
        1,
        vec![1.0],
        Some(4),
    )
    .unwrap();
    for row in &rows {
        let direct = centerbias::series::bias_sum(&spec, row[0]).unwrap();
        // shortest round-trip printing: parsing the CSV recovers the bits
        assert_eq!(row[1].to_bits(), direct.to_bits(), "x = {}", row[0]);
    }
}

#[test]
fn race_mirrors_bias_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = chi4_config(dir.path(), 10_000);
    let bias = stdout_of(&["bias", "--config", cfg.to_str().unwrap()]);
    let race = stdout_of(&["race", "--config", cfg.to_str().unwrap()]);
    let (_, bias_rows) = parse_csv(&bias);
    let (header, race_rows) = parse_csv(&race);
    assert_eq!(header, ["x", "race"]);
    assert_eq!(bias_rows.len(), race_rows.len());
    for (b, r) in bias_rows.iter().zip(&race_rows) {
        assert_eq!(b[0], r[0]);
        // default race is (q, a, b) = (4, 3, 1), the negated bias stream
        assert_eq!((-b[1]).to_bits(), r[1].to_bits(), "x = {}", b[0]);
    }
}

#[test]
fn race_counts_primes_at_s_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = chi4_config(dir.path(), 20);
    let text = stdout_of(&["race", "--config", cfg.to_str().unwrap(), "--s", "0"]);
    let (_, rows) = parse_csv(&text);
    // primes ≤ 20: {3, 7, 11, 19} ≡ 3 (mod 4) vs {5, 13, 17} ≡ 1 (mod 4)
    let last = rows.last().unwrap();
    assert_eq!(last[0], 20.0);
    assert_eq!(last[1], 1.0);
}

#[test]
fn goldfeld_prefix_product_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("e11a1_5.json");
    std::fs::write(
        &cfg,
        r#"{
  "lfunction": {
    "family": "elliptic",
    "a_invariants": [0, -1, 1, -10, -20],
    "conductor": 11,
    "rank": 0
  },
  "xmax": 5
}
"#,
    )
    .unwrap();
    let text = stdout_of(&["goldfeld", "--config", cfg.to_str().unwrap()]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["x", "product", "logx_pow_r", "rank"]);
    assert_eq!(rows.len(), 1);
    // N_2/2 · N_3/3 · N_5/5 = (5/2)(5/3)(5/5) = 25/6
    assert!((rows[0][1] - 25.0 / 6.0).abs() < 1e-15);
    assert_eq!(rows[0][3], 0.0);
}

#[test]
fn product_away_from_center_tracks_dirichlet_l() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("trivial.json");
    std::fs::write(
        &cfg,
        r#"{
  "lfunction": { "family": "dirichlet", "modulus": 1, "values": [[1.0, 0.0]] },
  "xmax": 10
}
"#,
    )
    .unwrap();
    let text = stdout_of(&["product", "--config", cfg.to_str().unwrap(), "--s", "2"]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(
        header,
        ["x", "product_re", "product_im", "target_re", "target_im"]
    );
    let last = rows.last().unwrap();
    // ∏_{p≤10} (1 − p^{−2})^{−1} and its limit ζ(2) = π²/6
    assert!((last[1] - 0.46690638983115519f64.exp()).abs() < 1e-12);
    assert_eq!(last[2], 0.0);
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    assert!((last[3] - zeta2).abs() < 1e-12);
}

#[test]
fn product_center_emits_engine_target() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = chi4_config(dir.path(), 1000);
    let text = stdout_of(&[
        "product",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["meta"]["command"], "product");
    assert_eq!(doc["meta"]["s"], "center");
    assert_eq!(doc["meta"]["target_method"], "hurwitz-em+alternating");
    let rows = doc["rows"].as_array().unwrap();
    let target = rows[0]["target"].as_f64().unwrap();
    assert!((target - 0.9442583142382001).abs() < 1e-11);
}

#[test]
fn json_meta_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = chi4_config(dir.path(), 100);
    let text = stdout_of(&[
        "bias",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["meta"]["command"], "bias");
    assert_eq!(doc["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["meta"]["label"], "dirichlet-4");
    assert_eq!(doc["meta"]["config"]["xmax"], 100);
    assert_eq!(doc["meta"]["config"]["lfunction"]["family"], "dirichlet");
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4); // 16, 32, 64, 100
    for row in rows {
        assert!(row["x"].is_number());
        assert!(row["bias"].is_number());
        assert!(row["predicted_slope"].is_number());
    }
}

#[test]
fn explicit_report_decade_rows_shrink() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = chi4_config(dir.path(), 1000);
    let text = stdout_of(&[
        "explicit",
        "--config",
        cfg.to_str().unwrap(),
        "--s",
        "0.75",
    ]);
    let doc: Value = serde_json::from_str(&text).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    // fixture reaches t ≈ 170: heights 10 and 100
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["T"], 10.0);
    assert_eq!(rows[1]["T"], 100.0);
    let r10 = rows[0]["residual"].as_f64().unwrap();
    let r100 = rows[1]["residual"].as_f64().unwrap();
    assert!(r100 < r10, "residual should shrink: {r10} vs {r100}");
    assert_eq!(rows[1]["zeros_used"], 50);
}

#[test]
fn explicit_tiny_x_has_empty_prime_side() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = chi4_config(dir.path(), 1000);
    let text = stdout_of(&[
        "explicit",
        "--config",
        cfg.to_str().unwrap(),
        "--s",
        "0.75",
        "--x",
        "1.5",
        "--T",
        "100",
    ]);
    let doc: Value = serde_json::from_str(&text).unwrap();
    let row = &doc["rows"][0];
    assert_eq!(row["lhs_re"], 0.0);
    assert_eq!(row["lhs_im"], 0.0);
    assert!(row["residual"].as_f64().unwrap() > 0.0);
}

#[test]
fn explicit_empty_zero_file_reports_zero_sum_zero() {
    let dir = tempfile::tempdir().unwrap();
    let zeros = dir.path().join("none.txt");
    std::fs::write(&zeros, "# no ordinates collected yet\n").unwrap();
    let cfg = dir.path().join("chi4_empty.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{
  "lfunction": {{
    "family": "dirichlet",
    "modulus": 4,
    "values": [null, [1.0, 0.0], null, [-1.0, 0.0]]
  }},
  "xmax": 100,
  "zeros_path": {zeros:?}
}}
"#
        ),
    )
    .unwrap();
    let text = stdout_of(&["explicit", "--config", cfg.to_str().unwrap(), "--s", "0.75"]);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["meta"]["zeros_available"], 0);
    let row = &doc["rows"][0];
    assert_eq!(row["zero_sum_re"], 0.0);
    assert_eq!(row["zero_sum_im"], 0.0);
    assert_eq!(row["zeros_used"], 0);
    assert!(row["residual"].as_f64().unwrap().is_finite());
}

#[test]
fn explicit_rejects_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = chi4_config(dir.path(), 1000);
    let out = run(&[
        "explicit",
        "--config",
        cfg.to_str().unwrap(),
        "--s",
        "0.75",
        "--format",
        "csv",
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("JSON"), "stderr should explain: {err}");
}

#[test]
fn race_rejects_complex_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = chi4_config(dir.path(), 100);
    let out = run(&["race", "--config", cfg.to_str().unwrap(), "--s", "0.5,1"]);
    assert!(!out.status.success());
}

#[test]
fn missing_config_is_a_clean_error() {
    let out = run(&["bias", "--config", "/nonexistent/nope.json"]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
}

#[test]
fn invalid_invariant_combination_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{
  "lfunction": { "family": "dirichlet", "modulus": 4,
                 "values": [null, [1.0, 0.0], null, [-1.0, 0.0]] },
  "xmax": 100,
  "nu": -1
}
"#,
    )
    .unwrap();
    let out = run(&["bias", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nu"), "stderr should name the field: {err}");
}

#[test]
fn output_file_and_stdout_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = chi4_config(dir.path(), 1000);
    let to_stdout = stdout_of(&["bias", "--config", cfg.to_str().unwrap()]);
    let out_path = dir.path().join("bias.csv");
    let out = run(&[
        "bias",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let from_file = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(to_stdout, from_file);
}

#[test]
fn tau_cache_round_trip_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    std::fs::create_dir(&cache).unwrap();
    let cfg = dir.path().join("delta.json");
    std::fs::write(
        &cfg,
        r#"{
  "lfunction": { "family": "delta", "cutoff": 2000 },
  "xmax": 2000
}
"#,
    )
    .unwrap();
    let args = [
        "bias",
        "--config",
        cfg.to_str().unwrap(),
        "--tau-cache",
        cache.to_str().unwrap(),
    ];
    let first = stdout_of(&args);
    assert!(
        std::fs::read_dir(&cache).unwrap().count() > 0,
        "first run should write a cache file"
    );
    let second = stdout_of(&args);
    assert_eq!(first, second, "cached run must be byte-identical");
}

#[test]
fn psi_table_has_ordered_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = chi4_config(dir.path(), 10_000);
    let text = stdout_of(&["psi", "--config", cfg.to_str().unwrap()]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(
        header,
        ["x", "psi", "ratio_sqrt_loglog_sq", "ratio_sqrt_log_sq"]
    );
    for row in &rows {
        assert!(row[2] >= 0.0 && row[3] >= 0.0);
        assert!(row[3] <= row[2], "log-squared normalizer is larger");
    }
}

#[test]
fn fit_emits_both_series_with_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = chi4_config(dir.path(), 100_000);
    let text = stdout_of(&[
        "fit",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let doc: Value = serde_json::from_str(&text).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["series"], "bias");
    assert_eq!(rows[0]["predicted_slope"], -0.5);
    assert_eq!(rows[1]["series"], "second_moment");
    assert_eq!(rows[1]["predicted_slope"], 1.0);
    assert!(doc["meta"]["assembled_bias_intercept"].is_number());
    assert!(doc["meta"]["central_constant"].is_number());
}
