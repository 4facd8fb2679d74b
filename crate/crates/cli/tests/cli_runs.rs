//! End-to-end runs of the `cpsinr` binary: happy paths, error diagnostics,
//! and output-schema expectations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cpsinr"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cpsinr-test-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Parses tidy CSV text into (header, records-as-strings).
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .unwrap()
        .iter()
        .map(str::to_owned)
        .collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect();
    (header, rows)
}

const FLAT_SINR_CONFIG: &str = r#"{
  "grid": { "n_fft": 16, "n_cp": 4, "n_sc": 16 },
  "channel": { "taps": { "l_d": 0, "l_u": 0, "values": [[1.0, 0.0]] } },
  "snr_db": [10.0]
}"#;

#[test]
fn sinr_flat_channel_rows_are_ten_db() {
    let dir = temp_dir("flat");
    let config = write_config(&dir, "flat.json", FLAT_SINR_CONFIG);
    let output = bin().arg("sinr").arg("--config").arg(&config).output().unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let (header, rows) = parse_csv(&stdout(&output));
    assert_eq!(
        header,
        vec![
            "snr_db",
            "subcarrier",
            "signal_power",
            "ici_power",
            "isi_power",
            "noise_power",
            "sinr_linear",
            "sinr_db_out"
        ]
    );
    assert_eq!(rows.len(), 16);
    for row in rows {
        assert_eq!(row[7].parse::<f64>().unwrap(), 10.0);
        assert_eq!(row[2].parse::<f64>().unwrap(), 1.0);
    }
}

#[test]
fn sinr_engines_agree_on_causal_channel() {
    let dir = temp_dir("engines");
    let config = write_config(
        &dir,
        "causal.json",
        r#"{
          "grid": { "n_fft": 16, "n_cp": 4, "n_sc": 16 },
          "channel": { "taps": { "l_d": 0, "l_u": 6,
            "values": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                       [0.0, 0.0], [0.3, -0.2], [0.25, 0.1]] } },
          "snr_db": [5.0, 15.0]
        }"#,
    );
    let run = |engine: &str| {
        let output = bin()
            .arg("sinr")
            .arg("--config")
            .arg(&config)
            .arg("--engine")
            .arg(engine)
            .output()
            .unwrap();
        assert!(output.status.success(), "{}", stderr(&output));
        parse_csv(&stdout(&output)).1
    };
    let general = run("general");
    let causal = run("causal");
    assert_eq!(general.len(), causal.len());
    for (g, c) in general.iter().zip(&causal) {
        let gl: f64 = g[6].parse().unwrap();
        let cl: f64 = c[6].parse().unwrap();
        assert!((gl - cl).abs() <= 1e-12 * gl.abs(), "{gl} vs {cl}");
    }
}

#[test]
fn sinr_rejects_causal_engine_for_noncausal_channel() {
    let dir = temp_dir("noncausal-engine");
    let config = write_config(
        &dir,
        "nc.json",
        r#"{
          "grid": { "n_fft": 16, "n_cp": 4, "n_sc": 16 },
          "channel": { "taps": { "l_d": 1, "l_u": 0, "values": [[0.5, 0.0], [1.0, 0.0]] } },
          "snr_db": [10.0]
        }"#,
    );
    let output = bin()
        .arg("sinr")
        .arg("--config")
        .arg(&config)
        .arg("--engine")
        .arg("causal")
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(stderr(&output).contains("causal engine"));
}

#[test]
fn missing_grid_is_diagnosed_by_name() {
    let dir = temp_dir("missing-grid");
    let config = write_config(
        &dir,
        "broken.json",
        r#"{ "channel": { "pdp": { "uniform": { "l_u": 3 } } }, "snr_db": [10.0] }"#,
    );
    let output = bin().arg("asainr").arg("--config").arg(&config).output().unwrap();
    assert!(!output.status.success());
    assert!(stderr(&output).contains("grid"), "{}", stderr(&output));
}

#[test]
fn unknown_config_key_is_diagnosed_by_name() {
    let dir = temp_dir("unknown-key");
    let config = write_config(
        &dir,
        "typo.json",
        r#"{
          "grid": { "n_fft": 16, "n_cp": 4, "n_sc": 16 },
          "channel": { "pdp": { "uniform": { "l_u": 3 } } },
          "snr_db": [10.0],
          "snr_sweep": [10.0]
        }"#,
    );
    let output = bin().arg("asainr").arg("--config").arg(&config).output().unwrap();
    assert!(!output.status.success());
    assert!(stderr(&output).contains("snr_sweep"), "{}", stderr(&output));
}

#[test]
fn sinr_without_taps_names_the_missing_source() {
    let dir = temp_dir("no-taps");
    let config = write_config(
        &dir,
        "pdp-only.json",
        r#"{
          "grid": { "n_fft": 16, "n_cp": 4, "n_sc": 16 },
          "channel": { "pdp": { "uniform": { "l_u": 3 } } },
          "snr_db": [10.0]
        }"#,
    );
    let output = bin().arg("sinr").arg("--config").arg(&config).output().unwrap();
    assert!(!output.status.success());
    assert!(stderr(&output).contains("channel.taps"), "{}", stderr(&output));
}

#[test]
fn asainr_profile_inside_cp_reports_snr() {
    let dir = temp_dir("asainr-cp");
    let config = write_config(
        &dir,
        "cp.json",
        r#"{
          "grid": { "n_fft": 16, "n_cp": 4, "n_sc": 16 },
          "channel": { "pdp": { "uniform": { "l_u": 3 } } },
          "snr_db": [0.0, 10.0, 20.0],
          "normalize_energy": true
        }"#,
    );
    let output = bin().arg("asainr").arg("--config").arg(&config).output().unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let (header, rows) = parse_csv(&stdout(&output));
    assert_eq!(
        header,
        vec![
            "snr_db",
            "subcarrier",
            "asainr_linear",
            "asainr_db",
            "fullband_linear"
        ]
    );
    for row in rows {
        let snr_db: f64 = row[0].parse().unwrap();
        let linear: f64 = row[2].parse().unwrap();
        let expected = 10f64.powf(snr_db / 10.0);
        assert!((linear - expected).abs() < 1e-9 * expected);
        // Full band, so the closed-form column is populated and matches.
        let fullband: f64 = row[4].parse().unwrap();
        assert!((fullband - linear).abs() <= 1e-12 * linear);
    }
}

#[test]
fn asainr_improves_with_longer_cp() {
    let dir = temp_dir("asainr-cp-sweep");
    let mut previous = 0.0f64;
    for n_cp in [0usize, 4, 8, 16] {
        let config = write_config(
            &dir,
            &format!("cp{n_cp}.json"),
            &format!(
                r#"{{
                  "grid": {{ "n_fft": 32, "n_cp": {n_cp}, "n_sc": 32 }},
                  "channel": {{ "pdp": {{ "exponential": {{ "tau": 6.0, "l_u": 24 }} }} }},
                  "snr_db": [20.0]
                }}"#
            ),
        );
        let output = bin().arg("asainr").arg("--config").arg(&config).output().unwrap();
        assert!(output.status.success(), "{}", stderr(&output));
        let (_, rows) = parse_csv(&stdout(&output));
        let value: f64 = rows[0][2].parse().unwrap();
        assert!(
            value >= previous,
            "n_cp={n_cp}: {value} after {previous}"
        );
        previous = value;
    }
}

#[test]
fn simulate_partial_band_reports_samples_and_tracks_snr() {
    let dir = temp_dir("simulate");
    let config = write_config(
        &dir,
        "sim.json",
        r#"{
          "grid": { "n_fft": 16, "n_cp": 4, "n_sc": 8, "sc_offset": 4 },
          "channel": { "taps": { "l_d": 0, "l_u": 0, "values": [[1.0, 0.0]] } },
          "snr_db": [10.0],
          "simulation": { "n_blocks": 4000, "seed": 5, "constellation": "qpsk" }
        }"#,
    );
    let output = bin().arg("simulate").arg("--config").arg(&config).output().unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let (header, rows) = parse_csv(&stdout(&output));
    assert_eq!(header[1], "subcarrier");
    assert_eq!(header[8], "sample_count");
    assert_eq!(rows.len(), 8);
    for row in rows {
        let subcarrier: usize = row[1].parse().unwrap();
        assert!((4..12).contains(&subcarrier));
        let sinr_db: f64 = row[6].parse().unwrap();
        assert!((sinr_db - 10.0).abs() < 0.3, "{sinr_db}");
        let samples: usize = row[8].parse().unwrap();
        assert_eq!(samples, 3998);
    }
}

#[test]
fn simulate_json_envelope_echoes_config() {
    let dir = temp_dir("sim-json");
    let config = write_config(
        &dir,
        "sim.json",
        r#"{
          "grid": { "n_fft": 8, "n_cp": 2, "n_sc": 8 },
          "channel": { "taps": { "l_d": 0, "l_u": 0, "values": [[1.0, 0.0]] } },
          "snr_db": [6.0],
          "simulation": { "n_blocks": 200, "seed": 9, "constellation": "gaussian" }
        }"#,
    );
    let out_path = dir.join("sim.out.json");
    let output = bin()
        .arg("simulate")
        .arg("--config")
        .arg(&config)
        .arg("--format")
        .arg("json")
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(value["schema"], "cpsinr.result.v1");
    assert_eq!(value["mode"], "simulate");
    assert_eq!(value["config"]["grid"]["n_fft"], 8);
    assert_eq!(value["config"]["simulation"]["seed"], 9);
    assert_eq!(value["results"].as_array().unwrap().len(), 8);
}

#[test]
fn file_referenced_taps_match_inline_taps() {
    let dir = temp_dir("taps-file");
    let taps = r#"{ "l_d": 0, "l_u": 6,
        "values": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                   [0.0, 0.0], [0.3, -0.2], [0.25, 0.1]] }"#;
    let taps_path = dir.join("channel.json");
    fs::write(&taps_path, taps).unwrap();
    let by_file = write_config(
        &dir,
        "by_file.json",
        &format!(
            r#"{{
              "grid": {{ "n_fft": 16, "n_cp": 4, "n_sc": 16 }},
              "channel": {{ "taps_file": {} }},
              "snr_db": [15.0]
            }}"#,
            serde_json::to_string(&taps_path).unwrap()
        ),
    );
    let inline = write_config(
        &dir,
        "inline.json",
        &format!(
            r#"{{
              "grid": {{ "n_fft": 16, "n_cp": 4, "n_sc": 16 }},
              "channel": {{ "taps": {taps} }},
              "snr_db": [15.0]
            }}"#
        ),
    );
    let run = |config: &Path| {
        let output = bin().arg("sinr").arg("--config").arg(config).output().unwrap();
        assert!(output.status.success(), "{}", stderr(&output));
        stdout(&output)
    };
    assert_eq!(run(&by_file), run(&inline));

    // A dangling reference is a named error, not a silent default.
    let missing = write_config(
        &dir,
        "missing.json",
        r#"{
          "grid": { "n_fft": 16, "n_cp": 4, "n_sc": 16 },
          "channel": { "taps_file": "does-not-exist.json" },
          "snr_db": [15.0]
        }"#,
    );
    let output = bin().arg("sinr").arg("--config").arg(&missing).output().unwrap();
    assert!(!output.status.success());
    assert!(stderr(&output).contains("does-not-exist.json"));
}

#[test]
fn no_noise_flag_removes_the_noise_term() {
    let dir = temp_dir("no-noise");
    let config = write_config(
        &dir,
        "twotap.json",
        r#"{
          "grid": { "n_fft": 16, "n_cp": 4, "n_sc": 16 },
          "channel": { "taps": { "l_d": 0, "l_u": 6,
            "values": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                       [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]] } },
          "snr_db": [20.0]
        }"#,
    );
    let output = bin()
        .arg("sinr")
        .arg("--config")
        .arg(&config)
        .arg("--no-noise")
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let (_, rows) = parse_csv(&stdout(&output));
    for row in rows {
        assert_eq!(row[5].parse::<f64>().unwrap(), 0.0, "noise_power");
        let signal: f64 = row[2].parse().unwrap();
        let ici: f64 = row[3].parse().unwrap();
        let isi: f64 = row[4].parse().unwrap();
        let sinr: f64 = row[6].parse().unwrap();
        assert!((sinr - signal / (ici + isi)).abs() <= 1e-12 * sinr.abs());
    }
}

#[test]
fn csv_output_is_deterministic_for_same_seed() {
    let dir = temp_dir("csv-determinism");
    let config = write_config(
        &dir,
        "sim.json",
        r#"{
          "grid": { "n_fft": 8, "n_cp": 2, "n_sc": 8 },
          "channel": { "taps": { "l_d": 1, "l_u": 3,
            "values": [[0.1, 0.0], [1.0, 0.0], [0.4, -0.2], [0.0, 0.1], [0.05, 0.0]] } },
          "snr_db": [10.0, 20.0],
          "simulation": { "n_blocks": 300, "seed": 77 }
        }"#,
    );
    let run = || {
        let output = bin().arg("simulate").arg("--config").arg(&config).output().unwrap();
        assert!(output.status.success(), "{}", stderr(&output));
        output.stdout
    };
    assert_eq!(run(), run());
}

fn quick_validate_config() -> &'static str {
    r#"{
      "grid": { "n_fft": 16, "n_cp": 4, "n_sc": 16 },
      "channel": { "taps": { "l_d": 3, "l_u": 6,
        "values": [[0.05, -0.02], [-0.10, 0.07], [0.22, -0.15], [0.95, 0.0],
                   [0.45, 0.30], [-0.25, 0.10], [0.15, -0.12], [0.08, 0.05],
                   [-0.05, 0.02], [0.03, -0.01]] } },
      "snr_db": [20.0],
      "simulation": { "n_blocks": 2000, "seed": 42 },
      "validation": { "trials": 8, "mc_blocks": 2000, "sinr_tol_db": 0.5 }
    }"#
}

#[test]
fn validate_noncausal_channel_passes() {
    let dir = temp_dir("validate-pass");
    let config = write_config(&dir, "v.json", quick_validate_config());
    let output = bin().arg("validate").arg("--config").arg(&config).output().unwrap();
    assert!(output.status.success(), "{}", stdout(&output));
    let text = stdout(&output);
    assert!(text.contains("[PASS] double_sum_vs_single_sums"));
    assert!(text.contains("[PASS] double_sum_vs_simulator_probes"));
    assert!(text.contains("[PASS] far_block_probes_vanish"));
    assert!(text.contains("[PASS] monte_carlo_sinr_vs_analytic"));
    assert!(text.contains("validation passed"));
}

#[test]
fn validate_with_corrupted_tolerance_fails_and_reports_deviation() {
    let dir = temp_dir("validate-fail");
    let config = write_config(
        &dir,
        "v.json",
        &quick_validate_config().replace(
            r#""validation": { "trials": 8, "mc_blocks": 2000, "sinr_tol_db": 0.5 }"#,
            r#""validation": { "trials": 8, "mc_blocks": 2000, "sinr_tol_db": 0.5, "coeff_tol": 1e-20 }"#,
        ),
    );
    let output = bin().arg("validate").arg("--config").arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(2), "{}", stdout(&output));
    let text = stdout(&output);
    assert!(text.contains("[FAIL] double_sum_vs_single_sums"));
    assert!(text.contains("at trial="), "{text}");
    assert!(text.contains("validation FAILED"));
}

#[test]
fn repo_example_configs_parse_and_run() {
    let repo_configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let sinr = repo_configs.join("sinr_two_tap.json");
    let output = bin().arg("sinr").arg("--config").arg(&sinr).output().unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let (_, rows) = parse_csv(&stdout(&output));
    assert_eq!(rows.len(), 7 * 64);

    let asainr = repo_configs.join("asainr_exponential.json");
    let output = bin().arg("asainr").arg("--config").arg(&asainr).output().unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
}
