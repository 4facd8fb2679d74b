//! Acceptance criterion for the command-line artifact: validation runs are
//! deterministic, byte for byte, under a fixed seed.

use std::fs;
use std::process::Command;
use std::time::Instant;

#[test]
fn criterion_8_validate_is_byte_identical_for_same_seed() {
    let started = Instant::now();
    let dir = std::env::temp_dir().join(format!("cpsinr-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    // Trimmed trial count keeps the double run quick; determinism does not
    // depend on the trial count.
    let config_path = dir.join("validate.json");
    fs::write(
        &config_path,
        r#"{
          "grid": { "n_fft": 16, "n_cp": 4, "n_sc": 16 },
          "channel": { "taps": { "l_d": 3, "l_u": 6,
            "values": [[0.05, -0.02], [-0.10, 0.07], [0.22, -0.15], [0.95, 0.0],
                       [0.45, 0.30], [-0.25, 0.10], [0.15, -0.12], [0.08, 0.05],
                       [-0.05, 0.02], [0.03, -0.01]] } },
          "snr_db": [20.0],
          "simulation": { "n_blocks": 4000 },
          "validation": { "trials": 12, "mc_blocks": 4000 }
        }"#,
    )
    .unwrap();

    let run = |tag: &str| {
        let out = dir.join(format!("report-{tag}.json"));
        let output = Command::new(env!("CARGO_BIN_EXE_cpsinr"))
            .arg("validate")
            .arg("--config")
            .arg(&config_path)
            .arg("--seed")
            .arg("20240917")
            .arg("--format")
            .arg("json")
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(
            output.status.success(),
            "validate run {tag} failed:\n{}{}",
            String::from_utf8_lossy(&output.stdout),
            String::from_utf8_lossy(&output.stderr)
        );
        fs::read(&out).unwrap()
    };

    let first = run("a");
    let second = run("b");
    let identical = first == second;
    println!(
        "[{}] criterion 8/8: repeated validation runs byte-identical ({} bytes each, {:.2} s)",
        if identical { "PASS" } else { "FAIL" },
        first.len(),
        started.elapsed().as_secs_f64()
    );
    assert!(identical, "validation reports differ between identical runs");

    // The report is valid JSON with the expected shape and a passing verdict.
    let value: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(value["schema"], "cpsinr.validate.v1");
    assert_eq!(value["pass"], true);
    assert_eq!(value["checks"].as_array().unwrap().len(), 4);
}
