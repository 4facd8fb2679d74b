//! Cross-route validation: defining double sum vs single sums vs simulator
//! probes, plus a Monte-Carlo check of the analytic SINR. Each check reports
//! its worst deviation and where it occurred; the run passes only if every
//! check stays within its declared tolerance.

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use cpsinr_core::{
    build_coeff_set, measure_coefficients, monte_carlo_sinr, probe_coefficient, sinr_general, Cir,
    CoeffMode, Constellation, NoiseTerm, OfdmGrid, SimConfig, SnrSpec,
};
use num_complex::Complex64;

use crate::config::ExperimentConfig;

/// Outcome of one validation check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    /// Where the worst deviation occurred, e.g. `trial=3 b=-1 l=5 i=9`.
    pub worst_at: String,
    pub pass: bool,
}

/// Serializable validation report; identical configs and seeds produce
/// byte-identical JSON.
#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub schema: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub config: ExperimentConfig,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

/// Schema tag for the validation report.
pub const VALIDATE_SCHEMA: &str = "cpsinr.validate.v1";

struct WorstTracker {
    value: f64,
    at: String,
}

impl WorstTracker {
    fn new() -> Self {
        Self {
            value: 0.0,
            at: String::from("-"),
        }
    }

    fn update(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.value {
            self.value = value;
            self.at = at();
        }
    }

    fn into_check(self, name: &'static str, tolerance: f64) -> CheckResult {
        CheckResult {
            name,
            max_deviation: self.value,
            tolerance,
            worst_at: self.at,
            pass: self.value <= tolerance,
        }
    }
}

fn random_cir(rng: &mut ChaCha8Rng, grid: &OfdmGrid) -> Cir {
    use rand_distr::StandardNormal;
    let max = grid.n_fft() - 1;
    let l_d = rng.random_range(0..=max);
    let l_u = rng.random_range(0..=max);
    let scale = (1.0 / (l_d + l_u + 1) as f64).sqrt();
    let taps = (0..l_d + l_u + 1)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * scale / 2f64.sqrt()
        })
        .collect();
    Cir::new(l_d, l_u, taps).unwrap()
}

/// Runs the full validation for a config. The channel from the config (or
/// the built-in default) becomes trial 0 and drives the Monte-Carlo check;
/// the remaining trials draw random supports and taps from the seed.
pub fn run(config: &ExperimentConfig, seed: u64) -> Result<ValidateReport> {
    let grid = config.grid.build()?;
    let trials = config.validation.trials;
    let tols = &config.validation;

    let fixed_cir = config.cir()?;

    let mut coeff = WorstTracker::new();
    let mut simulator = WorstTracker::new();
    let mut far = WorstTracker::new();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let cir = match (trial, &fixed_cir) {
            (0, Some(c)) => c.clone(),
            _ => random_cir(&mut rng, &grid),
        };
        let direct = build_coeff_set(&cir, &grid, CoeffMode::Direct)?;
        let simplified = build_coeff_set(&cir, &grid, CoeffMode::Simplified)?;
        let measured = measure_coefficients(&cir, &grid)?;

        for (b, l, i, reference) in direct.entries() {
            let d_simplified = (simplified.get(b, l, i) - reference).norm();
            coeff.update(d_simplified, || format!("trial={trial} b={b} l={l} i={i}"));
            let d_measured = (measured.get(b, l, i) - reference).norm();
            simulator.update(d_measured, || format!("trial={trial} b={b} l={l} i={i}"));
        }
        for b in [-2i64, 2] {
            for l in grid.subcarriers() {
                for (j, y) in probe_coefficient(b, l, &cir, &grid)?.iter().enumerate() {
                    far.update(y.norm(), || {
                        format!("trial={trial} b={b} l={l} i={}", grid.sc_offset() + j)
                    });
                }
            }
        }
    }

    // Monte-Carlo SINR on the fixed channel at the first sweep point.
    let mc_cir = fixed_cir
        .unwrap_or_else(|| ExperimentConfig::default_validate().cir().unwrap().unwrap());
    let snr_db = config.snr_db.points()?[0];
    let snr = SnrSpec::from_db(snr_db)?;
    let predicted = sinr_general(&mc_cir, &grid, NoiseTerm::Snr(snr))?;
    let sim = SimConfig {
        grid,
        n_blocks: tols.mc_blocks,
        symbol_power: config.simulation.symbol_power,
        noise_variance: SimConfig::noise_variance_for_snr(
            &grid,
            config.simulation.symbol_power,
            snr.linear(),
        ),
        seed,
        constellation: Constellation::from(config.simulation.constellation),
    };
    let empirical = monte_carlo_sinr(&mc_cir, &sim)?;
    let mut mc = WorstTracker::new();
    for (e, p) in empirical
        .per_subcarrier
        .iter()
        .zip(&predicted.per_subcarrier)
    {
        mc.update((e.sinr_db - p.sinr_db).abs(), || {
            format!("subcarrier={} at snr_db={snr_db}", e.subcarrier)
        });
    }

    let checks = vec![
        coeff.into_check("double_sum_vs_single_sums", tols.coeff_tol),
        simulator.into_check("double_sum_vs_simulator_probes", tols.sim_tol),
        far.into_check("far_block_probes_vanish", tols.far_block_tol),
        mc.into_check("monte_carlo_sinr_vs_analytic", tols.sinr_tol_db),
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(ValidateReport {
        schema: VALIDATE_SCHEMA,
        seed,
        trials,
        config: config.clone(),
        checks,
        pass,
    })
}

impl ValidateReport {
    /// Human-readable one-line-per-check summary.
    pub fn render_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {}: max deviation {:.3e} (tol {:.1e}) at {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.max_deviation,
                c.tolerance,
                c.worst_at
            ));
        }
        out.push_str(&format!(
            "validation {} ({} trials, seed {})\n",
            if self.pass { "passed" } else { "FAILED" },
            self.trials,
            self.seed
        ));
        out
    }
}
