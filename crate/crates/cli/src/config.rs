//! Experiment configuration: a single JSON document describing the grid, the
//! channel source, the SNR sweep and run parameters.
//!
//! Unknown keys are hard errors so a typo in a formula-critical parameter
//! cannot pass silently. Complex taps are written as `[re, im]` pairs, and a
//! tap array always carries its `l_d`/`l_u` so the file is unambiguous about
//! where the time of reference sits.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use cpsinr_core::{Cir, Constellation, OfdmGrid, Pdp};

/// Top-level experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub channel: ChannelConfig,
    /// SNR sweep in dB: either an explicit list or an inclusive range.
    pub snr_db: SnrSweep,
    /// Drop the noise term entirely (interference-limited analysis).
    #[serde(default)]
    pub no_noise: bool,
    /// Scale the PDP to unit total energy before use.
    #[serde(default)]
    pub normalize_energy: bool,
    /// Optional self-documentation; must match the subcommand when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub validation: ValidationConfig,
    /// Default output destination; `--out`/`--format` flags take precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_fft: usize,
    pub n_cp: usize,
    pub n_sc: usize,
    #[serde(default)]
    pub sc_offset: usize,
}

impl GridConfig {
    pub fn build(&self) -> Result<OfdmGrid> {
        OfdmGrid::new(self.n_fft, self.n_cp, self.n_sc, self.sc_offset)
            .context("invalid `grid` section")
    }
}

/// Exactly one source must be present: inline taps, a named PDP preset, or a
/// file reference for either.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taps: Option<TapsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taps_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pdp: Option<PdpSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pdp_file: Option<PathBuf>,
}

/// Inline complex tap list on the support `[-l_d, l_u]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TapsSpec {
    pub l_d: usize,
    pub l_u: usize,
    /// `l_d + l_u + 1` complex values as `[re, im]`, ordered from `-l_d`.
    pub values: Vec<[f64; 2]>,
}

impl TapsSpec {
    pub fn build(&self) -> Result<Cir> {
        let taps = self
            .values
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        Cir::new(self.l_d, self.l_u, taps).context("invalid `channel.taps`")
    }
}

/// Power-delay profile: a named preset or explicit energies.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PdpSpec {
    /// `E_m = exp(-m / tau)` for `m = 0 ..= l_u`.
    Exponential { tau: f64, l_u: usize },
    /// `E_m = 1` for `m = 0 ..= l_u`.
    Uniform { l_u: usize },
    /// `E_0 = 1` and `E_delay` a given number of dB below it.
    TwoTap { delay: usize, ratio_db: f64 },
    /// Explicit energies on `[-l_d, l_u]`.
    Inline {
        l_d: usize,
        l_u: usize,
        energies: Vec<f64>,
    },
}

impl PdpSpec {
    pub fn build(&self) -> Result<Pdp> {
        let pdp = match self {
            PdpSpec::Exponential { tau, l_u } => Pdp::exponential(*tau, *l_u),
            PdpSpec::Uniform { l_u } => Pdp::uniform(*l_u),
            PdpSpec::TwoTap { delay, ratio_db } => {
                Pdp::two_tap(*delay, 10f64.powf(ratio_db / 10.0))
            }
            PdpSpec::Inline { l_d, l_u, energies } => Pdp::new(*l_d, *l_u, energies.clone()),
        };
        pdp.context("invalid `channel.pdp`")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SnrSweep {
    List(Vec<f64>),
    Range {
        start_db: f64,
        stop_db: f64,
        step_db: f64,
    },
}

impl SnrSweep {
    /// Expands into dB points; the sweep must be non-empty.
    pub fn points(&self) -> Result<Vec<f64>> {
        let points = match self {
            SnrSweep::List(values) => values.clone(),
            SnrSweep::Range {
                start_db,
                stop_db,
                step_db,
            } => {
                if !step_db.is_finite() || *step_db <= 0.0 {
                    bail!("`snr_db.step_db` must be positive, got {step_db}");
                }
                if stop_db < start_db {
                    bail!("`snr_db` range is empty: stop {stop_db} below start {start_db}");
                }
                let count = ((stop_db - start_db) / step_db).floor() as usize + 1;
                (0..count).map(|k| start_db + k as f64 * step_db).collect()
            }
        };
        if points.is_empty() {
            bail!("`snr_db` sweep is empty");
        }
        if let Some(bad) = points.iter().find(|p| !p.is_finite()) {
            bail!("`snr_db` contains a non-finite point: {bad}");
        }
        Ok(points)
    }
}

impl Default for SnrSweep {
    fn default() -> Self {
        SnrSweep::List(vec![20.0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Sinr,
    Asainr,
    Simulate,
    Validate,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Sinr => "sinr",
            Mode::Asainr => "asainr",
            Mode::Simulate => "simulate",
            Mode::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ConstellationConfig {
    Qpsk,
    Gaussian,
}

impl From<ConstellationConfig> for Constellation {
    fn from(value: ConstellationConfig) -> Self {
        match value {
            ConstellationConfig::Qpsk => Constellation::Qpsk,
            ConstellationConfig::Gaussian => Constellation::Gaussian,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default = "default_n_blocks")]
    pub n_blocks: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_constellation")]
    pub constellation: ConstellationConfig,
    #[serde(default = "default_symbol_power")]
    pub symbol_power: f64,
}

fn default_n_blocks() -> usize {
    8000
}

fn default_seed() -> u64 {
    1
}

fn default_constellation() -> ConstellationConfig {
    ConstellationConfig::Qpsk
}

fn default_symbol_power() -> f64 {
    1.0
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n_blocks: default_n_blocks(),
            seed: default_seed(),
            constellation: default_constellation(),
            symbol_power: default_symbol_power(),
        }
    }
}

/// Tolerances and trial counts for `validate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationConfig {
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Double sum vs single sums, entrywise absolute.
    #[serde(default = "default_coeff_tol")]
    pub coeff_tol: f64,
    /// Double sum vs simulator probes, entrywise absolute.
    #[serde(default = "default_sim_tol")]
    pub sim_tol: f64,
    /// Probes two blocks away must measure nothing above this.
    #[serde(default = "default_far_block_tol")]
    pub far_block_tol: f64,
    /// Monte-Carlo SINR vs analytic, per subcarrier, in dB.
    #[serde(default = "default_sinr_tol_db")]
    pub sinr_tol_db: f64,
    /// Blocks in the Monte-Carlo check.
    #[serde(default = "default_mc_blocks")]
    pub mc_blocks: usize,
}

fn default_trials() -> usize {
    50
}

fn default_coeff_tol() -> f64 {
    1e-11
}

fn default_sim_tol() -> f64 {
    1e-10
}

fn default_far_block_tol() -> f64 {
    1e-12
}

fn default_sinr_tol_db() -> f64 {
    0.2
}

fn default_mc_blocks() -> usize {
    8000
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            coeff_tol: default_coeff_tol(),
            sim_tol: default_sim_tol(),
            far_block_tol: default_far_block_tol(),
            sinr_tol_db: default_sinr_tol_db(),
            mc_blocks: default_mc_blocks(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

impl ExperimentConfig {
    /// Reads and parses a config file; parse errors carry the line/column and
    /// the offending field name.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("invalid config {}", path.display()))?;
        Ok(config)
    }

    /// Built-in scenario used when `validate` runs without a config file:
    /// a 16/4 full-band grid and a fixed non-causal channel reaching three
    /// samples before the time of reference and past the CP.
    pub fn default_validate() -> Self {
        Self {
            grid: GridConfig {
                n_fft: 16,
                n_cp: 4,
                n_sc: 16,
                sc_offset: 0,
            },
            channel: ChannelConfig {
                taps: Some(default_noncausal_taps()),
                ..ChannelConfig::default()
            },
            snr_db: SnrSweep::default(),
            no_noise: false,
            normalize_energy: false,
            mode: Some(Mode::Validate),
            simulation: SimulationConfig::default(),
            validation: ValidationConfig::default(),
            output: None,
        }
    }

    /// The concrete channel realization, if the config provides one.
    pub fn cir(&self) -> Result<Option<Cir>> {
        let inline = self.channel.taps.clone();
        let from_file = match &self.channel.taps_file {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("cannot read taps file {}", path.display()))?;
                Some(
                    serde_json::from_str::<TapsSpec>(&text)
                        .with_context(|| format!("invalid taps file {}", path.display()))?,
                )
            }
            None => None,
        };
        match (inline, from_file) {
            (Some(_), Some(_)) => bail!("both `channel.taps` and `channel.taps_file` given"),
            (Some(spec), None) | (None, Some(spec)) => Ok(Some(spec.build()?)),
            (None, None) => Ok(None),
        }
    }

    /// The power-delay profile, if the config provides one. Applies the
    /// opt-in unit-energy normalization.
    pub fn pdp(&self) -> Result<Option<Pdp>> {
        let inline = self.channel.pdp.clone();
        let from_file = match &self.channel.pdp_file {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("cannot read pdp file {}", path.display()))?;
                Some(
                    serde_json::from_str::<PdpSpec>(&text)
                        .with_context(|| format!("invalid pdp file {}", path.display()))?,
                )
            }
            None => None,
        };
        let pdp = match (inline, from_file) {
            (Some(_), Some(_)) => bail!("both `channel.pdp` and `channel.pdp_file` given"),
            (Some(spec), None) | (None, Some(spec)) => Some(spec.build()?),
            (None, None) => None,
        };
        Ok(pdp.map(|p| {
            if self.normalize_energy {
                p.normalized()
            } else {
                p
            }
        }))
    }

    /// Rejects configs whose channel section mixes tap and profile sources.
    pub fn check_single_channel_source(&self) -> Result<()> {
        let sources = [
            self.channel.taps.is_some(),
            self.channel.taps_file.is_some(),
            self.channel.pdp.is_some(),
            self.channel.pdp_file.is_some(),
        ]
        .iter()
        .filter(|&&s| s)
        .count();
        match sources {
            0 => bail!(
                "config has no channel source: set one of `channel.taps`, \
                 `channel.taps_file`, `channel.pdp`, `channel.pdp_file`"
            ),
            1 => Ok(()),
            n => bail!("config has {n} channel sources, exactly one expected"),
        }
    }

    /// Errors when the config's declared mode contradicts the subcommand.
    pub fn check_mode(&self, invoked: Mode) -> Result<()> {
        if let Some(declared) = self.mode {
            if declared != invoked {
                bail!(
                    "config declares mode `{}` but the `{}` subcommand was invoked",
                    declared.name(),
                    invoked.name()
                );
            }
        }
        Ok(())
    }
}

/// Fixed ten-tap channel: energy before the time of reference and a tail
/// past the default CP, so every coefficient family is non-trivial.
fn default_noncausal_taps() -> TapsSpec {
    TapsSpec {
        l_d: 3,
        l_u: 6,
        values: vec![
            [0.05, -0.02],
            [-0.10, 0.07],
            [0.22, -0.15],
            [0.95, 0.00],
            [0.45, 0.30],
            [-0.25, 0.10],
            [0.15, -0.12],
            [0.08, 0.05],
            [-0.05, 0.02],
            [0.03, -0.01],
        ],
    }
}
