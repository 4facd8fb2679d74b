//! `cpsinr`: OFDM SINR analysis under insufficient cyclic prefix.
//!
//! Subcommands:
//!
//! * `sinr`: per-subcarrier SINR of a concrete channel realization across an
//!   SNR sweep, via the general or the causal-shortcut engine.
//! * `asainr`: ensemble-average SINR straight from a power-delay profile.
//! * `simulate`: time-domain Monte-Carlo measurement of the same quantities.
//! * `validate`: cross-route equivalence checks with declared tolerances.

mod config;
mod output;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use cpsinr_core::{
    asainr, asainr_fullband, monte_carlo_sinr, sinr_causal, sinr_general, Cir, Constellation,
    NoiseTerm, SimConfig, SinrReport, SnrSpec,
};

use config::{ExperimentConfig, Mode, OutputFormat};
use output::{AsainrRow, SimulateRow, SinrRow};

#[derive(Parser)]
#[command(
    name = "cpsinr",
    version,
    about = "OFDM SINR analysis when the channel delay spread exceeds the cyclic prefix"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-subcarrier SINR for a concrete tap list across the SNR sweep.
    Sinr(SinrArgs),
    /// Ensemble-average SINR for a power-delay profile across the SNR sweep.
    Asainr(CommonArgs),
    /// Monte-Carlo link simulation measuring empirical SINR.
    Simulate(CommonArgs),
    /// Cross-route validation; exits non-zero if any check fails.
    Validate(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (JSON). Required except for `validate`, which falls
    /// back to a built-in scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; overrides the config.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// RNG seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Drop the noise term (interference-limited analysis).
    #[arg(long)]
    no_noise: bool,
}

#[derive(Args)]
struct SinrArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Evaluation engine; `auto` picks the causal shortcut when it applies.
    #[arg(long, value_enum, default_value_t = Engine::Auto)]
    engine: Engine,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Engine {
    Auto,
    General,
    Causal,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sinr(args) => run_sinr(args),
        Command::Asainr(args) => run_asainr(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Validate(args) => run_validate(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

/// A consumer like `head` closing stdout early is not a failure.
fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<std::io::Error>(),
            Some(io) if io.kind() == std::io::ErrorKind::BrokenPipe
        ) || matches!(
            cause.downcast_ref::<csv::Error>(),
            Some(c) if c.is_io_error()
                && matches!(c.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe)
        )
    })
}

impl CommonArgs {
    fn load_config(&self, mode: Mode) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None if mode == Mode::Validate => ExperimentConfig::default_validate(),
            None => bail!("`{}` requires --config <path>", mode.name()),
        };
        config.check_mode(mode)?;
        if let Some(seed) = self.seed {
            config.simulation.seed = seed;
        }
        if self.no_noise {
            config.no_noise = true;
        }
        Ok(config)
    }

    /// Resolved output format and path: flags first, then the config block.
    fn sink(&self, config: &ExperimentConfig) -> (OutputFormat, Option<PathBuf>) {
        let from_config = config.output.as_ref();
        let format = self
            .format
            .or(from_config.map(|o| o.format))
            .unwrap_or(OutputFormat::Csv);
        let path = self
            .out
            .clone()
            .or_else(|| from_config.map(|o| o.path.clone()));
        (format, path)
    }
}

fn noise_terms(config: &ExperimentConfig) -> Result<Vec<(f64, NoiseTerm)>> {
    config
        .snr_db
        .points()?
        .into_iter()
        .map(|db| {
            let term = if config.no_noise {
                NoiseTerm::Zero
            } else {
                NoiseTerm::Snr(SnrSpec::from_db(db)?)
            };
            Ok((db, term))
        })
        .collect()
}

fn require_cir(config: &ExperimentConfig, mode: Mode) -> Result<Cir> {
    config.check_single_channel_source()?;
    config.cir()?.with_context(|| {
        format!(
            "`{}` needs a concrete tap list: set `channel.taps` or `channel.taps_file`",
            mode.name()
        )
    })
}

fn run_sinr(args: SinrArgs) -> Result<ExitCode> {
    let config = args.common.load_config(Mode::Sinr)?;
    let grid = config.grid.build()?;
    let cir = require_cir(&config, Mode::Sinr)?;

    let engine = match args.engine {
        Engine::Auto => {
            if cir.is_causal() {
                Engine::Causal
            } else {
                Engine::General
            }
        }
        e => e,
    };
    if engine == Engine::Causal && !cir.is_causal() {
        bail!(
            "causal engine requested but the channel has {} taps before the time of reference",
            cir.l_d()
        );
    }

    let points = noise_terms(&config)?;
    let reports: Vec<(f64, SinrReport)> = points
        .par_iter()
        .map(|&(db, noise)| {
            let report = match engine {
                Engine::Causal => sinr_causal(&cir, &grid, noise),
                _ => sinr_general(&cir, &grid, noise),
            }?;
            Ok((db, report))
        })
        .collect::<Result<_>>()?;

    let rows: Vec<SinrRow> = reports
        .iter()
        .flat_map(|(db, report)| {
            report.per_subcarrier.iter().map(|e| SinrRow {
                snr_db: *db,
                subcarrier: e.subcarrier,
                signal_power: e.signal_power,
                ici_power: e.ici_power,
                isi_power: e.isi_power,
                noise_power: e.noise_power,
                sinr_linear: e.sinr_linear,
                sinr_db_out: e.sinr_db,
            })
        })
        .collect();

    let (format, path) = args.common.sink(&config);
    output::write_rows(&rows, "sinr", &config, format, path.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn run_asainr(args: CommonArgs) -> Result<ExitCode> {
    let config = args.load_config(Mode::Asainr)?;
    let grid = config.grid.build()?;
    config.check_single_channel_source()?;
    let pdp = config.pdp()?.context(
        "`asainr` needs a power-delay profile: set `channel.pdp` or `channel.pdp_file`",
    )?;

    let points = noise_terms(&config)?;
    let per_point: Vec<(f64, Vec<f64>, Option<f64>)> = points
        .par_iter()
        .map(|&(db, noise)| {
            let table = asainr(&pdp, &grid, noise)?;
            let fullband = if grid.n_sc() == grid.n_fft() {
                let value = asainr_fullband(&pdp, &grid, noise)?;
                // The two routes are algebraically identical on a full band;
                // disagreement means a defect, not a data point.
                for (i, g) in table.iter().enumerate() {
                    let tol = 1e-12 * value.abs().max(1.0);
                    if (g - value).abs() > tol {
                        bail!(
                            "full-band closed form {value} disagrees with the general \
                             route {g} on subcarrier {i}"
                        );
                    }
                }
                Some(value)
            } else {
                None
            };
            Ok((db, table, fullband))
        })
        .collect::<Result<_>>()?;

    let rows: Vec<AsainrRow> = per_point
        .iter()
        .flat_map(|(db, table, fullband)| {
            grid.subcarriers().zip(table.iter()).map(move |(i, &g)| {
                AsainrRow {
                    snr_db: *db,
                    subcarrier: i,
                    asainr_linear: g,
                    asainr_db: 10.0 * g.log10(),
                    fullband_linear: *fullband,
                }
            })
        })
        .collect();

    let (format, path) = args.sink(&config);
    output::write_rows(&rows, "asainr", &config, format, path.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn run_simulate(args: CommonArgs) -> Result<ExitCode> {
    let config = args.load_config(Mode::Simulate)?;
    let grid = config.grid.build()?;
    let cir = require_cir(&config, Mode::Simulate)?;
    let points = config.snr_db.points()?;

    let rows_nested: Vec<Vec<SimulateRow>> = points
        .par_iter()
        .enumerate()
        .map(|(idx, &db)| {
            let noise_variance = if config.no_noise {
                0.0
            } else {
                SimConfig::noise_variance_for_snr(
                    &grid,
                    config.simulation.symbol_power,
                    SnrSpec::from_db(db)?.linear(),
                )
            };
            let sim = SimConfig {
                grid,
                n_blocks: config.simulation.n_blocks,
                symbol_power: config.simulation.symbol_power,
                noise_variance,
                // Decorrelate sweep points while keeping the run reproducible.
                seed: config.simulation.seed.wrapping_add(idx as u64),
                constellation: Constellation::from(config.simulation.constellation),
            };
            let report = monte_carlo_sinr(&cir, &sim)?;
            Ok(report
                .per_subcarrier
                .iter()
                .map(|e| SimulateRow {
                    snr_db: db,
                    subcarrier: e.subcarrier,
                    signal_power: e.signal_power,
                    interference_plus_noise_power: e.interference_plus_noise_power,
                    noise_power: e.noise_power,
                    sinr_linear: e.sinr_linear,
                    sinr_db_out: e.sinr_db,
                    standard_error: e.standard_error,
                    sample_count: report.sample_count,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<SimulateRow> = rows_nested.into_iter().flatten().collect();

    let (format, path) = args.sink(&config);
    output::write_rows(&rows, "simulate", &config, format, path.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn run_validate(args: CommonArgs) -> Result<ExitCode> {
    let config = args.load_config(Mode::Validate)?;
    let seed = config.simulation.seed;
    let report = validate::run(&config, seed)?;

    let (format, path) = args.sink(&config);
    match (format, path) {
        (OutputFormat::Json, path) => {
            let text = serde_json::to_string_pretty(&report)?;
            match path {
                Some(p) => {
                    std::fs::write(&p, format!("{text}\n"))
                        .with_context(|| format!("cannot write {}", p.display()))?;
                    print!("{}", report.render_lines());
                }
                None => println!("{text}"),
            }
        }
        (OutputFormat::Csv, path) => {
            // The validation report is inherently structured; CSV requests
            // still print the summary and store JSON when a path is given.
            if let Some(p) = path {
                let text = serde_json::to_string_pretty(&report)?;
                std::fs::write(&p, format!("{text}\n"))
                    .with_context(|| format!("cannot write {}", p.display()))?;
            }
            print!("{}", report.render_lines());
        }
    }

    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}
