//! Result serialization: tidy long-format CSV (one record per SNR point and
//! subcarrier) and a schema-versioned JSON envelope echoing the effective
//! config for reproducibility.
//!
//! Column names and order are fixed. Floats are written in Rust's shortest
//! round-trip form, so `write -> parse` reproduces every value exactly.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{ExperimentConfig, OutputFormat};

/// Envelope schema tag; bump on any breaking change to the row layouts.
pub const SCHEMA: &str = "cpsinr.result.v1";

/// One `sinr` record: analytic per-subcarrier decomposition at one SNR point.
#[derive(Debug, Clone, Serialize)]
pub struct SinrRow {
    pub snr_db: f64,
    pub subcarrier: usize,
    pub signal_power: f64,
    pub ici_power: f64,
    pub isi_power: f64,
    pub noise_power: f64,
    pub sinr_linear: f64,
    pub sinr_db_out: f64,
}

/// One `asainr` record. `fullband_linear` repeats the band-wide closed form
/// when the allocation covers the whole FFT, and is empty otherwise.
#[derive(Debug, Clone, Serialize)]
pub struct AsainrRow {
    pub snr_db: f64,
    pub subcarrier: usize,
    pub asainr_linear: f64,
    pub asainr_db: f64,
    pub fullband_linear: Option<f64>,
}

/// One `simulate` record: empirical measurement at one SNR point.
#[derive(Debug, Clone, Serialize)]
pub struct SimulateRow {
    pub snr_db: f64,
    pub subcarrier: usize,
    pub signal_power: f64,
    pub interference_plus_noise_power: f64,
    pub noise_power: f64,
    pub sinr_linear: f64,
    pub sinr_db_out: f64,
    pub standard_error: f64,
    pub sample_count: usize,
}

#[derive(Debug, Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    mode: &'static str,
    config: &'a ExperimentConfig,
    results: &'a [T],
}

fn open_sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let file = File::create(p)
                .with_context(|| format!("cannot create output file {}", p.display()))?;
            Ok(Box::new(file))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

/// Writes rows as CSV (header + records) or as a JSON envelope, to the given
/// path or stdout.
pub fn write_rows<T: Serialize>(
    rows: &[T],
    mode: &'static str,
    config: &ExperimentConfig,
    format: OutputFormat,
    path: Option<&Path>,
) -> Result<()> {
    let mut sink = open_sink(path)?;
    match format {
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(&mut sink);
            for row in rows {
                writer.serialize(row)?;
            }
            writer.flush()?;
        }
        OutputFormat::Json => {
            let envelope = Envelope {
                schema: SCHEMA,
                mode,
                config,
                results: rows,
            };
            serde_json::to_writer_pretty(&mut sink, &envelope)?;
            sink.write_all(b"\n")?;
        }
    }
    Ok(())
}
