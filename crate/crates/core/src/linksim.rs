//! Time-domain OFDM link simulator: modulate, convolve with a possibly
//! non-causal channel, add AWGN, strip the CP, FFT-demodulate, and measure
//! empirical coefficients and SINR.
//!
//! The simulator is the crate's independent measurement rig. It never calls
//! into the closed forms; agreement between what it measures and what
//! [`crate::coefficients`] / [`crate::analysis`] predict is the end-to-end
//! validation of those formulas.
//!
//! Conventions:
//!
//! * Sample time `k = 0` is the first FFT-window sample of block 0; block `b`
//!   occupies `[b(n_fft+n_cp) - n_cp, b(n_fft+n_cp) + n_fft - 1]` with its CP
//!   in front.
//! * Modulation places symbol `x[b,l]` on bin `l` with amplitude `1/sqrt(n_sc)`;
//!   demodulation scales FFT bin `i` by `sqrt(n_sc)/n_fft`. A demodulated
//!   noise sample then has variance `(n_sc/n_fft) * sigma_z^2`.
//! * Everything is deterministic given the seed: symbol and noise draws come
//!   from separate ChaCha streams of the same seeded generator.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::coefficients::CoeffSet;
use crate::error::{Error, Result};
use crate::model::{Cir, OfdmGrid};

/// ChaCha stream ids keeping symbol and noise draws independent.
const SYMBOL_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// Contiguous run of complex samples anchored at an absolute sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    start: i64,
    samples: Vec<Complex64>,
}

impl Stream {
    pub fn new(start: i64, samples: Vec<Complex64>) -> Self {
        Self { start, samples }
    }

    /// Time of the first sample.
    pub fn start(&self) -> i64 {
        self.start
    }

    /// One past the time of the last sample.
    pub fn end(&self) -> i64 {
        self.start + self.samples.len() as i64
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample at absolute time `t`; zero outside the buffered range.
    pub fn get(&self, t: i64) -> Complex64 {
        if t < self.start || t >= self.end() {
            Complex64::new(0.0, 0.0)
        } else {
            self.samples[(t - self.start) as usize]
        }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }
}

/// Symbol alphabet for Monte-Carlo runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constellation {
    /// Four points of magnitude `sqrt(P)`.
    Qpsk,
    /// Circularly symmetric complex Gaussian with `E|x|^2 = P`.
    Gaussian,
}

/// Monte-Carlo run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: OfdmGrid,
    /// OFDM blocks per run; edge blocks are excluded from statistics, so at
    /// least 3 are required.
    pub n_blocks: usize,
    /// Average symbol power `P`.
    pub symbol_power: f64,
    /// Time-domain complex noise variance `sigma_z^2`.
    pub noise_variance: f64,
    pub seed: u64,
    pub constellation: Constellation,
}

impl SimConfig {
    /// QPSK run with unit symbol power.
    pub fn new(grid: OfdmGrid, n_blocks: usize, noise_variance: f64, seed: u64) -> Self {
        Self {
            grid,
            n_blocks,
            symbol_power: 1.0,
            noise_variance,
            seed,
            constellation: Constellation::Qpsk,
        }
    }

    /// Time-domain noise variance that yields the requested post-FFT SNR for
    /// this grid and symbol power: `sigma_z^2 = P n_fft / (n_sc snr)`.
    pub fn noise_variance_for_snr(grid: &OfdmGrid, symbol_power: f64, snr_linear: f64) -> f64 {
        symbol_power * grid.n_fft() as f64 / (grid.n_sc() as f64 * snr_linear)
    }

    fn validate(&self) -> Result<()> {
        if self.n_blocks < 3 {
            return Err(Error::TooFewBlocks {
                n_blocks: self.n_blocks,
                min: 3,
            });
        }
        if !self.symbol_power.is_finite() || self.symbol_power <= 0.0 {
            return Err(Error::BadParameter {
                name: "symbol_power",
                value: self.symbol_power,
            });
        }
        if !self.noise_variance.is_finite() || self.noise_variance < 0.0 {
            return Err(Error::BadParameter {
                name: "noise_variance",
                value: self.noise_variance,
            });
        }
        Ok(())
    }
}

/// Empirical per-subcarrier measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalSinr {
    pub subcarrier: usize,
    /// `|H[0,i,i]|^2 P` with the coefficient probed noise-free.
    pub signal_power: f64,
    /// Mean squared deviation of the demodulated symbol from
    /// `H[0,i,i] x[b,i]` (interference plus noise, measured jointly).
    pub interference_plus_noise_power: f64,
    /// Analytic demodulated noise power `(n_sc/n_fft) sigma_z^2`.
    pub noise_power: f64,
    pub sinr_linear: f64,
    pub sinr_db: f64,
    /// Standard error of `interference_plus_noise_power`.
    pub standard_error: f64,
}

/// Result of a Monte-Carlo SINR measurement. Bit-identical for identical
/// [`SimConfig`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalReport {
    pub per_subcarrier: Vec<EmpiricalSinr>,
    /// Demodulated symbols per subcarrier entering the statistics.
    pub sample_count: usize,
}

/// Modulates per-block symbol vectors into a sample stream.
///
/// Block `b` carries `symbols[b]` on the allocated bins:
/// `s_b[k] = (1/sqrt(n_sc)) sum_l x[b,l] exp(j 2 pi l k / n_fft)` over the
/// block window, with the CP replicating the window tail. The stream starts
/// at block 0's CP (`t = -n_cp`) and holds `symbols.len()` blocks at stride
/// `n_fft + n_cp`.
pub fn modulate(symbols: &[Vec<Complex64>], grid: &OfdmGrid) -> Result<Stream> {
    let n_fft = grid.n_fft();
    let n_cp = grid.n_cp();
    let stride = grid.block_stride();
    for (block, x) in symbols.iter().enumerate() {
        if x.len() != grid.n_sc() {
            return Err(Error::SymbolCountMismatch {
                block,
                expected: grid.n_sc(),
                actual: x.len(),
            });
        }
    }

    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n_fft);
    let scale = 1.0 / (grid.n_sc() as f64).sqrt();

    let mut samples = vec![Complex64::new(0.0, 0.0); symbols.len() * stride];
    let mut bins = vec![Complex64::new(0.0, 0.0); n_fft];
    for (block, x) in symbols.iter().enumerate() {
        bins.fill(Complex64::new(0.0, 0.0));
        bins[grid.sc_offset()..grid.sc_offset() + grid.n_sc()].copy_from_slice(x);
        ifft.process(&mut bins);
        let out = &mut samples[block * stride..(block + 1) * stride];
        for (k, v) in bins.iter().enumerate() {
            out[n_cp + k] = v * scale;
        }
        for k in 0..n_cp {
            out[k] = out[stride - n_cp + k];
        }
    }
    Ok(Stream::new(-(n_cp as i64), samples))
}

/// Convolves a stream with the channel and adds AWGN of per-sample complex
/// variance `noise_variance`.
///
/// Output sample `k` gathers `s[k - m]` for `m = -l_d ..= l_u`, honoring
/// negative (non-causal) tap delays by index arithmetic on the buffered
/// stream. Samples within `l_u` of the head or `l_d` of the tail convolve
/// with the implicit zero padding; measurement routines skip the edge blocks
/// so those samples never enter statistics. With `noise_variance = 0` no
/// generator is constructed and the output is a pure convolution.
pub fn transmit(stream: &Stream, cir: &Cir, noise_variance: f64, seed: u64) -> Stream {
    assert!(
        noise_variance.is_finite() && noise_variance >= 0.0,
        "noise variance must be finite and non-negative, got {noise_variance}"
    );
    let mut samples = Vec::with_capacity(stream.len());
    for idx in 0..stream.len() as i64 {
        let t = stream.start() + idx;
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, h) in cir.iter() {
            acc += h * stream.get(t - m);
        }
        samples.push(acc);
    }
    if noise_variance > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(NOISE_STREAM);
        let sigma = (noise_variance / 2.0).sqrt();
        for s in &mut samples {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *s += Complex64::new(sigma * re, sigma * im);
        }
    }
    Stream::new(stream.start(), samples)
}

/// Demodulates one block: drops its CP, FFTs the `n_fft` window samples and
/// returns `sqrt(n_sc)/n_fft` times the allocated bins.
///
/// Errors if the block window is not fully inside the stream.
pub fn demodulate(stream: &Stream, block_index: i64, grid: &OfdmGrid) -> Result<Vec<Complex64>> {
    let n_fft = grid.n_fft();
    let window_start = block_index * grid.block_stride() as i64;
    let window_end = window_start + n_fft as i64;
    if window_start < stream.start() || window_end > stream.end() {
        return Err(Error::BlockOutOfStream { block: block_index });
    }

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n_fft);
    let offset = (window_start - stream.start()) as usize;
    let mut bins = stream.samples()[offset..offset + n_fft].to_vec();
    fft.process(&mut bins);

    let scale = (grid.n_sc() as f64).sqrt() / n_fft as f64;
    Ok(grid.subcarriers().map(|i| bins[i] * scale).collect())
}

fn check_probe_support(cir: &Cir, grid: &OfdmGrid) -> Result<()> {
    let max = grid.n_fft() - 1;
    if cir.l_d() > max || cir.l_u() > max {
        return Err(Error::SupportTooLong {
            l_d: cir.l_d(),
            l_u: cir.l_u(),
            max_l_d: max,
            max_l_u: max,
        });
    }
    Ok(())
}

/// Blocks simulated on each side of the demodulated one when probing.
const PROBE_REACH: i64 = 2;

/// Measures one coefficient column by transmission: a lone unit symbol on
/// subcarrier `l` of relative block `b`, zero noise, demodulated at the
/// window center. Returns `y[i] = H[b,l,i]` over the allocated subcarriers,
/// exact up to FFT roundoff. Accepts `|b| <= 2`.
pub fn probe_coefficient(b: i64, l: usize, cir: &Cir, grid: &OfdmGrid) -> Result<Vec<Complex64>> {
    if b.abs() > PROBE_REACH {
        return Err(Error::BadProbeBlock {
            b,
            max_abs: PROBE_REACH,
        });
    }
    grid.check_subcarrier(l)?;
    check_probe_support(cir, grid)?;

    let n_blocks = (2 * PROBE_REACH + 1) as usize;
    let mut symbols = vec![vec![Complex64::new(0.0, 0.0); grid.n_sc()]; n_blocks];
    let probe_block = (PROBE_REACH + b) as usize;
    symbols[probe_block][l - grid.sc_offset()] = Complex64::new(1.0, 0.0);

    let sent = modulate(&symbols, grid)?;
    let received = transmit(&sent, cir, 0.0, 0);
    demodulate(&received, PROBE_REACH, grid)
}

/// Empirical coefficient table: probes every `(b, l)` with `b = -1, 0, +1`.
pub fn measure_coefficients(cir: &Cir, grid: &OfdmGrid) -> Result<CoeffSet> {
    check_probe_support(cir, grid)?;
    let mut set = CoeffSet::zeroed(*grid);
    for b in CoeffSet::BLOCKS {
        for l in grid.subcarriers() {
            let column = probe_coefficient(b, l, cir, grid)?;
            for (j, i) in grid.subcarriers().enumerate() {
                set.set(b, l, i, column[j]);
            }
        }
    }
    Ok(set)
}

fn draw_symbol<R: Rng + ?Sized>(
    rng: &mut R,
    constellation: Constellation,
    power: f64,
) -> Complex64 {
    match constellation {
        Constellation::Qpsk => {
            let amp = (power / 2.0).sqrt();
            let re = if rng.random::<bool>() { amp } else { -amp };
            let im = if rng.random::<bool>() { amp } else { -amp };
            Complex64::new(re, im)
        }
        Constellation::Gaussian => {
            let sigma = (power / 2.0).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(sigma * re, sigma * im)
        }
    }
}

/// Transmits i.i.d. symbol blocks through the channel and measures the
/// per-subcarrier SINR of the interior blocks.
///
/// The desired-signal coefficient is probed noise-free first; the
/// interference-plus-noise power is then the empirical variance of
/// `y[i] - H[0,i,i] x[b,i]` over the interior blocks. The first and last
/// blocks only shield their neighbors and are excluded.
pub fn monte_carlo_sinr(cir: &Cir, sim: &SimConfig) -> Result<EmpiricalReport> {
    sim.validate()?;
    let grid = &sim.grid;
    check_probe_support(cir, grid)?;

    let n_sc = grid.n_sc();
    let mut h_same = vec![Complex64::new(0.0, 0.0); n_sc];
    for (j, i) in grid.subcarriers().enumerate() {
        h_same[j] = probe_coefficient(0, i, cir, grid)?[j];
    }

    let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);
    rng.set_stream(SYMBOL_STREAM);
    let symbols: Vec<Vec<Complex64>> = (0..sim.n_blocks)
        .map(|_| {
            (0..n_sc)
                .map(|_| draw_symbol(&mut rng, sim.constellation, sim.symbol_power))
                .collect()
        })
        .collect();

    let sent = modulate(&symbols, grid)?;
    let received = transmit(&sent, cir, sim.noise_variance, sim.seed);

    let mut sum = vec![0.0; n_sc];
    let mut sum_sq = vec![0.0; n_sc];
    let interior = 1..sim.n_blocks - 1;
    let count = interior.len();
    for block in interior {
        let y = demodulate(&received, block as i64, grid)?;
        for j in 0..n_sc {
            let deviation = y[j] - h_same[j] * symbols[block][j];
            let p = deviation.norm_sqr();
            sum[j] += p;
            sum_sq[j] += p * p;
        }
    }

    let noise_power = grid.n_sc() as f64 / grid.n_fft() as f64 * sim.noise_variance;
    let per_subcarrier = grid
        .subcarriers()
        .enumerate()
        .map(|(j, i)| {
            let mean = sum[j] / count as f64;
            let variance = ((sum_sq[j] - sum[j] * sum[j] / count as f64) / (count as f64 - 1.0))
                .max(0.0);
            let signal_power = h_same[j].norm_sqr() * sim.symbol_power;
            let sinr_linear = signal_power / mean;
            EmpiricalSinr {
                subcarrier: i,
                signal_power,
                interference_plus_noise_power: mean,
                noise_power,
                sinr_linear,
                sinr_db: 10.0 * sinr_linear.log10(),
                standard_error: (variance / count as f64).sqrt(),
            }
        })
        .collect();

    Ok(EmpiricalReport {
        per_subcarrier,
        sample_count: count,
    })
}
