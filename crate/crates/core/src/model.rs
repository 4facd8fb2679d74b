//! Shared domain types: OFDM numerology, channel realizations, power-delay
//! profiles and SNR, plus the rectangular block window.
//!
//! Everything is expressed in samples and subcarrier indices; no physical
//! units are carried around. All types are immutable value objects after
//! construction and safe to share across threads.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// OFDM numerology: FFT size, CP length and the allocated subcarrier range.
///
/// Subcarrier indices `l`, `i` used throughout the crate range over
/// `[sc_offset, sc_offset + n_sc - 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OfdmGrid {
    n_fft: usize,
    n_cp: usize,
    n_sc: usize,
    sc_offset: usize,
}

impl OfdmGrid {
    /// Builds a grid, checking `1 <= n_sc`, `sc_offset + n_sc <= n_fft` and
    /// `n_cp < n_fft`.
    pub fn new(n_fft: usize, n_cp: usize, n_sc: usize, sc_offset: usize) -> Result<Self> {
        if n_fft == 0 {
            return Err(Error::ZeroFftSize);
        }
        if n_cp >= n_fft {
            return Err(Error::CpTooLong { n_cp, n_fft });
        }
        if n_sc == 0 || sc_offset.checked_add(n_sc).is_none_or(|end| end > n_fft) {
            return Err(Error::BadAllocation {
                sc_offset,
                n_sc,
                n_fft,
            });
        }
        Ok(Self {
            n_fft,
            n_cp,
            n_sc,
            sc_offset,
        })
    }

    /// Grid with every subcarrier allocated (`n_sc = n_fft`, offset 0).
    pub fn full_band(n_fft: usize, n_cp: usize) -> Result<Self> {
        Self::new(n_fft, n_cp, n_fft, 0)
    }

    pub fn n_fft(&self) -> usize {
        self.n_fft
    }

    pub fn n_cp(&self) -> usize {
        self.n_cp
    }

    pub fn n_sc(&self) -> usize {
        self.n_sc
    }

    pub fn sc_offset(&self) -> usize {
        self.sc_offset
    }

    /// Samples per OFDM block including its CP.
    pub fn block_stride(&self) -> usize {
        self.n_fft + self.n_cp
    }

    /// Iterator over the allocated subcarrier indices.
    pub fn subcarriers(&self) -> std::ops::Range<usize> {
        self.sc_offset..self.sc_offset + self.n_sc
    }

    pub fn contains_subcarrier(&self, index: usize) -> bool {
        index >= self.sc_offset && index < self.sc_offset + self.n_sc
    }

    pub(crate) fn check_subcarrier(&self, index: usize) -> Result<()> {
        if self.contains_subcarrier(index) {
            Ok(())
        } else {
            Err(Error::SubcarrierOutOfRange {
                index,
                first: self.sc_offset,
                last: self.sc_offset + self.n_sc - 1,
            })
        }
    }
}

/// Rectangular OFDM block window: 1 for `-n_cp <= n <= n_fft - 1`, else 0.
///
/// `rect` is idempotent under squaring, which several closed forms rely on.
pub fn rect_window(n: i64, grid: &OfdmGrid) -> u32 {
    (n >= -(grid.n_cp as i64) && n < grid.n_fft as i64) as u32
}

/// One channel realization: complex taps `h[m]` on the support
/// `m = -l_d ..= l_u` around the time of reference `m = 0`.
///
/// Taps at negative delays model the non-causal channel a receiver observes
/// when its synchronization point sits inside the pulse, not at its start.
#[derive(Debug, Clone, PartialEq)]
pub struct Cir {
    l_d: usize,
    l_u: usize,
    taps: Vec<Complex64>,
}

impl Cir {
    /// Builds a realization from taps ordered `h[-l_d], ..., h[0], ..., h[l_u]`.
    pub fn new(l_d: usize, l_u: usize, taps: Vec<Complex64>) -> Result<Self> {
        let expected = l_d + l_u + 1;
        if taps.len() != expected {
            return Err(Error::TapCountMismatch {
                expected,
                actual: taps.len(),
            });
        }
        for (idx, tap) in taps.iter().enumerate() {
            if !tap.re.is_finite() || !tap.im.is_finite() {
                return Err(Error::NonFiniteTap {
                    tap: idx as i64 - l_d as i64,
                });
            }
        }
        Ok(Self { l_d, l_u, taps })
    }

    /// Causal realization: `h[0], ..., h[l_u]`.
    pub fn causal(taps: Vec<Complex64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::TapCountMismatch {
                expected: 1,
                actual: 0,
            });
        }
        let l_u = taps.len() - 1;
        Self::new(0, l_u, taps)
    }

    /// Single tap `h[m] = gain`, zero elsewhere.
    pub fn single_tap(m: i64, gain: Complex64) -> Self {
        let l_d = (-m).max(0) as usize;
        let l_u = m.max(0) as usize;
        let mut taps = vec![Complex64::new(0.0, 0.0); l_d + l_u + 1];
        taps[(m + l_d as i64) as usize] = gain;
        Self { l_d, l_u, taps }
    }

    pub fn l_d(&self) -> usize {
        self.l_d
    }

    pub fn l_u(&self) -> usize {
        self.l_u
    }

    pub fn is_causal(&self) -> bool {
        self.l_d == 0
    }

    /// Tap at delay `m`; zero outside the support.
    pub fn tap(&self, m: i64) -> Complex64 {
        if m < -(self.l_d as i64) || m > self.l_u as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.taps[(m + self.l_d as i64) as usize]
        }
    }

    /// Iterates `(m, h[m])` over the full support.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let l_d = self.l_d as i64;
        self.taps
            .iter()
            .enumerate()
            .map(move |(idx, &h)| (idx as i64 - l_d, h))
    }

    /// Total tap energy `sum |h[m]|^2`.
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|h| h.norm_sqr()).sum()
    }
}

/// Power-delay profile: average tap energies `E_m` on `m = -l_d ..= l_u`.
///
/// The total energy is stored as given; normalization to unit energy is the
/// caller's choice (see [`Pdp::normalized`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Pdp {
    l_d: usize,
    l_u: usize,
    energies: Vec<f64>,
}

impl Pdp {
    /// Builds a profile from energies ordered `E_{-l_d}, ..., E_{l_u}`.
    pub fn new(l_d: usize, l_u: usize, energies: Vec<f64>) -> Result<Self> {
        let expected = l_d + l_u + 1;
        if energies.len() != expected {
            return Err(Error::TapCountMismatch {
                expected,
                actual: energies.len(),
            });
        }
        for (idx, &e) in energies.iter().enumerate() {
            if !e.is_finite() || e < 0.0 {
                return Err(Error::BadEnergy {
                    tap: idx as i64 - l_d as i64,
                    value: e,
                });
            }
        }
        if energies.iter().all(|&e| e == 0.0) {
            return Err(Error::ZeroEnergyProfile);
        }
        Ok(Self { l_d, l_u, energies })
    }

    /// Causal profile: `E_0, ..., E_{l_u}`.
    pub fn causal(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::TapCountMismatch {
                expected: 1,
                actual: 0,
            });
        }
        let l_u = energies.len() - 1;
        Self::new(0, l_u, energies)
    }

    /// Causal exponential profile `E_m = exp(-m / tau)` for `m = 0 ..= l_u`.
    pub fn exponential(tau: f64, l_u: usize) -> Result<Self> {
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::BadParameter {
                name: "tau",
                value: tau,
            });
        }
        let energies = (0..=l_u).map(|m| (-(m as f64) / tau).exp()).collect();
        Self::new(0, l_u, energies)
    }

    /// Causal flat profile `E_m = 1` for `m = 0 ..= l_u`.
    pub fn uniform(l_u: usize) -> Result<Self> {
        Self::new(0, l_u, vec![1.0; l_u + 1])
    }

    /// Two taps: `E_0 = 1` and `E_delay = ratio` (linear), zero in between.
    pub fn two_tap(delay: usize, ratio: f64) -> Result<Self> {
        if delay == 0 {
            return Err(Error::BadParameter {
                name: "delay",
                value: 0.0,
            });
        }
        if !ratio.is_finite() || ratio <= 0.0 {
            return Err(Error::BadParameter {
                name: "ratio",
                value: ratio,
            });
        }
        let mut energies = vec![0.0; delay + 1];
        energies[0] = 1.0;
        energies[delay] = ratio;
        Self::new(0, delay, energies)
    }

    pub fn l_d(&self) -> usize {
        self.l_d
    }

    pub fn l_u(&self) -> usize {
        self.l_u
    }

    /// Average energy at delay `m`; zero outside the support.
    pub fn energy(&self, m: i64) -> f64 {
        if m < -(self.l_d as i64) || m > self.l_u as i64 {
            0.0
        } else {
            self.energies[(m + self.l_d as i64) as usize]
        }
    }

    /// Iterates `(m, E_m)` over the full support.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let l_d = self.l_d as i64;
        self.energies
            .iter()
            .enumerate()
            .map(move |(idx, &e)| (idx as i64 - l_d, e))
    }

    pub fn total_energy(&self) -> f64 {
        self.energies.iter().sum()
    }

    /// Same profile scaled to unit total energy.
    pub fn normalized(&self) -> Pdp {
        let total = self.total_energy();
        Pdp {
            l_d: self.l_d,
            l_u: self.l_u,
            energies: self.energies.iter().map(|e| e / total).collect(),
        }
    }

    /// Draws one realization with independent complex Gaussian taps of
    /// variance `E_m` per delay.
    pub fn draw_cir<R: Rng + ?Sized>(&self, rng: &mut R) -> Cir {
        let taps = self
            .energies
            .iter()
            .map(|&e| {
                let sigma = (e / 2.0).sqrt();
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(sigma * re, sigma * im)
            })
            .collect();
        Cir {
            l_d: self.l_d,
            l_u: self.l_u,
            taps,
        }
    }
}

/// Post-FFT signal-to-noise ratio `P / sigma_n^2` as a linear quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSpec {
    snr_linear: f64,
}

impl SnrSpec {
    pub fn new(snr_linear: f64) -> Result<Self> {
        if !snr_linear.is_finite() || snr_linear <= 0.0 {
            return Err(Error::BadSnr { value: snr_linear });
        }
        Ok(Self { snr_linear })
    }

    pub fn from_db(snr_db: f64) -> Result<Self> {
        Self::new(10f64.powf(snr_db / 10.0))
    }

    pub fn linear(&self) -> f64 {
        self.snr_linear
    }

    pub fn db(&self) -> f64 {
        10.0 * self.snr_linear.log10()
    }
}

/// Noise term of an SINR denominator: `1/SNR`, or exactly zero for
/// interference-limited analysis.
///
/// The zero variant replaces "infinite SNR"; `SnrSpec` itself only accepts
/// finite positive ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseTerm {
    Snr(SnrSpec),
    Zero,
}

impl NoiseTerm {
    /// Noise power entering a denominator.
    pub fn power(&self) -> f64 {
        match self {
            NoiseTerm::Snr(snr) => 1.0 / snr.linear(),
            NoiseTerm::Zero => 0.0,
        }
    }
}

impl From<SnrSpec> for NoiseTerm {
    fn from(snr: SnrSpec) -> Self {
        NoiseTerm::Snr(snr)
    }
}
