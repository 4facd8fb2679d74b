//! Analysis of OFDM transmission when the channel delay spread exceeds the
//! cyclic prefix.
//!
//! The crate computes the demodulated channel coefficients `H[b,l,i]` that
//! couple the symbol on subcarrier `l` of block `b` into observed subcarrier
//! `i`, both as the defining double sum and as single weighted Fourier sums
//! over the channel taps. On top of the coefficients it evaluates the
//! per-subcarrier SINR of one channel realization, a causal-channel shortcut,
//! and the ensemble-average SINR taken directly from a power-delay profile.
//! A time-domain Monte-Carlo link simulator provides an independent
//! measurement path for every one of those quantities.
//!
//! Modules:
//!
//! * [`model`]: numerology, channel realizations, power-delay profiles, SNR.
//! * [`weights`]: the window-overlap and leakage weight functions.
//! * [`coefficients`]: `H[b,l,i]` via both routes.
//! * [`analysis`]: instantaneous SINR and ensemble-average SINR.
//! * [`linksim`]: modulate / convolve / AWGN / demodulate simulator.
//!
//! # Example
//!
//! ```
//! use cpsinr_core::{sinr_general, Cir, NoiseTerm, OfdmGrid, SnrSpec};
//! use num_complex::Complex64;
//!
//! let grid = OfdmGrid::full_band(64, 16)?;
//! // Two-path channel: the echo lands three samples past the CP.
//! let mut taps = vec![Complex64::new(0.0, 0.0); 20];
//! taps[0] = Complex64::new(1.0, 0.0);
//! taps[19] = Complex64::new(0.5, 0.0);
//! let cir = Cir::causal(taps)?;
//!
//! let snr = SnrSpec::from_db(20.0)?;
//! let report = sinr_general(&cir, &grid, NoiseTerm::Snr(snr))?;
//! for entry in &report.per_subcarrier {
//!     assert!(entry.sinr_db < 20.0); // leakage costs SINR everywhere
//! }
//! # Ok::<(), cpsinr_core::Error>(())
//! ```

pub mod analysis;
pub mod coefficients;
pub mod error;
pub mod linksim;
pub mod model;
pub mod weights;

pub use analysis::{
    asainr, asainr_fullband, asainr_terms, sinr_causal, sinr_general, AsainrTerms, SinrReport,
    SubcarrierSinr,
};
pub use coefficients::{
    build_coeff_set, h_0ii, h_0li, h_bli_direct, h_dft, h_isi, CoeffMode, CoeffSet,
};
pub use error::{Error, Result};
pub use linksim::{
    demodulate, measure_coefficients, modulate, monte_carlo_sinr, probe_coefficient, transmit,
    Constellation, EmpiricalReport, EmpiricalSinr, SimConfig, Stream,
};
pub use model::{rect_window, Cir, NoiseTerm, OfdmGrid, Pdp, SnrSpec};
