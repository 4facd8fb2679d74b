//! Error type shared by the whole crate.

use std::fmt;

/// Errors raised by type construction and by the analysis/simulation operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// FFT size must be at least 1.
    ZeroFftSize,
    /// CP length must be strictly shorter than the FFT window.
    CpTooLong { n_cp: usize, n_fft: usize },
    /// Allocation must hold at least one subcarrier and fit inside the FFT grid.
    BadAllocation {
        sc_offset: usize,
        n_sc: usize,
        n_fft: usize,
    },
    /// Subcarrier index outside the allocated range.
    SubcarrierOutOfRange {
        index: usize,
        first: usize,
        last: usize,
    },
    /// Operation needs two distinct subcarrier indices.
    IdenticalSubcarriers { index: usize },
    /// (l − i) is a multiple of the FFT size, so the leakage-weight denominator vanishes.
    AliasedSubcarriers { l: usize, i: usize, n_fft: usize },
    /// Tap or energy array length does not match the declared support.
    TapCountMismatch { expected: usize, actual: usize },
    /// Channel tap with a non-finite component.
    NonFiniteTap { tap: i64 },
    /// Tap/energy support extends beyond what the operation accepts.
    SupportTooLong {
        l_d: usize,
        l_u: usize,
        max_l_d: usize,
        max_l_u: usize,
    },
    /// Operation requires a causal channel (`l_d` = 0).
    NonCausalChannel { l_d: usize },
    /// Negative or non-finite average tap energy.
    BadEnergy { tap: i64, value: f64 },
    /// Power-delay profile with zero total energy.
    ZeroEnergyProfile,
    /// SNR must be a finite, strictly positive linear ratio.
    BadSnr { value: f64 },
    /// Operation is defined only for a fully allocated band (`n_sc` = `n_fft`).
    NotFullBand { n_sc: usize, n_fft: usize },
    /// Inter-block coefficient index must be −1 or +1.
    BadIsiBlock { b: i64 },
    /// Probe block index outside the simulated block window.
    BadProbeBlock { b: i64, max_abs: i64 },
    /// Symbol vector length differs from the allocation size.
    SymbolCountMismatch {
        block: usize,
        expected: usize,
        actual: usize,
    },
    /// Requested block lies (partly) outside the sample stream.
    BlockOutOfStream { block: i64 },
    /// Monte-Carlo measurements need at least `min` blocks.
    TooFewBlocks { n_blocks: usize, min: usize },
    /// Non-finite or out-of-range scalar parameter.
    BadParameter { name: &'static str, value: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Error::ZeroFftSize => write!(f, "FFT size must be at least 1"),
            Error::CpTooLong { n_cp, n_fft } => {
                write!(f, "CP length {n_cp} must be shorter than the FFT size {n_fft}")
            }
            Error::BadAllocation {
                sc_offset,
                n_sc,
                n_fft,
            } => write!(
                f,
                "allocation of {n_sc} subcarriers at offset {sc_offset} does not fit an FFT of size {n_fft}"
            ),
            Error::SubcarrierOutOfRange { index, first, last } => write!(
                f,
                "subcarrier {index} outside the allocated range [{first}, {last}]"
            ),
            Error::IdenticalSubcarriers { index } => write!(
                f,
                "source and observed subcarrier are both {index}; this operation needs l != i"
            ),
            Error::AliasedSubcarriers { l, i, n_fft } => write!(
                f,
                "subcarriers l={l}, i={i} alias (l - i is a multiple of {n_fft})"
            ),
            Error::TapCountMismatch { expected, actual } => write!(
                f,
                "support declares {expected} taps but {actual} were provided"
            ),
            Error::NonFiniteTap { tap } => write!(f, "tap at delay {tap} is not finite"),
            Error::SupportTooLong {
                l_d,
                l_u,
                max_l_d,
                max_l_u,
            } => write!(
                f,
                "tap support [-{l_d}, {l_u}] exceeds the accepted range [-{max_l_d}, {max_l_u}]"
            ),
            Error::NonCausalChannel { l_d } => {
                write!(f, "operation requires a causal channel, got l_d = {l_d}")
            }
            Error::BadEnergy { tap, value } => {
                write!(f, "energy {value} at delay {tap} must be finite and >= 0")
            }
            Error::ZeroEnergyProfile => write!(f, "power-delay profile has no energy"),
            Error::BadSnr { value } => {
                write!(f, "SNR must be finite and > 0 in linear scale, got {value}")
            }
            Error::NotFullBand { n_sc, n_fft } => write!(
                f,
                "operation requires n_sc = n_fft, got n_sc = {n_sc}, n_fft = {n_fft}"
            ),
            Error::BadIsiBlock { b } => {
                write!(f, "inter-block coefficient index must be -1 or +1, got {b}")
            }
            Error::BadProbeBlock { b, max_abs } => {
                write!(f, "probe block {b} outside the simulated window |b| <= {max_abs}")
            }
            Error::SymbolCountMismatch {
                block,
                expected,
                actual,
            } => write!(
                f,
                "block {block} carries {actual} symbols, allocation expects {expected}"
            ),
            Error::BlockOutOfStream { block } => {
                write!(f, "block {block} lies outside the sample stream")
            }
            Error::TooFewBlocks { n_blocks, min } => {
                write!(f, "{n_blocks} blocks requested, at least {min} required")
            }
            Error::BadParameter { name, value } => {
                write!(f, "parameter `{name}` has invalid value {value}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
