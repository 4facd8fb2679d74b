//! Weight functions that collapse each demodulated channel coefficient into a
//! single weighted Fourier sum over the channel taps.
//!
//! For a tap at delay `m`:
//!
//! * `c[m]` is the fraction of the FFT window covered by that tap's block
//!   window, a trapezoid equal to `(1/n_fft) * sum_k rect(k - m)` over the
//!   FFT window `k = 0 .. n_fft-1`:
//!
//!   ```text
//!   c[m] = (n_fft + m) / n_fft            -n_fft <= m <= 0
//!          1                               0     <= m <= n_cp
//!          (n_fft - (m - n_cp)) / n_fft    n_cp  <= m <= n_cp + n_fft
//!          0                               otherwise
//!   ```
//!
//! * `ctilde[l,i][m]` is the complex leakage weight from subcarrier `l` onto
//!   subcarrier `i`, the same window sum with the `k`-th term rotated by
//!   `exp(j 2 pi k (l-i) / n_fft)`; it vanishes identically on the CP region,
//!   which is why a long-enough CP removes inter-carrier leakage.
//!
//! * `a[b,l,i][m]` covers neighboring blocks: a phase rotation times `c` or
//!   `ctilde` evaluated at the block-shifted delay `m + b (n_fft + n_cp)`.
//!
//! Overlapping branch boundaries (`m = 0`, `m = n_cp`) agree exactly, so no
//! branch choice is observable. All functions are pure and stateless.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::OfdmGrid;

/// `exp(j 2 pi num / den)` with the integer phase reduced modulo `den` first,
/// so large index products do not lose precision in the trig evaluation.
pub(crate) fn unit_phasor(num: i64, den: usize) -> Complex64 {
    let den = den as i64;
    let r = num.rem_euclid(den);
    let theta = std::f64::consts::TAU * (r as f64) / (den as f64);
    Complex64::new(theta.cos(), theta.sin())
}

/// Trapezoidal window-overlap weight `c[m]`, in `[0, 1]`.
pub fn c_weight(m: i64, grid: &OfdmGrid) -> f64 {
    let n = grid.n_fft() as i64;
    let cp = grid.n_cp() as i64;
    // Integer numerator keeps both branches and the rect-sum oracle on the
    // same rational value count / n_fft.
    let count = if m < -n || m > cp + n {
        0
    } else if m <= 0 {
        n + m
    } else if m <= cp {
        n
    } else {
        n - (m - cp)
    };
    count as f64 / n as f64
}

/// Complex leakage weight `ctilde[l,i][m]` for `l != i`.
///
/// Rejects `l == i` (the desired-signal weight is `c`, not a limit of this
/// one) and any pair with `(l - i)` a multiple of `n_fft`, where the
/// geometric-ratio denominator vanishes.
pub fn ctilde_weight(m: i64, l: usize, i: usize, grid: &OfdmGrid) -> Result<Complex64> {
    if l == i {
        return Err(Error::IdenticalSubcarriers { index: l });
    }
    let n = grid.n_fft() as i64;
    let cp = grid.n_cp() as i64;
    let d = l as i64 - i as i64;
    if d.rem_euclid(n) == 0 {
        return Err(Error::AliasedSubcarriers {
            l,
            i,
            n_fft: grid.n_fft(),
        });
    }

    let zero = Complex64::new(0.0, 0.0);
    if m < -n || m > cp + n || (m >= 0 && m <= cp) {
        return Ok(zero);
    }
    let denom = (Complex64::new(1.0, 0.0) - unit_phasor(d, grid.n_fft())) * grid.n_fft() as f64;
    let numer = if m < 0 {
        Complex64::new(1.0, 0.0) - unit_phasor(m * d, grid.n_fft())
    } else {
        unit_phasor((m - cp) * d, grid.n_fft()) - Complex64::new(1.0, 0.0)
    };
    Ok(numer / denom)
}

/// Block-`b` weight `a[b,l,i][m]`: a phase rotation times the block-shifted
/// base weight, zero whenever the shifted delay falls outside the support.
pub fn a_weight(b: i64, m: i64, l: usize, i: usize, grid: &OfdmGrid) -> Result<Complex64> {
    let shift = b * grid.block_stride() as i64;
    let phase = unit_phasor(-b * l as i64 * grid.n_cp() as i64, grid.n_fft());
    if l == i {
        Ok(phase * c_weight(m + shift, grid))
    } else {
        Ok(phase * ctilde_weight(m + shift, l, i, grid)?)
    }
}
