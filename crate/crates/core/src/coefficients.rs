//! Demodulated channel coefficients `H[b,l,i]`: the response of observed
//! subcarrier `i` in the demodulated block to the symbol sent on subcarrier
//! `l` of block `b` (relative to the demodulated one).
//!
//! Two routes are provided:
//!
//! * [`h_bli_direct`] evaluates the defining double sum over the FFT window
//!   and the tap support. It is slow, assumption-free, and serves as the
//!   ground-truth oracle for everything else.
//! * The single-sum forms ([`h_0ii`], [`h_0li`], [`h_isi`], [`h_dft`]) fold
//!   the window sum into the weight functions of [`crate::weights`], turning
//!   each coefficient into one weighted Fourier sum over the taps.
//!
//! With the tap support limited to less than one FFT length on both sides,
//! only blocks `b = -1, 0, +1` couple into the demodulated block; for a
//! causal channel the previous-block coefficients collapse onto the `b = 0`
//! ones and `b = +1` vanishes entirely.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{rect_window, Cir, OfdmGrid};
use crate::weights::{c_weight, ctilde_weight, unit_phasor};

/// Which evaluation route populates a [`CoeffSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffMode {
    /// Defining double sum, any tap support.
    Direct,
    /// Single weighted sums; requires `l_d, l_u <= n_fft - 1`.
    Simplified,
}

/// Dense table of coefficients for blocks `b = -1, 0, +1` and all allocated
/// `(l, i)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSet {
    grid: OfdmGrid,
    values: Vec<Complex64>,
}

impl CoeffSet {
    /// Block indices covered by a set, in storage order.
    pub const BLOCKS: [i64; 3] = [-1, 0, 1];

    pub(crate) fn zeroed(grid: OfdmGrid) -> Self {
        let n = grid.n_sc();
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); 3 * n * n],
        }
    }

    fn index(&self, b: i64, l: usize, i: usize) -> usize {
        assert!(
            (-1..=1).contains(&b),
            "coefficient set covers blocks -1..=1, got b={b}"
        );
        assert!(
            self.grid.contains_subcarrier(l) && self.grid.contains_subcarrier(i),
            "subcarrier pair ({l}, {i}) outside the allocated range"
        );
        let n = self.grid.n_sc();
        let off = self.grid.sc_offset();
        ((b + 1) as usize * n + (l - off)) * n + (i - off)
    }

    /// Coefficient for block `b`, source subcarrier `l`, observed `i`.
    ///
    /// Panics when `b` is outside `-1..=1` or an index is unallocated.
    pub fn get(&self, b: i64, l: usize, i: usize) -> Complex64 {
        self.values[self.index(b, l, i)]
    }

    pub(crate) fn set(&mut self, b: i64, l: usize, i: usize, value: Complex64) {
        let idx = self.index(b, l, i);
        self.values[idx] = value;
    }

    pub fn grid(&self) -> &OfdmGrid {
        &self.grid
    }

    /// Iterates `(b, l, i, value)` over every stored entry.
    pub fn entries(&self) -> impl Iterator<Item = (i64, usize, usize, Complex64)> + '_ {
        let n = self.grid.n_sc();
        let off = self.grid.sc_offset();
        self.values.iter().enumerate().map(move |(idx, &v)| {
            let i = idx % n;
            let l = (idx / n) % n;
            let b = (idx / (n * n)) as i64 - 1;
            (b, l + off, i + off, v)
        })
    }

    /// Largest entrywise magnitude difference against another set on the
    /// same grid.
    pub fn max_abs_diff(&self, other: &CoeffSet) -> f64 {
        assert_eq!(self.grid, other.grid, "coefficient sets on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_window_support(cir: &Cir, grid: &OfdmGrid) -> Result<()> {
    let max_l_d = grid.n_fft();
    let max_l_u = grid.n_fft() + grid.n_cp();
    if cir.l_d() > max_l_d || cir.l_u() > max_l_u {
        return Err(Error::SupportTooLong {
            l_d: cir.l_d(),
            l_u: cir.l_u(),
            max_l_d,
            max_l_u,
        });
    }
    Ok(())
}

fn check_block_support(cir: &Cir, grid: &OfdmGrid) -> Result<()> {
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

/// Defining double sum
/// `(1/n_fft) sum_k sum_m h[m] exp(-j 2 pi (l m - k (l-i) + b l n_cp)/n_fft)
///  rect(k - m - b (n_fft + n_cp))`,
/// evaluated term by term. Accepts any tap support; `O(n_fft * taps)` per
/// coefficient. This is the module's ground-truth oracle.
pub fn h_bli_direct(b: i64, l: usize, i: usize, cir: &Cir, grid: &OfdmGrid) -> Result<Complex64> {
    grid.check_subcarrier(l)?;
    grid.check_subcarrier(i)?;
    let n = grid.n_fft() as i64;
    let cp = grid.n_cp() as i64;
    let stride = grid.block_stride() as i64;
    let li = l as i64;
    let ii = i as i64;

    let mut acc = Complex64::new(0.0, 0.0);
    for (m, h) in cir.iter() {
        for k in 0..n {
            if rect_window(k - m - b * stride, grid) == 0 {
                continue;
            }
            acc += h * unit_phasor(-(li * m) + k * (li - ii) - b * li * cp, grid.n_fft());
        }
    }
    Ok(acc / n as f64)
}

/// Desired-signal coefficient `H[0,i,i] = sum_m c[m] h[m] exp(-j 2 pi i m / n_fft)`.
///
/// Requires the tap support to stay inside the trapezoid window
/// `[-n_fft, n_fft + n_cp]`.
pub fn h_0ii(i: usize, cir: &Cir, grid: &OfdmGrid) -> Result<Complex64> {
    grid.check_subcarrier(i)?;
    check_window_support(cir, grid)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, h) in cir.iter() {
        acc += h * c_weight(m, grid) * unit_phasor(-(i as i64) * m, grid.n_fft());
    }
    Ok(acc)
}

/// Same-block leakage coefficient
/// `H[0,l,i] = sum_m ctilde[l,i][m] h[m] exp(-j 2 pi l m / n_fft)` for `l != i`.
pub fn h_0li(l: usize, i: usize, cir: &Cir, grid: &OfdmGrid) -> Result<Complex64> {
    grid.check_subcarrier(l)?;
    grid.check_subcarrier(i)?;
    if l == i {
        return Err(Error::IdenticalSubcarriers { index: l });
    }
    check_window_support(cir, grid)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, h) in cir.iter() {
        let w = ctilde_weight(m, l, i, grid)?;
        acc += h * w * unit_phasor(-(l as i64) * m, grid.n_fft());
    }
    Ok(acc)
}

/// Neighbor-block coefficient `H[b,l,i]` for `b = -1` (previous block, taps
/// at delays `>= n_cp`) or `b = +1` (next block, taps at delays `<= 0`).
///
/// Uses `(1 - c[m])` for `l = i` and `-ctilde[l,i][m]` otherwise, with the
/// block phase `exp(-j 2 pi b l n_cp / n_fft)`. Requires
/// `l_d, l_u <= n_fft - 1`.
pub fn h_isi(b: i64, l: usize, i: usize, cir: &Cir, grid: &OfdmGrid) -> Result<Complex64> {
    if b != -1 && b != 1 {
        return Err(Error::BadIsiBlock { b });
    }
    grid.check_subcarrier(l)?;
    grid.check_subcarrier(i)?;
    check_block_support(cir, grid)?;

    let n_fft = grid.n_fft();
    let cp = grid.n_cp() as i64;
    let phase = unit_phasor(-b * l as i64 * cp, n_fft);
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, h) in cir.iter() {
        let in_range = if b == -1 { m >= cp } else { m <= 0 };
        if !in_range {
            continue;
        }
        let w = if l == i {
            Complex64::new(1.0 - c_weight(m, grid), 0.0)
        } else {
            -ctilde_weight(m, l, i, grid)?
        };
        acc += h * w * unit_phasor(-(l as i64) * m, n_fft);
    }
    Ok(phase * acc)
}

/// Plain channel transfer function
/// `H_i = sum_{m=0}^{l_u} h[m] exp(-j 2 pi i m / n_fft)` of a causal channel.
pub fn h_dft(i: usize, cir: &Cir, grid: &OfdmGrid) -> Result<Complex64> {
    grid.check_subcarrier(i)?;
    if !cir.is_causal() {
        return Err(Error::NonCausalChannel { l_d: cir.l_d() });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, h) in cir.iter() {
        acc += h * unit_phasor(-(i as i64) * m, grid.n_fft());
    }
    Ok(acc)
}

/// Populates all `(b, l, i)` coefficients for `b = -1, 0, +1` using the
/// requested route.
///
/// In simplified mode a causal channel takes the shortcut
/// `H[-1,i,i] = exp(j 2 pi i n_cp / n_fft) (H_i - H[0,i,i])` and
/// `H[-1,l,i] = -exp(j 2 pi l n_cp / n_fft) H[0,l,i]`, with `b = +1`
/// vanishing identically.
pub fn build_coeff_set(cir: &Cir, grid: &OfdmGrid, mode: CoeffMode) -> Result<CoeffSet> {
    let mut set = CoeffSet::zeroed(*grid);
    match mode {
        CoeffMode::Direct => {
            for b in CoeffSet::BLOCKS {
                for l in grid.subcarriers() {
                    for i in grid.subcarriers() {
                        set.set(b, l, i, h_bli_direct(b, l, i, cir, grid)?);
                    }
                }
            }
        }
        CoeffMode::Simplified => {
            check_block_support(cir, grid)?;
            let causal = cir.is_causal();
            let cp = grid.n_cp() as i64;
            for l in grid.subcarriers() {
                for i in grid.subcarriers() {
                    let base = if l == i {
                        h_0ii(i, cir, grid)?
                    } else {
                        h_0li(l, i, cir, grid)?
                    };
                    set.set(0, l, i, base);
                    if causal {
                        let prev = if l == i {
                            unit_phasor(i as i64 * cp, grid.n_fft())
                                * (h_dft(i, cir, grid)? - base)
                        } else {
                            -unit_phasor(l as i64 * cp, grid.n_fft()) * base
                        };
                        set.set(-1, l, i, prev);
                        // Next-block leakage needs taps at negative delays.
                    } else {
                        set.set(-1, l, i, h_isi(-1, l, i, cir, grid)?);
                        set.set(1, l, i, h_isi(1, l, i, cir, grid)?);
                    }
                }
            }
        }
    }
    Ok(set)
}
