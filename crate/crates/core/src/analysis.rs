//! Per-subcarrier SINR for one channel realization and the ensemble-average
//! SINR computed straight from a power-delay profile.
//!
//! The instantaneous SINR on subcarrier `i` is
//!
//! ```text
//! SINR_i = |H[0,i,i]|^2 /
//!          ( sum_{l != i} |H[0,l,i]|^2            same-block leakage (ICI)
//!          + sum_l |H[-1,l,i]|^2 + |H[+1,l,i]|^2  neighbor blocks (ISI)
//!          + 1/SNR )
//! ```
//!
//! For a causal channel the ISI term collapses onto same-block quantities,
//! `|H_i - H[0,i,i]|^2 + sum_{l != i} |H[0,l,i]|^2`, so no neighbor-block
//! coefficient is ever formed.
//!
//! Averaging over independent zero-mean taps with energies `E_m` removes all
//! phases and leaves the weight functions only:
//!
//! ```text
//! G_i = sum_m c[m]^2 E_m /
//!       ( sum_m [ (1 - c[m])^2 + 2 sum_{l != i} |ctilde[l,i][m]|^2 ] E_m + 1/SNR )
//! ```
//!
//! and for a fully allocated band the leakage sum telescopes to
//! `c[m] - c[m]^2`, giving the closed form with `(1 - c[m]^2)` in the
//! denominator.

use num_complex::Complex64;

use crate::coefficients::{build_coeff_set, h_0ii, h_0li, h_dft, CoeffMode};
use crate::error::{Error, Result};
use crate::model::{Cir, NoiseTerm, OfdmGrid, Pdp};
use crate::weights::{c_weight, ctilde_weight};

/// Power decomposition and SINR for one subcarrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubcarrierSinr {
    pub subcarrier: usize,
    pub signal_power: f64,
    pub ici_power: f64,
    pub isi_power: f64,
    pub noise_power: f64,
    pub sinr_linear: f64,
    pub sinr_db: f64,
}

/// Per-subcarrier SINR report for one channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrReport {
    pub per_subcarrier: Vec<SubcarrierSinr>,
}

impl SinrReport {
    pub fn len(&self) -> usize {
        self.per_subcarrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_subcarrier.is_empty()
    }

    /// Entry for an absolute subcarrier index.
    pub fn subcarrier(&self, index: usize) -> Option<&SubcarrierSinr> {
        self.per_subcarrier.iter().find(|e| e.subcarrier == index)
    }
}

/// Ensemble-average power terms for one subcarrier, before the SINR ratio is
/// taken. The decomposition mirrors [`SubcarrierSinr`]: `avg_ici_power` is
/// the expected same-block leakage and `avg_isi_power` the expected
/// neighbor-block power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsainrTerms {
    pub subcarrier: usize,
    pub avg_signal_power: f64,
    pub avg_ici_power: f64,
    pub avg_isi_power: f64,
}

fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn entry(
    subcarrier: usize,
    signal: f64,
    ici: f64,
    isi: f64,
    noise: f64,
) -> SubcarrierSinr {
    let sinr_linear = signal / (ici + isi + noise);
    SubcarrierSinr {
        subcarrier,
        signal_power: signal,
        ici_power: ici,
        isi_power: isi,
        noise_power: noise,
        sinr_linear,
        sinr_db: to_db(sinr_linear),
    }
}

/// Instantaneous SINR from the full coefficient table (single-sum route).
///
/// Accepts any channel with `l_d, l_u <= n_fft - 1`, causal or not.
pub fn sinr_general(cir: &Cir, grid: &OfdmGrid, noise: NoiseTerm) -> Result<SinrReport> {
    let set = build_coeff_set(cir, grid, CoeffMode::Simplified)?;
    let noise_power = noise.power();
    let per_subcarrier = grid
        .subcarriers()
        .map(|i| {
            let signal = set.get(0, i, i).norm_sqr();
            let ici: f64 = grid
                .subcarriers()
                .filter(|&l| l != i)
                .map(|l| set.get(0, l, i).norm_sqr())
                .sum();
            let isi: f64 = grid
                .subcarriers()
                .map(|l| set.get(-1, l, i).norm_sqr() + set.get(1, l, i).norm_sqr())
                .sum();
            entry(i, signal, ici, isi, noise_power)
        })
        .collect();
    Ok(SinrReport { per_subcarrier })
}

/// Instantaneous SINR of a causal channel from same-block quantities only:
/// `SINR_i = |H[0,i,i]|^2 / (|H_i - H[0,i,i]|^2 + 2 sum_{l != i} |H[0,l,i]|^2 + 1/SNR)`.
///
/// The reported `isi_power` is `|H_i - H[0,i,i]|^2 + sum_{l != i} |H[0,l,i]|^2`
/// and `ici_power` is `sum_{l != i} |H[0,l,i]|^2`, matching the decomposition
/// of [`sinr_general`].
pub fn sinr_causal(cir: &Cir, grid: &OfdmGrid, noise: NoiseTerm) -> Result<SinrReport> {
    if !cir.is_causal() {
        return Err(Error::NonCausalChannel { l_d: cir.l_d() });
    }
    let max = grid.n_fft() - 1;
    if cir.l_u() > max {
        return Err(Error::SupportTooLong {
            l_d: cir.l_d(),
            l_u: cir.l_u(),
            max_l_d: max,
            max_l_u: max,
        });
    }
    let noise_power = noise.power();
    let per_subcarrier = grid
        .subcarriers()
        .map(|i| {
            let same = h_0ii(i, cir, grid)?;
            let flat = h_dft(i, cir, grid)?;
            let mut ici = 0.0;
            for l in grid.subcarriers() {
                if l != i {
                    ici += h_0li(l, i, cir, grid)?.norm_sqr();
                }
            }
            let isi = (flat - same).norm_sqr() + ici;
            Ok(entry(i, same.norm_sqr(), ici, isi, noise_power))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SinrReport { per_subcarrier })
}

fn check_pdp_support(pdp: &Pdp, grid: &OfdmGrid) -> Result<()> {
    let max = grid.n_fft() - 1;
    if pdp.l_d() > max || pdp.l_u() > max {
        return Err(Error::SupportTooLong {
            l_d: pdp.l_d(),
            l_u: pdp.l_u(),
            max_l_d: max,
            max_l_u: max,
        });
    }
    Ok(())
}

/// Ensemble-average power terms per subcarrier, straight from the profile.
/// Independent of tap phases by construction.
pub fn asainr_terms(pdp: &Pdp, grid: &OfdmGrid) -> Result<Vec<AsainrTerms>> {
    check_pdp_support(pdp, grid)?;
    let mut avg_signal = 0.0;
    let mut avg_trapezoid = 0.0;
    for (m, e) in pdp.iter() {
        let c = c_weight(m, grid);
        avg_signal += c * c * e;
        avg_trapezoid += (1.0 - c) * (1.0 - c) * e;
    }
    grid.subcarriers()
        .map(|i| {
            let mut leakage = 0.0;
            for (m, e) in pdp.iter() {
                if e == 0.0 {
                    continue;
                }
                for l in grid.subcarriers() {
                    if l != i {
                        leakage += ctilde_weight(m, l, i, grid)?.norm_sqr() * e;
                    }
                }
            }
            Ok(AsainrTerms {
                subcarrier: i,
                avg_signal_power: avg_signal,
                avg_ici_power: leakage,
                avg_isi_power: avg_trapezoid + leakage,
            })
        })
        .collect()
}

/// Ensemble-average SINR `G_i` over the allocated subcarriers.
pub fn asainr(pdp: &Pdp, grid: &OfdmGrid, noise: NoiseTerm) -> Result<Vec<f64>> {
    let noise_power = noise.power();
    Ok(asainr_terms(pdp, grid)?
        .into_iter()
        .map(|t| t.avg_signal_power / (t.avg_ici_power + t.avg_isi_power + noise_power))
        .collect())
}

/// Fully allocated band shortcut: a single subcarrier-independent ratio
/// `sum c^2 E / (sum (1 - c^2) E + 1/SNR)`. Rejects `n_sc != n_fft`.
///
/// The closed form holds on the whole trapezoid support, so energies may
/// extend to `[-n_fft, n_fft + n_cp]`.
pub fn asainr_fullband(pdp: &Pdp, grid: &OfdmGrid, noise: NoiseTerm) -> Result<f64> {
    if grid.n_sc() != grid.n_fft() {
        return Err(Error::NotFullBand {
            n_sc: grid.n_sc(),
            n_fft: grid.n_fft(),
        });
    }
    let (max_l_d, max_l_u) = (grid.n_fft(), grid.n_fft() + grid.n_cp());
    if pdp.l_d() > max_l_d || pdp.l_u() > max_l_u {
        return Err(Error::SupportTooLong {
            l_d: pdp.l_d(),
            l_u: pdp.l_u(),
            max_l_d,
            max_l_u,
        });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (m, e) in pdp.iter() {
        let c = c_weight(m, grid);
        num += c * c * e;
        den += (1.0 - c * c) * e;
    }
    Ok(num / (den + noise.power()))
}

/// Scales every tap of a realization by a fixed complex gain.
/// Convenience for phase-invariance checks and derived scenarios.
pub fn scale_cir(cir: &Cir, gain: Complex64) -> Cir {
    let taps = cir.iter().map(|(_, h)| h * gain).collect();
    Cir::new(cir.l_d(), cir.l_u(), taps).expect("support unchanged")
}
