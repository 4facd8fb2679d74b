//! Helpers shared by the integration test suites.
//!
//! Each suite links its own copy, so not every helper is used everywhere.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cpsinr_core::{Cir, OfdmGrid};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Gaussian tap with unit variance.
pub fn gaussian_tap<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    use rand_distr::StandardNormal;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re / 2f64.sqrt(), im / 2f64.sqrt())
}

/// Random realization with the given support and i.i.d. unit-variance taps.
pub fn random_cir<R: Rng + ?Sized>(rng: &mut R, l_d: usize, l_u: usize) -> Cir {
    let taps = (0..l_d + l_u + 1).map(|_| gaussian_tap(rng)).collect();
    Cir::new(l_d, l_u, taps).unwrap()
}

/// Random support with both extents up to `n_fft - 1`.
pub fn random_support<R: Rng + ?Sized>(rng: &mut R, grid: &OfdmGrid) -> (usize, usize) {
    let max = grid.n_fft() - 1;
    (rng.random_range(0..=max), rng.random_range(0..=max))
}

/// `exp(j 2 pi num / den)` used by test-side oracles, independent of the
/// library's phase helper.
pub fn phasor(num: i64, den: usize) -> Complex64 {
    let theta = std::f64::consts::TAU * num.rem_euclid(den as i64) as f64 / den as f64;
    Complex64::new(theta.cos(), theta.sin())
}
