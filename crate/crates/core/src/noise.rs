//! Shot-noise emulation with a counter-based keyed generator.
//!
//! Cell `(i, j)` draws from ChaCha8 seeded by `seed` on stream `(i << 32) | j`,
//! so a noisy grid depends only on `(seed, grid)` and not on evaluation order
//! or platform.

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::hardware::apply_readout_error;
use crate::landscape::LandscapeGrid;
use crate::{Error, Result};

fn cell_rng(seed: u64, row: usize, col: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((row as u64) << 32) | col as u64);
    rng
}

/// Uniform in [0, 1) from the top 53 bits.
#[inline]
fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Fraction of `shots` Bernoulli(p) trials that succeed, keyed by `(seed, row, col)`.
pub fn shot_fraction(p: f64, shots: u32, seed: u64, row: usize, col: usize) -> f64 {
    let mut rng = cell_rng(seed, row, col);
    let hits = (0..shots).filter(|_| unit_f64(&mut rng) < p).count();
    hits as f64 / shots as f64
}

/// Replaces each cell with `k/shots`, `k ~ Binomial(shots, p₂)`.
pub fn add_shot_noise(grid: &LandscapeGrid, shots: u32, seed: u64) -> Result<LandscapeGrid> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be >= 1".into()));
    }
    let cols = grid.cols();
    let p2 = grid
        .p2
        .iter()
        .enumerate()
        .map(|(k, &p)| shot_fraction(p, shots, seed, k / cols, k % cols))
        .collect();
    let mut out = grid.clone();
    out.p2 = p2;
    Ok(out)
}

/// Readout error followed by shot sampling, as a measured landscape would appear.
pub fn measured(grid: &LandscapeGrid, shots: u32, seed: u64, readout_error: f64) -> Result<LandscapeGrid> {
    let mut flipped = grid.clone();
    for p in flipped.p2.iter_mut() {
        *p = apply_readout_error(*p, readout_error)?;
    }
    add_shot_noise(&flipped, shots, seed)
}

/// Sample standard deviation helper shared by tests and reports.
pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}
