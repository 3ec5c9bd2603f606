//! Seeded additive Gaussian noise.
//!
//! Samples come from SplitMix64 seeded with `seed`, turned into uniforms
//! `u = ((z >> 11) + 1) * 2^-53` in `(0, 1]` and then into normal pairs by the
//! Box-Muller transform `sqrt(-2 ln u1) * (cos 2 pi u2, sin 2 pi u2)`. Both
//! members of each pair are used, in that order.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::mean_std;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseScaling {
    /// Standard deviation `level * std(series)`.
    RelativeToStd,
    /// Standard deviation `level` itself.
    Absolute,
}

impl std::str::FromStr for NoiseScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relative" | "relative-to-std" => Ok(Self::RelativeToStd),
            "absolute" => Ok(Self::Absolute),
            _ => Err(Error::InvalidParameter(format!(
                "unknown noise scaling {s:?} (expected relative or absolute)"
            ))),
        }
    }
}

/// Noise levels with their tabulated absolute amplitudes.
pub const NOISE_TABLE: [(f64, f64); 8] = [
    (0.01, 0.0406),
    (0.05, 0.2029),
    (0.10, 0.4058),
    (0.15, 0.6087),
    (0.20, 0.8116),
    (0.30, 1.2175),
    (0.40, 1.6233),
    (0.50, 2.0291),
];

/// Absolute amplitude for a noise level: the tabulated value when listed,
/// otherwise `level * 4.0582`, the ratio the table follows.
pub fn table_amplitude(level: f64) -> f64 {
    NOISE_TABLE
        .iter()
        .find(|(l, _)| (l - level).abs() < 1e-12)
        .map(|&(_, a)| a)
        .unwrap_or(level * 4.0582)
}

fn uniform(rng: &mut SplitMix64) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `count` standard normal samples for `seed`.
pub fn gaussian_samples(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count + 1);
    while out.len() < count {
        let r = (-2.0 * uniform(&mut rng).ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * uniform(&mut rng);
        out.push(r * theta.cos());
        out.push(r * theta.sin());
    }
    out.truncate(count);
    out
}

pub fn add_gaussian_noise(
    series: &TimeSeries,
    level: f64,
    seed: u64,
    scaling: NoiseScaling,
) -> Result<TimeSeries> {
    if !(level >= 0.0) || !level.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise level must be finite and non-negative, got {level}"
        )));
    }
    if level == 0.0 {
        return Ok(series.clone());
    }
    let xs = series.values();
    let amplitude = match scaling {
        NoiseScaling::Absolute => level,
        NoiseScaling::RelativeToStd => level * mean_std(xs).1,
    };
    let noisy: Vec<f64> = xs
        .iter()
        .zip(gaussian_samples(xs.len(), seed))
        .map(|(x, z)| x + amplitude * z)
        .collect();
    let out = TimeSeries::new(noisy)?;
    Ok(match series.label() {
        Some(l) => out.with_label(l),
        None => out,
    })
}
