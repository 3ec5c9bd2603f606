//! Metrics and transformations used by the experiments.

mod embed;
mod noise;
mod prediction;
mod spectrum;

pub use embed::{delay_embed, lag_pairs, residuals};
pub use noise::{add_gaussian_noise, gaussian_samples, table_amplitude, NoiseScaling, NOISE_TABLE};
pub use prediction::{
    default_epsilons, epsilon_grid, prediction_curve, prediction_length, prediction_length_2d,
    prediction_length_states, PredictionMode, PredictionReport, ReportMeta, DEFAULT_HORIZON,
    DEFAULT_STRIDE,
};
pub use spectrum::{dominant_period, periodogram, Spectrum};

/// Sample mean and standard deviation (divisor `n - 1`; zero for one value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = crate::sum::compensated_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = crate::sum::compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Median of a non-empty slice; the mean of the middle pair for even length.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[h]
    } else {
        0.5 * (v[h - 1] + v[h])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_basics() {
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }
}
