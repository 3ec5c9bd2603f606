use crate::dynamics::{iterate_prefix, Forecaster, State};
use crate::error::{Error, Result};
use crate::series::{TimeSeries, TimeSeries2D};

/// Spacing of start points in [`PredictionMode::MeanOverSet`].
pub const DEFAULT_STRIDE: usize = 100;
/// Longest prediction scored from each start in [`PredictionMode::MeanOverSet`].
pub const DEFAULT_HORIZON: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionMode {
    /// One prediction from the last training point, scored against the held-out
    /// continuation.
    EndOfSet,
    /// Predictions from every `stride`-th training point, scored against the
    /// training data that follows, with `T` averaged over starts.
    MeanOverSet { stride: usize, horizon: usize },
}

impl PredictionMode {
    pub fn mean_over_set() -> Self {
        PredictionMode::MeanOverSet {
            stride: DEFAULT_STRIDE,
            horizon: DEFAULT_HORIZON,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PredictionMode::EndOfSet => "end-of-set",
            PredictionMode::MeanOverSet { .. } => "mean-over-set",
        }
    }
}

impl std::str::FromStr for PredictionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "end" | "end-of-set" => Ok(PredictionMode::EndOfSet),
            "mean" | "mean-over-set" => Ok(PredictionMode::mean_over_set()),
            _ => Err(Error::InvalidParameter(format!(
                "unknown prediction mode {s:?} (expected end-of-set or mean-over-set)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportMeta {
    pub order: Option<usize>,
    pub label: Option<String>,
    pub noise_level: Option<f64>,
    pub seed: Option<u64>,
}

/// `T(epsilon)` over a tolerance grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    pub epsilons: Vec<f64>,
    pub lengths: Vec<usize>,
    /// Unrounded averages; equal to `lengths` in end-of-set mode.
    pub mean_lengths: Vec<f64>,
    pub mode: PredictionMode,
    pub meta: ReportMeta,
    /// Number of predictions that were scored.
    pub starts: usize,
    /// Training indices (or the last index, in end-of-set mode) whose
    /// prediction left the divergence bound before the horizon.
    pub diverged_starts: Vec<usize>,
}

impl PredictionReport {
    pub fn with_meta(mut self, meta: ReportMeta) -> Self {
        self.meta = meta;
        self
    }

    /// `T` at the given tolerance, if it is on the grid.
    pub fn length_at(&self, epsilon: f64) -> Option<usize> {
        self.epsilons
            .iter()
            .position(|&e| (e - epsilon).abs() <= 1e-12 * epsilon.abs())
            .map(|i| self.lengths[i])
    }
}

/// Length of the prefix on which every prediction is within `epsilon`.
pub fn prediction_length_states<S: State>(predicted: &[S], truth: &[S], epsilon: f64) -> usize {
    predicted
        .iter()
        .zip(truth)
        .take_while(|(p, t)| p.distance(t) <= epsilon)
        .count()
}

pub fn prediction_length(predicted: &TimeSeries, truth: &TimeSeries, epsilon: f64) -> usize {
    prediction_length_states(predicted.values(), truth.values(), epsilon)
}

/// Scores planar predictions by Euclidean distance.
pub fn prediction_length_2d(predicted: &TimeSeries2D, truth: &TimeSeries2D, epsilon: f64) -> usize {
    prediction_length_states(predicted.values(), truth.values(), epsilon)
}

/// `start, start + step, ..` up to `stop` inclusive, snapped to 12 decimals.
pub fn epsilon_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop >= start && step > 0.0 && stop.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "grid needs 0 < start <= stop and step > 0, got {start}:{stop}:{step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Error::InvalidParameter(format!("grid has {count} points")));
    }
    let grid: Vec<f64> = (0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect();
    check_epsilons(&grid)?;
    Ok(grid)
}

/// `0.01, 0.02, .., 0.35`.
pub fn default_epsilons() -> Vec<f64> {
    epsilon_grid(0.01, 0.35, 0.01).unwrap()
}

fn check_epsilons(epsilons: &[f64]) -> Result<()> {
    if epsilons.is_empty() {
        return Err(Error::InvalidParameter("empty tolerance grid".into()));
    }
    if !epsilons.iter().all(|e| e.is_finite() && *e > 0.0)
        || epsilons.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidParameter(
            "tolerances must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `T(epsilon)` for a fitted model.
///
/// A prediction that diverges is scored on the steps it completed; the start is
/// listed in [`PredictionReport::diverged_starts`].
pub fn prediction_curve<F: Forecaster>(
    model: &F,
    training: &[F::State],
    continuation: &[F::State],
    epsilons: &[f64],
    mode: PredictionMode,
) -> Result<PredictionReport> {
    check_epsilons(epsilons)?;
    let mut diverged_starts = Vec::new();
    let (lengths, mean_lengths, starts) = match mode {
        PredictionMode::EndOfSet => {
            if training.is_empty() || continuation.is_empty() {
                return Err(Error::SeriesTooShort {
                    needed: 1,
                    got: training.len().min(continuation.len()),
                });
            }
            let last = training.len() - 1;
            let (pred, failed) = iterate_prefix(model, training[last], continuation.len());
            if failed.is_some() {
                diverged_starts.push(last);
            }
            let lengths: Vec<usize> = epsilons
                .iter()
                .map(|&e| prediction_length_states(&pred, continuation, e))
                .collect();
            let means = lengths.iter().map(|&t| t as f64).collect();
            (lengths, means, 1)
        }
        PredictionMode::MeanOverSet { stride, horizon } => {
            if stride == 0 || horizon == 0 {
                return Err(Error::InvalidParameter(
                    "stride and horizon must be positive".into(),
                ));
            }
            if training.len() < 2 {
                return Err(Error::SeriesTooShort {
                    needed: 2,
                    got: training.len(),
                });
            }
            let mut totals = vec![0usize; epsilons.len()];
            let mut starts = 0;
            for t in (0..training.len() - 1).step_by(stride) {
                let h = horizon.min(training.len() - 1 - t);
                let truth = &training[t + 1..t + 1 + h];
                let (pred, failed) = iterate_prefix(model, training[t], h);
                if failed.is_some() {
                    diverged_starts.push(t);
                }
                for (total, &e) in totals.iter_mut().zip(epsilons) {
                    *total += prediction_length_states(&pred, truth, e);
                }
                starts += 1;
            }
            let means: Vec<f64> = totals.iter().map(|&s| s as f64 / starts as f64).collect();
            let lengths = means.iter().map(|m| m.round() as usize).collect();
            (lengths, means, starts)
        }
    };
    Ok(PredictionReport {
        epsilons: epsilons.to_vec(),
        lengths,
        mean_lengths,
        mode,
        meta: ReportMeta::default(),
        starts,
        diverged_starts,
    })
}
