//! Iteration of fitted one-step maps.

use crate::error::Error;
use crate::DIVERGENCE_BOUND;

/// A point of state space that can be compared against a tolerance.
pub trait State: Copy + std::fmt::Debug {
    /// Distance used to score predictions (absolute difference, or Euclidean).
    fn distance(&self, other: &Self) -> f64;

    /// Largest absolute coordinate; non-finite states report infinity.
    fn magnitude(&self) -> f64;
}

impl State for f64 {
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }

    fn magnitude(&self) -> f64 {
        if self.is_finite() {
            self.abs()
        } else {
            f64::INFINITY
        }
    }
}

impl State for [f64; 2] {
    fn distance(&self, other: &Self) -> f64 {
        (self[0] - other[0]).hypot(self[1] - other[1])
    }

    fn magnitude(&self) -> f64 {
        if self[0].is_finite() && self[1].is_finite() {
            self[0].abs().max(self[1].abs())
        } else {
            f64::INFINITY
        }
    }
}

/// A deterministic one-step predictor.
pub trait Forecaster {
    type State: State;

    fn step(&self, state: Self::State) -> Self::State;
}

/// An iterated prediction that left the divergence bound.
///
/// `prefix` holds the steps completed before the offending value.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergedPrediction<S> {
    pub prefix: Vec<S>,
    pub value: S,
}

impl<S: State> DivergedPrediction<S> {
    pub fn completed(&self) -> usize {
        self.prefix.len()
    }
}

impl<S: State> std::fmt::Display for DivergedPrediction<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "prediction diverged after {} steps (value {:?})",
            self.prefix.len(),
            self.value
        )
    }
}

impl<S: State> std::error::Error for DivergedPrediction<S> {}

impl<S: State> From<DivergedPrediction<S>> for Error {
    fn from(d: DivergedPrediction<S>) -> Self {
        Error::PredictionDiverged {
            completed: d.prefix.len(),
            value: d.value.magnitude(),
        }
    }
}

/// `steps` iterates of `model` starting from (and excluding) `start`.
pub fn iterate<F: Forecaster>(
    model: &F,
    start: F::State,
    steps: usize,
) -> Result<Vec<F::State>, DivergedPrediction<F::State>> {
    let mut out = Vec::with_capacity(steps);
    let mut state = start;
    for _ in 0..steps {
        state = model.step(state);
        if !(state.magnitude() <= DIVERGENCE_BOUND) {
            return Err(DivergedPrediction {
                prefix: out,
                value: state,
            });
        }
        out.push(state);
    }
    Ok(out)
}

/// Like [`iterate`], but keeps the prefix when the orbit escapes.
pub fn iterate_prefix<F: Forecaster>(
    model: &F,
    start: F::State,
    steps: usize,
) -> (Vec<F::State>, Option<usize>) {
    match iterate(model, start, steps) {
        Ok(v) => (v, None),
        Err(d) => {
            let at = d.prefix.len();
            (d.prefix, Some(at))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Doubler;

    impl Forecaster for Doubler {
        type State = f64;
        fn step(&self, x: f64) -> f64 {
            2.0 * x
        }
    }

    #[test]
    fn divergence_keeps_prefix() {
        let err = iterate(&Doubler, 1.0, 40).unwrap_err();
        // 2^19 < 1e6 < 2^20
        assert_eq!(err.completed(), 19);
        assert_eq!(err.prefix[0], 2.0);
        assert_eq!(err.value, 1_048_576.0);
        let (prefix, at) = iterate_prefix(&Doubler, 1.0, 40);
        assert_eq!(prefix.len(), 19);
        assert_eq!(at, Some(19));
    }

    #[test]
    fn euclidean_distance_for_pairs() {
        assert_eq!([0.0, 0.0].distance(&[3.0, 4.0]), 5.0);
        assert_eq!([f64::NAN, 0.0].magnitude(), f64::INFINITY);
    }
}
