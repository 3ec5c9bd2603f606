use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("orbit diverged at iterate {step} (value {value})")]
    DivergedOrbit { step: usize, value: f64 },

    #[error("map derivative vanished at iterate {step} (x = {x})")]
    DerivativeVanished { step: usize, x: f64 },

    #[error("powers up to order {order} overflow for max |x| = {max_abs}")]
    OverflowRisk { order: usize, max_abs: f64 },

    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("ill-conditioned moment system at degree {degree} (squared norm {norm:e})")]
    IllConditioned { degree: usize, norm: f64 },

    #[error("ill-conditioned moment system at ({i},{j}) (squared norm {norm:e})")]
    IllConditioned2D { i: usize, j: usize, norm: f64 },

    #[error("negative norm N({i},{j}) = {value:e}")]
    NegativeNorm { i: usize, j: usize, value: f64 },

    #[error("polynomial index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("prediction diverged after {completed} steps (value {value})")]
    PredictionDiverged { completed: usize, value: f64 },

    #[error("need {needed} neighbours, only {available} candidates")]
    NotEnoughNeighbors { needed: usize, available: usize },

    #[error("least squares system is singular")]
    SingularNormalEquations,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("parse error at line {line}: {content:?}")]
    Parse { line: usize, content: String },

    #[error("mixed column count at line {line}: expected {expected}, found {found}")]
    MixedColumnCount {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("malformed model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerical method itself, as opposed to bad
    /// input data or usage.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DivergedOrbit { .. }
                | Error::DerivativeVanished { .. }
                | Error::OverflowRisk { .. }
                | Error::IllConditioned { .. }
                | Error::IllConditioned2D { .. }
                | Error::NegativeNorm { .. }
                | Error::PredictionDiverged { .. }
                | Error::SingularNormalEquations
        )
    }

    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidParameter(_))
    }
}
