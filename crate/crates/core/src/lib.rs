//! Measure based reconstruction of chaotic maps.
//!
//! A map `x -> f(x)` observed only through a time series is approximated by its
//! generalized Fourier expansion in the polynomials that are orthonormal with
//! respect to the empirical invariant measure of the data. Everything the model
//! needs is read from two families of ergodic sums: the moments
//! `M_k = <x^k>` and the functional moments `Gamma_j = <x_{t+1} x_t^j>`.
//!
//! The crate is split along the pipeline:
//!
//! * [`generators`]: test orbits (quadratic, exponential quadratic, Hénon) and a
//!   Lyapunov exponent estimator.
//! * [`moments`]: compensated ergodic sums in one and two dimensions.
//! * [`orthopoly`]: the natural polynomial system and an independent Hankel
//!   factorization used as an oracle.
//! * [`mbr1d`] and [`mbr2d`]: the reconstructed maps. The two-dimensional module
//!   also keeps the literal moment recursion for diagnosis.
//! * [`dynamics`]: iteration of fitted maps with divergence detection.
//! * [`analysis`]: prediction length, periodogram, residuals, noise, embedding.
//! * [`baselines`]: analog forecasting, AR and monomial least squares.
//! * [`io`] and [`experiment`]: file formats and the canned experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod baselines;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod io;
mod linalg;
pub mod mbr1d;
pub mod mbr2d;
pub mod moments;
pub mod orthopoly;
pub mod series;
mod sum;

pub use error::{Error, Result};
pub use series::{Series, TimeSeries, TimeSeries2D};

/// Largest polynomial order accepted by the reconstruction routines.
///
/// Hankel moment systems lose roughly one decimal digit of conditioning per
/// order; past this point the empirical measure no longer supports the basis.
pub const MAX_ORDER: usize = 12;

/// Relative threshold below which a squared norm is treated as degenerate.
pub const CONDITIONING_THRESHOLD: f64 = 1e-13;

/// Magnitude above which an iterated orbit or prediction is declared divergent.
pub const DIVERGENCE_BOUND: f64 = 1e6;
