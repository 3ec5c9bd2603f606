//! Two-dimensional measure based reconstruction.
//!
//! Basis polynomials are indexed by [`BivarIndex`] `(i, j)`: total degree `i`,
//! leading monomial `x1^(i-j) x2^j`, in graded order. Two constructions exist:
//!
//! * [`poly_system_2d_paper`] runs the original moment recursion for the
//!   `alpha`/`eta` tables term by term. It is kept for diagnosis: on Hénon data
//!   it produces a non-positive squared norm above the linear stage.
//! * [`poly_system_2d_corrected`] orthonormalizes the graded monomials by a
//!   Cholesky factorization of their Gram matrix. [`fit2d_corrected`] builds on it.

mod corrected;
mod diagnose;
mod format;
mod paper;

use crate::error::{Error, Result};
use crate::moments::{graded_count, graded_position};

pub use corrected::{eval2d, fit2d_corrected, poly_system_2d_corrected, ReconstructedMap2D};
pub use diagnose::{diagnose2d, diagnose2d_with, Diagnosis2D, DiagnosisRow, NormStatus};
pub use paper::{
    n20_closed_form, poly_system_2d_paper, poly_system_2d_paper_with, EtaSubscript, PaperFailure,
    TraceStep,
};

/// Index `(i, j)` of a bivariate basis polynomial or monomial.
///
/// `i` is the total degree and `j` the power of `x2`, so the monomial is
/// `x1^(i-j) x2^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BivarIndex {
    pub i: usize,
    pub j: usize,
}

impl BivarIndex {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if j > i {
            return Err(Error::InvalidParameter(format!(
                "index ({i},{j}) needs j <= i"
            )));
        }
        Ok(Self { i, j })
    }

    /// Position in graded order: `i(i+1)/2 + j`.
    pub fn position(self) -> usize {
        graded_position(self.i - self.j, self.j)
    }

    pub fn from_position(pos: usize) -> Self {
        let mut i = 0;
        while graded_count(i) <= pos {
            i += 1;
        }
        Self {
            i,
            j: pos - i * (i + 1) / 2,
        }
    }

    /// Exponents `(p, q)` of the monomial `x1^p x2^q`.
    pub fn exponents(self) -> (usize, usize) {
        (self.i - self.j, self.j)
    }

    /// All indices of total degree at most `n`, in graded order.
    pub fn up_to(n: usize) -> impl Iterator<Item = BivarIndex> {
        (0..=n).flat_map(|i| (0..=i).map(move |j| BivarIndex { i, j }))
    }
}

impl std::fmt::Display for BivarIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// Monomials `x1^p x2^q` up to total degree `n`, in graded order.
pub(crate) fn monomials(x: [f64; 2], n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(graded_count(n));
    for d in 0..=n {
        for q in 0..=d {
            out.push(x[0].powi((d - q) as i32) * x[1].powi(q as i32));
        }
    }
    out
}

/// Bivariate polynomial family in graded order.
///
/// Row `(i, j)` holds the monomial coefficients of `pi^(i,j)` on every monomial
/// up to and including its own leading one. In the notation of the recursion,
/// `alpha_hk^(i,j)` is the coefficient of `x1^(k-h) x2^h` (degree `k < i`) and
/// `eta_k^(i,j)` that of `x1^(i-k) x2^k` (`k <= j`).
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoPolySystem2D {
    order: usize,
    rows: Vec<Vec<f64>>,
    norms: Vec<f64>,
    trace: Vec<TraceStep>,
}

impl OrthoPolySystem2D {
    pub(crate) fn from_parts(
        order: usize,
        rows: Vec<Vec<f64>>,
        norms: Vec<f64>,
        trace: Vec<TraceStep>,
    ) -> Self {
        debug_assert_eq!(rows.len(), graded_count(order));
        Self {
            order,
            rows,
            norms,
            trace,
        }
    }

    pub(crate) fn from_rows(order: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != graded_count(order) {
            return Err(Error::ModelFormat(format!(
                "{} basis rows for order {order}",
                rows.len()
            )));
        }
        let mut norms = Vec::with_capacity(rows.len());
        for (p, row) in rows.iter().enumerate() {
            if row.len() != p + 1 || !(row[p] > 0.0) {
                return Err(Error::ModelFormat(format!(
                    "basis row {} is malformed",
                    BivarIndex::from_position(p)
                )));
            }
            norms.push(1.0 / (row[p] * row[p]));
        }
        Ok(Self::from_parts(order, rows, norms, Vec::new()))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of basis polynomials, `(n+1)(n+2)/2`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Monomial coefficients of `pi^(i,j)` in graded order.
    pub fn row(&self, idx: BivarIndex) -> &[f64] {
        &self.rows[idx.position()]
    }

    /// `alpha_hk^(i,j)`: coefficient of `x1^(k-h) x2^h`; zero unless `h <= k < i`.
    pub fn alpha(&self, idx: BivarIndex, h: usize, k: usize) -> f64 {
        if h > k || k >= idx.i {
            return 0.0;
        }
        self.rows[idx.position()][graded_position(k - h, h)]
    }

    /// `eta_k^(i,j)`: coefficient of `x1^(i-k) x2^k`; zero unless `k <= j`.
    pub fn eta(&self, idx: BivarIndex, k: usize) -> f64 {
        if k > idx.j {
            return 0.0;
        }
        self.rows[idx.position()][graded_position(idx.i - k, k)]
    }

    /// Squared norm `N_ij` of the unnormalized polynomial. `N_00 = 1`.
    pub fn norm(&self, idx: BivarIndex) -> f64 {
        self.norms[idx.position()]
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Intermediate `A`, `B` and `N` values; empty for the corrected construction.
    pub fn trace(&self) -> &[TraceStep] {
        &self.trace
    }

    pub fn eval(&self, idx: BivarIndex, x: [f64; 2]) -> Result<f64> {
        if idx.i > self.order {
            return Err(Error::IndexOutOfRange {
                index: idx.i,
                order: self.order,
            });
        }
        let mono = monomials(x, idx.i);
        Ok(dot(self.row(idx), &mono))
    }

    /// Values of every basis polynomial at `x`, in graded order.
    pub fn eval_all(&self, x: [f64; 2]) -> Vec<f64> {
        let mono = monomials(x, self.order);
        self.rows.iter().map(|r| dot(r, &mono)).collect()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
