//! Reference predictors: analog forecasting, autoregression and global
//! monomial least squares.
//!
//! The least-squares fits solve the overdetermined system by Householder QR and
//! report [`Error::SingularNormalEquations`] when a diagonal entry of `R` falls
//! below `1e-12` times the largest one.

use nalgebra::DMatrix;

use crate::dynamics::Forecaster;
use crate::error::{Error, Result};
use crate::mbr2d::monomials;
use crate::moments::graded_count;
use crate::orthopoly::horner;
use crate::series::{TimeSeries, TimeSeries2D};

const RANK_TOLERANCE: f64 = 1e-12;

fn lstsq(a: DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let qr = a.qr();
    let r = qr.r();
    let max = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 || r.diagonal().iter().any(|v| v.abs() <= RANK_TOLERANCE * max) {
        return Err(Error::SingularNormalEquations);
    }
    let qtb = qr.q().transpose() * b;
    r.solve_upper_triangular(&qtb)
        .ok_or(Error::SingularNormalEquations)
}

/// Mean of the successors of the `s` delay vectors nearest to `query`.
///
/// Candidates are the delay vectors `(x_t, .., x_{t+(m-1)tau})` whose last
/// entry has a successor. Equal distances keep the lower index first.
pub fn analog_predict(
    train: &TimeSeries,
    m: usize,
    tau: usize,
    query: &[f64],
    s: usize,
) -> Result<f64> {
    if m == 0 || tau == 0 || s == 0 {
        return Err(Error::InvalidParameter(
            "embedding dimension, delay and neighbor count must be positive".into(),
        ));
    }
    if query.len() != m {
        return Err(Error::LengthMismatch {
            left: query.len(),
            right: m,
        });
    }
    let xs = train.values();
    let span = (m - 1) * tau;
    if xs.len() < span + 2 {
        return Err(Error::SeriesTooShort {
            needed: span + 2,
            got: xs.len(),
        });
    }
    let candidates = xs.len() - span - 1;
    if s > candidates {
        return Err(Error::NotEnoughNeighbors {
            needed: s,
            available: candidates,
        });
    }
    let mut dist: Vec<(f64, usize)> = (0..candidates)
        .map(|t| {
            let d2: f64 = (0..m).map(|d| (xs[t + d * tau] - query[d]).powi(2)).sum();
            (d2, t)
        })
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let sum: f64 = dist[..s].iter().map(|&(_, t)| xs[t + span + 1]).sum();
    Ok(sum / s as f64)
}

/// `x_n = sum_j a_j x_{n-j}` with the noise term dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ARModel {
    coefficients: Vec<f64>,
    residual_variance: f64,
}

impl ARModel {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "AR model needs at least one finite coefficient".into(),
            ));
        }
        Ok(Self {
            coefficients,
            residual_variance: 0.0,
        })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// `a_1 .. a_M`; `a_j` multiplies `x_{n-j}`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Mean squared one-step residual of the fit.
    pub fn residual_variance(&self) -> f64 {
        self.residual_variance
    }

    fn next(&self, recent_first: impl Iterator<Item = f64>) -> f64 {
        self.coefficients
            .iter()
            .zip(recent_first)
            .map(|(a, x)| a * x)
            .sum()
    }
}

/// Least-squares AR fit over every full window.
pub fn ar_fit(series: &TimeSeries, order: usize) -> Result<ARModel> {
    if order == 0 {
        return Err(Error::InvalidParameter("AR order must be positive".into()));
    }
    let xs = series.values();
    let needed = 2 * order + 1;
    if xs.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            got: xs.len(),
        });
    }
    let rows = xs.len() - order;
    let a = DMatrix::from_fn(rows, order, |r, c| xs[order + r - 1 - c]);
    let b = DMatrix::from_fn(rows, 1, |r, _| xs[order + r]);
    let sol = lstsq(a.clone(), &b)?;
    let resid = &b - &a * &sol;
    let coefficients: Vec<f64> = sol.column(0).iter().copied().collect();
    Ok(ARModel {
        coefficients,
        residual_variance: resid.norm_squared() / rows as f64,
    })
}

/// Iterates the AR recursion from `history` (oldest value first).
pub fn ar_predict(model: &ARModel, history: &[f64], steps: usize) -> Result<TimeSeries> {
    if history.len() != model.order() {
        return Err(Error::LengthMismatch {
            left: history.len(),
            right: model.order(),
        });
    }
    let mut window = history.to_vec();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let x = model.next(window.iter().rev().copied());
        out.push(x);
        window.remove(0);
        window.push(x);
    }
    TimeSeries::new(out)
}

/// One-dimensional polynomial map in monomial form.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialModel {
    coefficients: Vec<f64>,
}

impl MonomialModel {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `b_0 .. b_p`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coefficients, x)
    }
}

impl Forecaster for MonomialModel {
    type State = f64;

    fn step(&self, x: f64) -> f64 {
        self.eval(x)
    }
}

/// Minimizes `sum_t (x_{t+1} - sum_j b_j x_t^j)^2` over every transition.
pub fn monomial_ls_fit(series: &TimeSeries, order: usize) -> Result<MonomialModel> {
    let xs = series.values();
    if xs.len() < order + 2 {
        return Err(Error::SeriesTooShort {
            needed: order + 2,
            got: xs.len(),
        });
    }
    let rows = xs.len() - 1;
    let a = DMatrix::from_fn(rows, order + 1, |r, c| xs[r].powi(c as i32));
    let b = DMatrix::from_fn(rows, 1, |r, _| xs[r + 1]);
    let sol = lstsq(a, &b)?;
    Ok(MonomialModel {
        coefficients: sol.column(0).iter().copied().collect(),
    })
}

/// Bivariate polynomial map in monomial form, coefficients in graded order.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialModel2D {
    order: usize,
    coefficients: [Vec<f64>; 2],
}

impl MonomialModel2D {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficients of component `s` (1 or 2); entry `(p, q)` multiplies `x1^p x2^q`.
    pub fn coefficients(&self, s: usize) -> &[f64] {
        assert!(s == 1 || s == 2, "component index must be 1 or 2");
        &self.coefficients[s - 1]
    }

    pub fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let m = monomials(x, self.order);
        let dot = |c: &[f64]| c.iter().zip(&m).map(|(a, b)| a * b).sum();
        [dot(&self.coefficients[0]), dot(&self.coefficients[1])]
    }
}

impl Forecaster for MonomialModel2D {
    type State = [f64; 2];

    fn step(&self, x: [f64; 2]) -> [f64; 2] {
        self.eval(x)
    }
}

pub fn monomial_ls_fit_2d(series: &TimeSeries2D, order: usize) -> Result<MonomialModel2D> {
    let pts = series.values();
    let size = graded_count(order);
    if pts.len() < size + 1 {
        return Err(Error::SeriesTooShort {
            needed: size + 1,
            got: pts.len(),
        });
    }
    let rows = pts.len() - 1;
    let mut a = DMatrix::zeros(rows, size);
    for r in 0..rows {
        for (c, v) in monomials(pts[r], order).into_iter().enumerate() {
            a[(r, c)] = v;
        }
    }
    let b = DMatrix::from_fn(rows, 2, |r, c| pts[r + 1][c]);
    let sol = lstsq(a, &b)?;
    let col = |c: usize| -> Vec<f64> { sol.column(c).iter().copied().collect() };
    Ok(MonomialModel2D {
        order,
        coefficients: [col(0), col(1)],
    })
}
