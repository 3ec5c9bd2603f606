//! Bivariate basis by Cholesky factorization of the monomial Gram matrix.

use super::{dot, BivarIndex, OrthoPolySystem2D};
use crate::dynamics::{iterate, DivergedPrediction, Forecaster};
use crate::error::{Error, Result};
use crate::linalg::{self, dd, to_f64, Dd};
use crate::moments::{
    functional_means_2d_dd, graded_count, graded_exponents, graded_position, power_means_2d_dd,
    MomentHierarchy2D,
};
use crate::series::TimeSeries2D;
use crate::{CONDITIONING_THRESHOLD, MAX_ORDER};

fn check_order(n: usize, max_degree: usize) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "order {n} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    if max_degree < 2 * n {
        return Err(Error::InvalidParameter(format!(
            "order {n} needs moments through degree {}, have {max_degree}",
            2 * n
        )));
    }
    Ok(())
}

fn pivot_error(fail: linalg::PivotFailure) -> Error {
    let idx = BivarIndex::from_position(fail.index);
    Error::IllConditioned2D {
        i: idx.i,
        j: idx.j,
        norm: fail.pivot,
    }
}

/// Cholesky of the graded monomial Gram matrix over moments `moment`.
fn factor(moment: &[Dd], n: usize) -> linalg::Factorization {
    // <x1^(i-j) x2^j, x1^(h-k) x2^k> = M_{(i-j)+(h-k), j+k}
    let gram = |r: usize, c: usize| {
        let (p1, q1) = graded_exponents(r);
        let (p2, q2) = graded_exponents(c);
        moment[graded_position(p1 + p2, q1 + q2)]
    };
    linalg::cholesky(graded_count(n), gram, CONDITIONING_THRESHOLD)
}

fn basis_dd(moment: &[Dd], n: usize) -> Result<(Vec<Vec<Dd>>, Vec<f64>)> {
    let (l, pivots) = factor(moment, n).map_err(|(fail, _)| pivot_error(fail))?;
    Ok((linalg::invert_lower(&l), pivots))
}

fn moments_dd(m: &MomentHierarchy2D) -> Vec<Dd> {
    m.values().iter().map(|&v| dd(v)).collect()
}

/// Squared pivots of the Gram factorization up to the first failure.
pub(crate) fn gram_pivots(m: &MomentHierarchy2D, n: usize) -> (Vec<f64>, Option<Error>) {
    match factor(&moments_dd(m), n) {
        Ok((_, pivots)) => (pivots, None),
        Err((fail, pivots)) => (pivots, Some(pivot_error(fail))),
    }
}

/// Orthonormal bivariate basis of order `n` for the measure behind `m`.
pub fn poly_system_2d_corrected(m: &MomentHierarchy2D, n: usize) -> Result<OrthoPolySystem2D> {
    check_order(n, m.max_degree())?;
    let (rows, norms) = basis_dd(&moments_dd(m), n)?;
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|&v| to_f64(v)).collect())
        .collect();
    Ok(OrthoPolySystem2D::from_parts(n, rows, norms, Vec::new()))
}

/// Two-component polynomial map `f_s = sum c_s^(i,j) pi^(i,j)`, `s = 1, 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedMap2D {
    coefficients: [Vec<f64>; 2],
    basis: OrthoPolySystem2D,
    sample_count: usize,
}

/// Fits an order-`n` bivariate reconstruction.
///
/// Moments are taken over the `N - 1` points that have a successor, matching
/// the functional moments.
pub fn fit2d_corrected(series: &TimeSeries2D, n: usize) -> Result<ReconstructedMap2D> {
    if n == 0 {
        return Err(Error::InvalidParameter("order must be at least 1".into()));
    }
    check_order(n, 2 * n)?;
    let needed = 2 * graded_count(n);
    if series.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            got: series.len(),
        });
    }
    let pts = series.values();
    let m = power_means_2d_dd(&pts[..pts.len() - 1], 2 * n)?;
    let gamma = functional_means_2d_dd(pts, n)?;
    let (rows, norms) = basis_dd(&m, n)?;

    let project = |s: usize| -> Vec<f64> {
        let g = &gamma[s - 1];
        rows.iter()
            .map(|row| {
                let mut c = dd(0.0);
                for (t, &a) in row.iter().enumerate() {
                    c += a * g[t];
                }
                to_f64(c)
            })
            .collect()
    };
    let coefficients = [project(1), project(2)];
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|&v| to_f64(v)).collect())
        .collect();
    Ok(ReconstructedMap2D {
        coefficients,
        basis: OrthoPolySystem2D::from_parts(n, rows, norms, Vec::new()),
        sample_count: pts.len(),
    })
}

impl ReconstructedMap2D {
    pub(crate) fn from_parts(
        coefficients: [Vec<f64>; 2],
        basis: OrthoPolySystem2D,
        sample_count: usize,
    ) -> Result<Self> {
        if coefficients.iter().any(|c| c.len() != basis.len()) {
            return Err(Error::ModelFormat(
                "coefficient count does not match the basis".into(),
            ));
        }
        Ok(Self {
            coefficients,
            basis,
            sample_count,
        })
    }

    pub fn order(&self) -> usize {
        self.basis.order()
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// `c_s^(i,j)` in graded order; `s` is 1 or 2.
    pub fn coefficients(&self, s: usize) -> &[f64] {
        assert!(s == 1 || s == 2, "component index must be 1 or 2");
        &self.coefficients[s - 1]
    }

    pub fn coefficient(&self, s: usize, idx: BivarIndex) -> f64 {
        self.coefficients(s)[idx.position()]
    }

    pub fn basis(&self) -> &OrthoPolySystem2D {
        &self.basis
    }

    pub fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let pi = self.basis.eval_all(x);
        [
            dot(&self.coefficients[0], &pi),
            dot(&self.coefficients[1], &pi),
        ]
    }

    pub fn predict(
        &self,
        start: [f64; 2],
        steps: usize,
    ) -> std::result::Result<TimeSeries2D, DivergedPrediction<[f64; 2]>> {
        let values = iterate(self, start, steps)?;
        Ok(TimeSeries2D::new(values).expect("bounded finite prediction"))
    }

    /// Monomial coefficients of `f_s` in graded order: entry `(p, q)` multiplies
    /// `x1^p x2^q`.
    pub fn to_monomial(&self) -> [Vec<f64>; 2] {
        let size = self.basis.len();
        let expand = |c: &[f64]| -> Vec<f64> {
            (0..size)
                .map(|t| {
                    let mut b = dd(0.0);
                    for (p, &cp) in c.iter().enumerate().skip(t) {
                        b += dd(cp) * self.basis.row(BivarIndex::from_position(p))[t];
                    }
                    to_f64(b)
                })
                .collect()
        };
        [expand(&self.coefficients[0]), expand(&self.coefficients[1])]
    }

    /// One-step RMS error `sqrt(mean |f(x_t) - x_{t+1}|^2)` over a series.
    pub fn one_step_rms(&self, series: &TimeSeries2D) -> f64 {
        let pts = series.values();
        let sum: f64 = pts
            .windows(2)
            .map(|w| {
                let y = self.eval(w[0]);
                (y[0] - w[1][0]).powi(2) + (y[1] - w[1][1]).powi(2)
            })
            .sum();
        (sum / (pts.len() - 1) as f64).sqrt()
    }
}

impl Forecaster for ReconstructedMap2D {
    type State = [f64; 2];

    fn step(&self, x: [f64; 2]) -> [f64; 2] {
        self.eval(x)
    }
}

/// Evaluates both components at `state`.
pub fn eval2d(model: &ReconstructedMap2D, state: [f64; 2]) -> [f64; 2] {
    model.eval(state)
}
