//! Polynomials orthonormal with respect to an empirical measure.
//!
//! [`natural_poly_system`] builds the basis one degree at a time from the
//! moments alone: the degree-`k` candidate `x^k + sum_j beta_j pi_j` is made
//! orthogonal to the lower polynomials with `beta_j = -<x^k, pi_j>`, and its
//! squared norm `N_k = M_2k - sum beta_j^2` normalizes it.
//!
//! [`gram_oracle`] reaches the same basis by a different road: a Cholesky
//! factorization of the Hankel matrix `H_ij = M_{i+j}`, whose inverse factor
//! holds the coefficients. Both routes compute in double-double precision.

use crate::error::{Error, Result};
use crate::linalg::{self, dd, to_f64, Dd};
use crate::moments::MomentHierarchy;
use crate::{CONDITIONING_THRESHOLD, MAX_ORDER};

/// Triangular coefficient table of an orthonormal polynomial family.
///
/// Row `k` holds the monomial coefficients `a_0^(k) .. a_k^(k)` of `pi_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoPolySystem {
    coeffs: Vec<Vec<f64>>,
    norms: Vec<f64>,
    source_moments: Option<MomentHierarchy>,
}

impl OrthoPolySystem {
    /// Rebuilds a system from its coefficient rows, as stored in model files.
    pub(crate) fn from_rows(coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::ModelFormat("empty coefficient table".into()));
        }
        for (k, row) in coeffs.iter().enumerate() {
            if row.len() != k + 1 {
                return Err(Error::ModelFormat(format!(
                    "row {k} has {} entries, expected {}",
                    row.len(),
                    k + 1
                )));
            }
            if !(row[k] > 0.0) {
                return Err(Error::ModelFormat(format!(
                    "row {k} has non-positive leading coefficient"
                )));
            }
        }
        let norms = coeffs
            .iter()
            .enumerate()
            .map(|(k, row)| 1.0 / (row[k] * row[k]))
            .collect();
        Ok(Self {
            coeffs,
            norms,
            source_moments: None,
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Monomial coefficients of `pi_k`, lowest power first.
    pub fn row(&self, k: usize) -> &[f64] {
        &self.coeffs[k]
    }

    pub fn coeff(&self, k: usize, j: usize) -> f64 {
        self.coeffs[k][j]
    }

    /// Squared norm `N_k` of the unnormalized degree-`k` polynomial. `N_0 = 1`.
    pub fn norm(&self, k: usize) -> f64 {
        self.norms[k]
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn source_moments(&self) -> Option<&MomentHierarchy> {
        self.source_moments.as_ref()
    }

    pub fn eval(&self, k: usize, x: f64) -> Result<f64> {
        let row = self.coeffs.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            order: self.order(),
        })?;
        Ok(horner(row, x))
    }

    /// Values of `pi_0(x) .. pi_n(x)`.
    pub fn eval_all(&self, x: f64) -> Vec<f64> {
        self.coeffs.iter().map(|row| horner(row, x)).collect()
    }
}

pub(crate) fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `pi_k(x)` by Horner's scheme.
pub fn eval_poly(system: &OrthoPolySystem, k: usize, x: f64) -> Result<f64> {
    system.eval(k, x)
}

fn check_request(m: &MomentHierarchy, n: usize) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "order {n} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    if m.max_order() < 2 * n {
        return Err(Error::InvalidParameter(format!(
            "order {n} needs moments through {}, have {}",
            2 * n,
            m.max_order()
        )));
    }
    Ok(())
}

/// Recursion output kept in double-double for downstream projections.
pub(crate) struct NaturalSystemDd {
    pub rows: Vec<Vec<Dd>>,
    pub norms: Vec<f64>,
}

impl OrthoPolySystem {
    pub(crate) fn from_dd(sys: &NaturalSystemDd, moments: MomentHierarchy) -> Self {
        Self {
            coeffs: round_rows(&sys.rows),
            norms: sys.norms.clone(),
            source_moments: Some(moments),
        }
    }
}

pub(crate) fn natural_poly_system_dd(m: &MomentHierarchy, n: usize) -> Result<NaturalSystemDd> {
    check_request(m, n)?;
    let moment: Vec<Dd> = m.values().iter().map(|&v| dd(v)).collect();
    natural_rows_dd(&moment, n)
}

/// The recursion on double-double moments `M_0 ..= M_2n`.
pub(crate) fn natural_rows_dd(moment: &[Dd], n: usize) -> Result<NaturalSystemDd> {
    debug_assert!(moment.len() > 2 * n);
    let mut rows: Vec<Vec<Dd>> = vec![vec![dd(1.0)]];
    let mut norms = vec![1.0];
    for k in 1..=n {
        // beta_j = -<x^k, pi_j> = -sum_i a_i^(j) M_{k+i}
        let beta: Vec<Dd> = (0..k)
            .map(|j| {
                let mut s = dd(0.0);
                for (i, &a) in rows[j].iter().enumerate() {
                    s += a * moment[k + i];
                }
                -s
            })
            .collect();
        let mut norm = moment[2 * k];
        for &b in &beta {
            norm -= b * b;
        }
        let norm_f = to_f64(norm);
        let scale = to_f64(moment[2 * k]).abs().max(f64::MIN_POSITIVE);
        if !(norm_f > CONDITIONING_THRESHOLD * scale) {
            return Err(Error::IllConditioned {
                degree: k,
                norm: norm_f,
            });
        }
        let root = norm.sqrt();
        let mut row = vec![dd(0.0); k + 1];
        for (i, slot) in row.iter_mut().enumerate().take(k) {
            let mut s = dd(0.0);
            for h in i..k {
                s += beta[h] * rows[h][i];
            }
            *slot = linalg::div(s, root);
        }
        row[k] = linalg::div(dd(1.0), root);
        rows.push(row);
        norms.push(norm_f);
    }
    Ok(NaturalSystemDd { rows, norms })
}

fn round_rows(rows: &[Vec<Dd>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| to_f64(v)).collect())
        .collect()
}

/// Natural polynomial system of order `n` from moments through `2n`.
pub fn natural_poly_system(m: &MomentHierarchy, n: usize) -> Result<OrthoPolySystem> {
    let sys = natural_poly_system_dd(m, n)?;
    Ok(OrthoPolySystem::from_dd(&sys, m.clone()))
}

/// Orthonormal system via Cholesky factorization of the Hankel moment matrix.
///
/// Rows of `L^{-1}` are the coefficient vectors; the positive Cholesky
/// diagonal makes every leading coefficient positive.
pub fn gram_oracle(m: &MomentHierarchy, n: usize) -> Result<OrthoPolySystem> {
    check_request(m, n)?;
    let (l, pivots) = linalg::cholesky(n + 1, |r, c| dd(m.get(r + c)), CONDITIONING_THRESHOLD)
        .map_err(|(fail, _)| Error::IllConditioned {
            degree: fail.index,
            norm: fail.pivot,
        })?;
    let inv = linalg::invert_lower(&l);
    Ok(OrthoPolySystem {
        coeffs: round_rows(&inv),
        norms: pivots,
        source_moments: Some(m.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_series, MapSpec, DEFAULT_X0};
    use crate::moments::moment_hierarchy;
    use crate::series::TimeSeries;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn arcsine(max_k: usize) -> MomentHierarchy {
        // Beta(1/2, 1/2): M_k = M_{k-1} (k - 1/2) / k, exact in binary for small k
        let mut v = vec![1.0];
        for k in 1..=max_k {
            let prev = v[k - 1];
            v.push(prev * (k as f64 - 0.5) / k as f64);
        }
        MomentHierarchy::from_values(v, 0).unwrap()
    }

    #[test]
    fn arcsine_first_order() {
        let m = arcsine(4);
        assert_eq!(m.values(), &[1.0, 0.5, 0.375, 0.3125, 35.0 / 128.0]);
        let sys = natural_poly_system(&m, 1).unwrap();
        assert!((sys.norm(1) - 0.125).abs() < 1e-15);
        assert!((sys.coeff(1, 0) + SQRT2).abs() < 1e-14);
        assert!((sys.coeff(1, 1) - 2.0 * SQRT2).abs() < 1e-14);
    }

    #[test]
    fn arcsine_second_order_is_shifted_chebyshev() {
        let sys = natural_poly_system(&arcsine(4), 2).unwrap();
        assert!((sys.norm(2) - 1.0 / 128.0).abs() < 1e-16);
        // sqrt(2) (8x^2 - 8x + 1)
        let want = [SQRT2, -8.0 * SQRT2, 8.0 * SQRT2];
        for (a, b) in sys.row(2).iter().zip(want) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!((sys.coeff(2, 2) - 11.313708).abs() < 1e-6);
    }

    #[test]
    fn eval_examples() {
        let sys = natural_poly_system(&arcsine(4), 2).unwrap();
        assert_eq!(eval_poly(&sys, 0, 123.0).unwrap(), 1.0);
        assert!(eval_poly(&sys, 1, 0.5).unwrap().abs() < 1e-15);
        assert!((eval_poly(&sys, 2, 0.0).unwrap() - SQRT2).abs() < 1e-14);
        assert!(matches!(
            eval_poly(&sys, 3, 0.0),
            Err(Error::IndexOutOfRange { index: 3, order: 2 })
        ));
    }

    #[test]
    fn one_point_measure_is_ill_conditioned() {
        let c: f64 = 0.3;
        let m = MomentHierarchy::from_values((0..=4).map(|k| c.powi(k)).collect(), 1).unwrap();
        assert!(matches!(
            natural_poly_system(&m, 1),
            Err(Error::IllConditioned { degree: 1, .. })
        ));
        assert!(matches!(
            gram_oracle(&m, 1),
            Err(Error::IllConditioned { degree: 1, .. })
        ));
        let data = TimeSeries::new(vec![c; 100]).unwrap();
        let m = moment_hierarchy(&data, 4).unwrap();
        assert!(matches!(
            natural_poly_system(&m, 2),
            Err(Error::IllConditioned { degree: 1, .. })
        ));
    }

    #[test]
    fn two_point_measure_oracle() {
        let m = moment_hierarchy(&TimeSeries::new(vec![0.0, 1.0]).unwrap(), 2).unwrap();
        let sys = gram_oracle(&m, 1).unwrap();
        assert!((sys.norm(1) - 0.25).abs() < 1e-16);
        assert!((sys.coeff(1, 0) + 1.0).abs() < 1e-15);
        assert!((sys.coeff(1, 1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn oracle_matches_arcsine_recursion() {
        let m = arcsine(4);
        let a = natural_poly_system(&m, 2).unwrap();
        let b = gram_oracle(&m, 2).unwrap();
        for k in 0..=2 {
            for j in 0..=k {
                assert!((a.coeff(k, j) - b.coeff(k, j)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn order_limits() {
        let m = arcsine(30);
        assert!(matches!(
            natural_poly_system(&m, MAX_ORDER + 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            natural_poly_system(&arcsine(3), 2),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn leading_coefficient_is_inverse_root_norm() {
        let s = generate_series(&MapSpec::quadratic(3.8, DEFAULT_X0), 5_000).unwrap();
        let sys = natural_poly_system(&moment_hierarchy(&s, 12).unwrap(), 6).unwrap();
        for k in 0..=6 {
            assert!(sys.norm(k) > 0.0);
            let lead = sys.coeff(k, k);
            assert!((lead - 1.0 / sys.norm(k).sqrt()).abs() <= 1e-12 * lead);
        }
    }
}
