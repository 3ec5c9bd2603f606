//! One-dimensional measure based reconstruction.
//!
//! The map is approximated by `f_n(x) = sum_k c_k pi_k(x)` where `pi_k` is the
//! natural polynomial system of the data and `c_k = <f, pi_k>`. Because
//! `f(x_t) = x_{t+1}` along an orbit, `c_k = sum_j a_j^(k) Gamma_j` needs only
//! the functional moments; there is no optimization step.
//!
//! Moments and functional moments are both averaged over the `N - 1` points
//! that have a successor, so the basis is orthonormal for exactly the measure
//! the projection is taken against. With that pairing the fit coincides with
//! ordinary least squares over all transitions.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::{iterate, DivergedPrediction, Forecaster};
use crate::error::{Error, Result};
use crate::linalg::{dd, to_f64};
use crate::moments::{functional_means_dd, power_means_dd, MomentHierarchy};
use crate::orthopoly::{natural_rows_dd, OrthoPolySystem};
use crate::series::TimeSeries;
use crate::MAX_ORDER;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingMeta {
    pub sample_count: usize,
    /// Smallest and largest training value; unknown for models read from disk.
    pub data_range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedMap1D {
    coefficients: Vec<f64>,
    basis: OrthoPolySystem,
    meta: TrainingMeta,
}

/// Fits an order-`n` reconstruction to a scalar series.
pub fn fit(series: &TimeSeries, n: usize) -> Result<ReconstructedMap1D> {
    if n > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "order {n} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    let needed = 2 * n + 2;
    if series.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            got: series.len(),
        });
    }
    let xs = series.values();
    let m_dd = power_means_dd(&xs[..xs.len() - 1], 2 * n)?;
    let gamma = functional_means_dd(xs, n)?;
    let system = natural_rows_dd(&m_dd, n)?;

    let coefficients = system
        .rows
        .iter()
        .map(|row| {
            let mut c = dd(0.0);
            for (&a, &g) in row.iter().zip(&gamma) {
                c += a * g;
            }
            to_f64(c)
        })
        .collect();

    let mut rounded: Vec<f64> = m_dd.iter().map(|&v| to_f64(v)).collect();
    rounded[0] = 1.0;
    let moments = MomentHierarchy::from_values(rounded, xs.len() - 1)?;
    let basis = OrthoPolySystem::from_dd(&system, moments);

    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    Ok(ReconstructedMap1D {
        coefficients,
        basis,
        meta: TrainingMeta {
            sample_count: xs.len(),
            data_range: Some((lo, hi)),
        },
    })
}

impl ReconstructedMap1D {
    /// Assembles a model from expansion coefficients and a basis.
    pub fn from_parts(
        coefficients: Vec<f64>,
        basis: OrthoPolySystem,
        sample_count: usize,
    ) -> Result<Self> {
        if coefficients.len() != basis.order() + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients for a basis of order {}",
                coefficients.len(),
                basis.order()
            )));
        }
        Ok(Self {
            coefficients,
            basis,
            meta: TrainingMeta {
                sample_count,
                data_range: None,
            },
        })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Expansion coefficients `c_0 .. c_n`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn basis(&self) -> &OrthoPolySystem {
        &self.basis
    }

    pub fn meta(&self) -> &TrainingMeta {
        &self.meta
    }

    /// `f_n(x) = sum_k c_k pi_k(x)`. Defined for every finite `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .zip(self.basis.eval_all(x))
            .map(|(c, p)| c * p)
            .sum()
    }

    /// Iterates the model from `x_start`; the start itself is not included.
    pub fn predict(
        &self,
        x_start: f64,
        steps: usize,
    ) -> Result<TimeSeries, DivergedPrediction<f64>> {
        let values = iterate(self, x_start, steps)?;
        Ok(TimeSeries::new(values).expect("bounded finite prediction"))
    }

    /// Monomial coefficients `b_0 .. b_n` with `f_n(x) = sum_j b_j x^j`.
    pub fn to_monomial(&self) -> Vec<f64> {
        let n = self.order();
        (0..=n)
            .map(|j| {
                let mut b = dd(0.0);
                for k in j..=n {
                    b += dd(self.coefficients[k]) * self.basis.coeff(k, j);
                }
                to_f64(b)
            })
            .collect()
    }
}

impl Forecaster for ReconstructedMap1D {
    type State = f64;

    fn step(&self, x: f64) -> f64 {
        self.eval(x)
    }
}

/// Writes the model in the `mbr1` text format: a header line, one expansion
/// coefficient per line, then the basis table one row per line.
impl fmt::Display for ReconstructedMap1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mbr1 n={} N={}", self.order(), self.meta.sample_count)?;
        for c in &self.coefficients {
            writeln!(f, "{c:?}")?;
        }
        for k in 0..=self.order() {
            let row: Vec<String> = self.basis.row(k).iter().map(|v| format!("{v:?}")).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn parse_header(line: &str, magic: &str) -> Result<(usize, usize)> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some(magic) {
        return Err(Error::ModelFormat(format!("expected '{magic}' header")));
    }
    let mut order = None;
    let mut samples = None;
    for tok in tokens {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| Error::ModelFormat(format!("bad header field {tok:?}")))?;
        let value: usize = value
            .parse()
            .map_err(|_| Error::ModelFormat(format!("bad header value {tok:?}")))?;
        match key {
            "n" => order = Some(value),
            "N" => samples = Some(value),
            _ => return Err(Error::ModelFormat(format!("unknown header field {key:?}"))),
        }
    }
    match (order, samples) {
        (Some(n), Some(s)) => Ok((n, s)),
        _ => Err(Error::ModelFormat("header needs n= and N=".into())),
    }
}

pub(crate) fn parse_floats(line: &str) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::ModelFormat(format!("bad number {t:?}")))
        })
        .collect()
}

impl FromStr for ReconstructedMap1D {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::ModelFormat("empty model file".into()))?;
        let (n, samples) = parse_header(header, "mbr1")?;
        if n > MAX_ORDER {
            return Err(Error::ModelFormat(format!("order {n} too large")));
        }
        let mut coefficients = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            let line = lines
                .next()
                .ok_or_else(|| Error::ModelFormat("missing coefficient line".into()))?;
            match parse_floats(line)?.as_slice() {
                [c] => coefficients.push(*c),
                _ => return Err(Error::ModelFormat(format!("bad coefficient line {line:?}"))),
            }
        }
        let mut rows = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            let line = lines
                .next()
                .ok_or_else(|| Error::ModelFormat("missing basis row".into()))?;
            rows.push(parse_floats(line)?);
        }
        if lines.next().is_some() {
            return Err(Error::ModelFormat("trailing content".into()));
        }
        Self::from_parts(coefficients, OrthoPolySystem::from_rows(rows)?, samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_series, MapSpec, DEFAULT_X0};
    use crate::orthopoly::horner;

    fn quadratic(mu: f64, n: usize) -> TimeSeries {
        generate_series(&MapSpec::quadratic(mu, DEFAULT_X0), n).unwrap()
    }

    #[test]
    fn full_logistic_expansion_coefficients() {
        let model = fit(&quadratic(4.0, 30_000), 2).unwrap();
        let c = model.coefficients();
        // c_0 is the sample mean of the successors, so the analytic values are
        // only reached up to the sampling error of the orbit: 5 sigma / sqrt(N)
        // with sigma = 1/sqrt(8) for the arcsine law.
        let tol = 5.0 * (0.125f64).sqrt() / (30_000f64).sqrt();
        assert!((c[0] - 0.5).abs() < tol, "{c:?}");
        assert!(c[1].abs() < tol, "{c:?}");
        assert!(
            (c[2] + 1.0 / (2.0 * std::f64::consts::SQRT_2)).abs() < tol,
            "{c:?}"
        );
        let b = model.to_monomial();
        assert!(b[0].abs() < 1e-6 && (b[1] - 4.0).abs() < 1e-6 && (b[2] + 4.0).abs() < 1e-6);
    }

    #[test]
    fn recovers_quadratic_map() {
        let model = fit(&quadratic(3.8, 30_000), 2).unwrap();
        let b = model.to_monomial();
        for (got, want) in b.iter().zip([0.0, 3.8, -3.8]) {
            assert!((got - want).abs() < 1e-6, "{b:?}");
        }
        assert!((model.eval(0.5) - 0.95).abs() < 1e-4);
        let m4 = fit(&quadratic(4.0, 30_000), 2).unwrap();
        assert!((m4.eval(0.3) - 0.84).abs() < 1e-4);
        // outside the data range the polynomial still evaluates
        assert!(model.eval(-3.0).is_finite());
        assert!(model.eval(17.0).is_finite());
    }

    #[test]
    fn eval_matches_monomial_expansion() {
        let model = fit(
            &generate_series(&MapSpec::exp_quadratic(10.0, 2.51705, DEFAULT_X0), 20_000).unwrap(),
            6,
        )
        .unwrap();
        let b = model.to_monomial();
        for i in 0..50 {
            let x = i as f64 / 49.0;
            assert!((model.eval(x) - horner(&b, x)).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_data_is_ill_conditioned() {
        let s = TimeSeries::new(vec![0.25; 100]).unwrap();
        assert!(matches!(
            fit(&s, 2),
            Err(Error::IllConditioned { degree: 1, .. })
        ));
    }

    #[test]
    fn short_series_rejected() {
        let s = quadratic(3.8, 5);
        assert!(matches!(
            fit(&s, 2),
            Err(Error::SeriesTooShort { needed: 6, got: 5 })
        ));
    }

    #[test]
    fn prediction_follows_true_map() {
        let model = fit(&quadratic(4.0, 30_000), 2).unwrap();
        let p = model.predict(0.5, 2).unwrap();
        assert!((p.values()[0] - 1.0).abs() < 1e-4);
        assert!(p.values()[1].abs() < 1e-4);
        let one = model.predict(0.123, 1).unwrap();
        assert_eq!(one.values(), &[model.eval(0.123)]);
    }

    #[test]
    fn prediction_divergence_reports_prefix() {
        let model = fit(&quadratic(3.8, 5_000), 2).unwrap();
        let err = model.predict(3.0, 10).unwrap_err();
        assert!(err.completed() < 10);
        assert_eq!(
            err.prefix.first().copied(),
            if err.completed() > 0 {
                Some(model.eval(3.0))
            } else {
                None
            }
        );
    }

    #[test]
    fn lower_coefficients_do_not_change_with_order() {
        let s =
            generate_series(&MapSpec::exp_quadratic(10.0, 2.51705, DEFAULT_X0), 30_000).unwrap();
        let lo = fit(&s, 5).unwrap();
        let hi = fit(&s, 6).unwrap();
        for k in 0..=5 {
            assert!((lo.coefficients()[k] - hi.coefficients()[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_recovery_of_cubic_map() {
        // scaled third Chebyshev polynomial, chaotic on [-0.98, 0.98]
        let f = |x: f64| 0.98 * (3.0 * x - 4.0 * x * x * x);
        let mut x = 0.3;
        let mut v = Vec::new();
        for _ in 0..20_000 {
            v.push(x);
            x = f(x);
        }
        let s = TimeSeries::new(v).unwrap();
        let model = fit(&s, 4).unwrap();
        let worst = s
            .values()
            .windows(2)
            .map(|w| (model.eval(w[0]) - w[1]).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn text_format_round_trips() {
        let model = fit(&quadratic(3.8, 2_000), 3).unwrap();
        let text = model.to_string();
        assert!(text.starts_with("mbr1 n=3 N=2000\n"));
        assert_eq!(text.lines().count(), 1 + 4 + 4);
        let back: ReconstructedMap1D = text.parse().unwrap();
        assert_eq!(back.coefficients(), model.coefficients());
        for k in 0..=3 {
            assert_eq!(back.basis().row(k), model.basis().row(k));
        }
        assert_eq!(back.eval(0.37), model.eval(0.37));
    }

    #[test]
    fn malformed_text_rejected() {
        assert!("".parse::<ReconstructedMap1D>().is_err());
        assert!("mbr2 n=1 N=3\n".parse::<ReconstructedMap1D>().is_err());
        assert!("mbr1 n=1 N=3\n0.5\n".parse::<ReconstructedMap1D>().is_err());
        assert!("mbr1 n=0 N=3\n0.5\n1.0\nextra\n"
            .parse::<ReconstructedMap1D>()
            .is_err());
        assert!("mbr1 n=0 N=3\n0.5\n-1.0\n"
            .parse::<ReconstructedMap1D>()
            .is_err());
        assert!("mbr1 n=0 N=3\n0.5\n1.0\n"
            .parse::<ReconstructedMap1D>()
            .is_ok());
    }
}
