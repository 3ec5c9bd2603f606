//! Side-by-side comparison of the printed recursion and the Gram factorization.

use super::corrected::gram_pivots;
use super::paper::{n20_closed_form, poly_system_2d_paper_with, EtaSubscript};
use super::BivarIndex;
use crate::error::{Error, Result};
use crate::moments::moment_hierarchy_2d;
use crate::series::TimeSeries2D;
use crate::MAX_ORDER;

/// Outcome of the recursion at one index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormStatus {
    Ok,
    Negative,
    IllConditioned,
    NotReached,
}

impl NormStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            NormStatus::Ok => "ok",
            NormStatus::Negative => "negative",
            NormStatus::IllConditioned => "ill-conditioned",
            NormStatus::NotReached => "not-reached",
        }
    }
}

impl std::fmt::Display for NormStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosisRow {
    pub index: BivarIndex,
    /// `N_ij` from the recursion, if it got that far.
    pub paper_norm: Option<f64>,
    /// Squared Cholesky pivot, if the factorization got that far.
    pub oracle_norm: Option<f64>,
    pub status: NormStatus,
}

#[derive(Debug)]
pub struct Diagnosis2D {
    pub order: usize,
    pub eta_subscript: EtaSubscript,
    pub rows: Vec<DiagnosisRow>,
    /// First index where the recursion stopped, with the reason.
    pub paper_failure: Option<(BivarIndex, Error)>,
    pub oracle_failure: Option<(BivarIndex, Error)>,
    pub n20_closed_form: Result<f64>,
}

impl Diagnosis2D {
    pub fn row(&self, idx: BivarIndex) -> Option<&DiagnosisRow> {
        self.rows.iter().find(|r| r.index == idx)
    }
}

pub fn diagnose2d(series: &TimeSeries2D, n: usize) -> Result<Diagnosis2D> {
    diagnose2d_with(series, n, EtaSubscript::default())
}

/// Runs both constructions and the closed form on the moments of `series`.
pub fn diagnose2d_with(
    series: &TimeSeries2D,
    n: usize,
    reading: EtaSubscript,
) -> Result<Diagnosis2D> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "order must lie in 1..={MAX_ORDER}, got {n}"
        )));
    }
    let m = moment_hierarchy_2d(series, (2 * n).max(4))?;

    let (paper_norms, paper_failure) = match poly_system_2d_paper_with(&m, n, reading) {
        Ok(sys) => (sys.norms()[1..].to_vec(), None),
        Err(fail) => {
            let at = fail.trace.last().map(|s| s.index);
            let norms = fail.trace.iter().map(|s| s.norm).collect();
            (norms, at.map(|idx| (idx, fail.error)))
        }
    };
    let (pivots, oracle_error) = gram_pivots(&m, n);
    let oracle_failure = oracle_error.map(|e| match e {
        Error::IllConditioned2D { i, j, .. } => (BivarIndex { i, j }, e),
        other => (BivarIndex { i: 0, j: 0 }, other),
    });

    let rows = BivarIndex::up_to(n)
        .skip(1)
        .enumerate()
        .map(|(t, index)| {
            let paper_norm = paper_norms.get(t).copied();
            let status = match (&paper_failure, paper_norm) {
                (Some((at, err)), Some(_)) if *at == index => match err {
                    Error::NegativeNorm { .. } => NormStatus::Negative,
                    _ => NormStatus::IllConditioned,
                },
                (_, Some(_)) => NormStatus::Ok,
                (_, None) => NormStatus::NotReached,
            };
            let oracle_norm = match &oracle_failure {
                Some((at, _)) if *at < index => None,
                _ => pivots.get(index.position()).copied(),
            };
            DiagnosisRow {
                index,
                paper_norm,
                oracle_norm,
                status,
            }
        })
        .collect();

    Ok(Diagnosis2D {
        order: n,
        eta_subscript: reading,
        rows,
        paper_failure,
        oracle_failure,
        n20_closed_form: n20_closed_form(&m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        generate_series, generate_series_2d, MapSpec, DEFAULT_HENON_START, DEFAULT_X0,
    };

    #[test]
    fn henon_report() {
        let s =
            generate_series_2d(&MapSpec::henon_2d(1.4, 0.3, DEFAULT_HENON_START), 50_000).unwrap();
        let d = diagnose2d(&s, 2).unwrap();
        assert_eq!(d.rows.len(), 5);
        assert!(d.oracle_failure.is_none());
        let r20 = d.row(BivarIndex { i: 2, j: 0 }).unwrap();
        assert!(r20.oracle_norm.unwrap() > 0.0);
        assert!(d.paper_failure.is_some());
        assert!(d.n20_closed_form.as_ref().unwrap() < &0.0);
        for r in &d.rows[..2] {
            let (p, o) = (r.paper_norm.unwrap(), r.oracle_norm.unwrap());
            assert!((p - o).abs() < 1e-8 * o.abs().max(1.0));
            assert_eq!(r.status, NormStatus::Ok);
        }
    }

    #[test]
    fn embedded_quadratic_report() {
        let x = generate_series(&MapSpec::quadratic(3.8, DEFAULT_X0), 5_000).unwrap();
        let pairs: Vec<[f64; 2]> = x.values().windows(2).map(|w| [w[1], w[0]]).collect();
        let d = diagnose2d(&TimeSeries2D::new(pairs).unwrap(), 2).unwrap();
        assert_eq!(d.rows.len(), 5);
        assert!(d
            .rows
            .iter()
            .all(|r| r.oracle_norm.is_some() || d.oracle_failure.is_some()));
    }

    #[test]
    fn degenerate_report() {
        let s = TimeSeries2D::new(vec![[0.4, 0.1]; 50]).unwrap();
        let d = diagnose2d(&s, 2).unwrap();
        let (at, err) = d.paper_failure.as_ref().unwrap();
        assert_eq!(*at, BivarIndex { i: 1, j: 0 });
        assert!(matches!(err, Error::IllConditioned2D { .. }));
        let (at, _) = d.oracle_failure.as_ref().unwrap();
        assert_eq!(*at, BivarIndex { i: 1, j: 0 });
        assert_eq!(d.rows[0].status, NormStatus::IllConditioned);
        assert_eq!(d.rows[1].status, NormStatus::NotReached);
        assert!(d.rows[1].oracle_norm.is_none());
        assert!(d.n20_closed_form.is_err());
    }
}
