use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Elementwise `truth - predicted`.
pub fn residuals(predicted: &TimeSeries, truth: &TimeSeries) -> Result<TimeSeries> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let r = truth
        .values()
        .iter()
        .zip(predicted.values())
        .map(|(t, p)| t - p)
        .collect();
    TimeSeries::new(r)
}

/// Pairs `(x_t, x_{t+lag})` for a lag plot.
pub fn lag_pairs(series: &TimeSeries, lag: usize) -> Result<Vec<(f64, f64)>> {
    if lag == 0 {
        return Err(Error::InvalidParameter("lag must be positive".into()));
    }
    let xs = series.values();
    if xs.len() <= lag {
        return Err(Error::SeriesTooShort {
            needed: lag + 1,
            got: xs.len(),
        });
    }
    Ok(xs.iter().zip(&xs[lag..]).map(|(&a, &b)| (a, b)).collect())
}

/// Delay vectors `(x_t, x_{t+tau}, .., x_{t+(m-1)tau})`.
pub fn delay_embed(series: &TimeSeries, m: usize, tau: usize) -> Result<Vec<Vec<f64>>> {
    if m == 0 || tau == 0 {
        return Err(Error::InvalidParameter(
            "embedding dimension and delay must be positive".into(),
        ));
    }
    let xs = series.values();
    let span = (m - 1) * tau;
    if xs.len() < span + 1 {
        return Err(Error::SeriesTooShort {
            needed: span + 1,
            got: xs.len(),
        });
    }
    Ok((0..xs.len() - span)
        .map(|t| (0..m).map(|d| xs[t + d * tau]).collect())
        .collect())
}
