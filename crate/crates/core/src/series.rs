use crate::error::{Error, Result};

/// An ordered sequence of finite scalar samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    label: Option<String>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSeries("series is empty".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite value {} at index {pos}",
                values[pos]
            )));
        }
        Ok(Self {
            values,
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a series holds at least one sample.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Splits into the first `n` samples and the remainder.
    pub fn split_at(&self, n: usize) -> Result<(TimeSeries, TimeSeries)> {
        if n == 0 || n >= self.len() {
            return Err(Error::InvalidParameter(format!(
                "split point {n} must lie strictly inside a series of length {}",
                self.len()
            )));
        }
        let (a, b) = self.values.split_at(n);
        Ok((
            TimeSeries {
                values: a.to_vec(),
                label: self.label.clone(),
            },
            TimeSeries {
                values: b.to_vec(),
                label: self.label.clone(),
            },
        ))
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// An ordered sequence of finite planar samples `(x1, x2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries2D {
    values: Vec<[f64; 2]>,
    label: Option<String>,
}

impl TimeSeries2D {
    pub fn new(values: Vec<[f64; 2]>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSeries("series is empty".into()));
        }
        if let Some(pos) = values
            .iter()
            .position(|p| !(p[0].is_finite() && p[1].is_finite()))
        {
            return Err(Error::InvalidSeries(format!(
                "non-finite point {:?} at index {pos}",
                values[pos]
            )));
        }
        Ok(Self {
            values,
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }

    pub fn into_values(self) -> Vec<[f64; 2]> {
        self.values
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> [f64; 2] {
        self.values[self.values.len() - 1]
    }

    /// The series of one coordinate (`0` for x1, `1` for x2).
    pub fn component(&self, index: usize) -> TimeSeries {
        TimeSeries {
            values: self.values.iter().map(|p| p[index]).collect(),
            label: self.label.clone(),
        }
    }

    pub fn split_at(&self, n: usize) -> Result<(TimeSeries2D, TimeSeries2D)> {
        if n == 0 || n >= self.len() {
            return Err(Error::InvalidParameter(format!(
                "split point {n} must lie strictly inside a series of length {}",
                self.len()
            )));
        }
        let (a, b) = self.values.split_at(n);
        Ok((
            TimeSeries2D {
                values: a.to_vec(),
                label: self.label.clone(),
            },
            TimeSeries2D {
                values: b.to_vec(),
                label: self.label.clone(),
            },
        ))
    }
}

/// A series of either dimensionality, as produced by generators and readers.
#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    Scalar(TimeSeries),
    Planar(TimeSeries2D),
}

impl Series {
    pub fn dimension(&self) -> usize {
        match self {
            Series::Scalar(_) => 1,
            Series::Planar(_) => 2,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Series::Scalar(s) => s.len(),
            Series::Planar(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn into_scalar(self) -> Result<TimeSeries> {
        match self {
            Series::Scalar(s) => Ok(s),
            Series::Planar(_) => Err(Error::InvalidParameter(
                "expected a one-dimensional series".into(),
            )),
        }
    }

    pub fn into_planar(self) -> Result<TimeSeries2D> {
        match self {
            Series::Planar(s) => Ok(s),
            Series::Scalar(_) => Err(Error::InvalidParameter(
                "expected a two-dimensional series".into(),
            )),
        }
    }
}
