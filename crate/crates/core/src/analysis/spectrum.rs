use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Periodogram ordinates at the positive Fourier frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    omegas: Vec<f64>,
    periods: Vec<f64>,
    ordinates: Vec<f64>,
}

impl Spectrum {
    /// `omega_j = 2 pi j / n` for `j = 1 ..= n/2`.
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// `2 pi / omega_j = n / j`.
    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }
}

/// `I(omega) = (sum y_t cos omega t)^2 + (sum y_t sin omega t)^2` on the
/// mean-centered series, without `1/n` normalization.
pub fn periodogram(series: &TimeSeries) -> Result<Spectrum> {
    let xs = series.values();
    let n = xs.len();
    if n < 2 {
        return Err(Error::SeriesTooShort { needed: 2, got: n });
    }
    let mean = crate::sum::compensated_sum(xs.iter().copied()) / n as f64;
    let mut buf: Vec<Complex<f64>> = xs.iter().map(|&x| Complex::new(x - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    let mut omegas = Vec::with_capacity(half);
    let mut periods = Vec::with_capacity(half);
    let mut ordinates = Vec::with_capacity(half);
    for (j, f) in buf.iter().enumerate().take(half + 1).skip(1) {
        omegas.push(2.0 * PI * j as f64 / n as f64);
        periods.push(n as f64 / j as f64);
        ordinates.push(f.norm_sqr());
    }
    Ok(Spectrum {
        omegas,
        periods,
        ordinates,
    })
}

/// Period and ordinate of the largest ordinate; ties go to the smaller omega.
pub fn dominant_period(spectrum: &Spectrum) -> (f64, f64) {
    let mut best = 0;
    for (j, &v) in spectrum.ordinates.iter().enumerate() {
        if v > spectrum.ordinates[best] {
            best = j;
        }
    }
    (spectrum.periods[best], spectrum.ordinates[best])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(xs: &[f64]) -> Vec<f64> {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        (1..=n / 2)
            .map(|j| {
                let w = 2.0 * PI * j as f64 / n as f64;
                let (mut c, mut s) = (0.0, 0.0);
                for (t, &x) in xs.iter().enumerate() {
                    c += (x - mean) * (w * (t + 1) as f64).cos();
                    s += (x - mean) * (w * (t + 1) as f64).sin();
                }
                c * c + s * s
            })
            .collect()
    }

    #[test]
    fn zero_series() {
        let s = periodogram(&TimeSeries::new(vec![0.0; 16]).unwrap()).unwrap();
        assert_eq!(s.len(), 8);
        assert!(s.ordinates().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_cosine() {
        let n = 64;
        let y: Vec<f64> = (1..=n)
            .map(|t| (2.0 * PI * t as f64 / n as f64).cos())
            .collect();
        let s = periodogram(&TimeSeries::new(y).unwrap()).unwrap();
        assert!((s.ordinates()[0] - 1024.0).abs() < 1e-9);
        assert!(s.ordinates()[1..].iter().all(|&v| v < 1e-9));
        assert_eq!(s.periods()[0], 64.0);
        assert!((s.omegas()[0] - 2.0 * PI / 64.0).abs() < 1e-15);
        let (p, power) = dominant_period(&s);
        assert_eq!(p, 64.0);
        assert!((power - 1024.0).abs() < 1e-9);
    }

    #[test]
    fn fft_matches_direct_sums() {
        for n in [2usize, 7, 30, 97] {
            let y: Vec<f64> = (0..n)
                .map(|t| ((t * t) as f64 * 0.37).sin() + 0.2)
                .collect();
            let fast = periodogram(&TimeSeries::new(y.clone()).unwrap()).unwrap();
            for (a, b) in fast.ordinates().iter().zip(direct(&y)) {
                assert!((a - b).abs() <= 1e-9 * b.max(1.0), "{n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn ties_prefer_longer_period() {
        let s = Spectrum {
            omegas: vec![1.0, 2.0],
            periods: vec![2.0 * PI, PI],
            ordinates: vec![5.0, 5.0],
        };
        assert_eq!(dominant_period(&s), (2.0 * PI, 5.0));
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            periodogram(&TimeSeries::new(vec![1.0]).unwrap()),
            Err(Error::SeriesTooShort { needed: 2, got: 1 })
        ));
    }
}
