//! Ergodic sums: moments and functional moments in one and two dimensions.
//!
//! All sums are accumulated with compensated summation. Moments average over
//! every sample; functional moments average over the `N - 1` consecutive
//! transition pairs of a length-`N` series.

use crate::error::{Error, Result};
use crate::linalg::{dd, div, Dd};
use crate::series::{TimeSeries, TimeSeries2D};
use crate::sum::CompensatedSum;

/// Position of the monomial `x1^p x2^q` in graded order: by total degree, then
/// by ascending power of `x2`.
pub fn graded_position(p: usize, q: usize) -> usize {
    let d = p + q;
    d * (d + 1) / 2 + q
}

/// Number of monomials of total degree at most `degree`.
pub fn graded_count(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Exponent pair `(p, q)` of the monomial at graded position `pos`.
pub fn graded_exponents(pos: usize) -> (usize, usize) {
    let mut d = 0;
    while graded_count(d) <= pos {
        d += 1;
    }
    let q = pos - d * (d + 1) / 2;
    (d - q, q)
}

pub(crate) fn check_overflow(max_abs: f64, order: usize) -> Result<()> {
    if max_abs > 1.0 && order as f64 * max_abs.ln() > f64::MAX.ln() {
        Err(Error::OverflowRisk { order, max_abs })
    } else {
        Ok(())
    }
}

fn require_len(len: usize, needed: usize) -> Result<()> {
    if len < needed {
        Err(Error::SeriesTooShort { needed, got: len })
    } else {
        Ok(())
    }
}

/// Accumulates `weight * x^k` for `k = 0..=max_k` into `acc`.
fn accumulate_powers(acc: &mut [CompensatedSum], x: f64, weight: f64) {
    let mut p = weight;
    for slot in acc.iter_mut() {
        slot.add(p);
        p *= x;
    }
}

// Double-double means feed the fits, where moment rounding would otherwise be
// amplified by the conditioning of the moment matrix.

/// `(1/N) sum x^k` for `k = 0..=max_k`.
pub(crate) fn power_means_dd(samples: &[f64], max_k: usize) -> Result<Vec<Dd>> {
    require_len(samples.len(), 1)?;
    let max_abs = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    check_overflow(max_abs, max_k)?;
    let mut acc = vec![dd(0.0); max_k + 1];
    for &x in samples {
        let mut p = dd(1.0);
        for slot in acc.iter_mut() {
            *slot += p;
            p *= x;
        }
    }
    let n = samples.len() as f64;
    Ok(acc.into_iter().map(|s| div(s, dd(n))).collect())
}

/// `(1/(N-1)) sum x_{i+1} x_i^j` for `j = 0..=max_j`.
pub(crate) fn functional_means_dd(xs: &[f64], max_j: usize) -> Result<Vec<Dd>> {
    require_len(xs.len(), 2)?;
    let max_abs = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    check_overflow(max_abs, max_j + 1)?;
    let mut acc = vec![dd(0.0); max_j + 1];
    for w in xs.windows(2) {
        let mut p = dd(w[1]);
        for slot in acc.iter_mut() {
            *slot += p;
            p *= w[0];
        }
    }
    let n = (xs.len() - 1) as f64;
    Ok(acc.into_iter().map(|s| div(s, dd(n))).collect())
}

fn monomials_dd(x: [f64; 2], degree: usize, out: &mut Vec<Dd>) {
    let mut p1 = vec![dd(1.0); degree + 1];
    let mut p2 = vec![dd(1.0); degree + 1];
    for k in 1..=degree {
        p1[k] = p1[k - 1] * x[0];
        p2[k] = p2[k - 1] * x[1];
    }
    out.clear();
    for d in 0..=degree {
        for q in 0..=d {
            out.push(p1[d - q] * p2[q]);
        }
    }
}

/// Graded means of `x1^p x2^q` for `p + q <= max_degree`.
pub(crate) fn power_means_2d_dd(samples: &[[f64; 2]], max_degree: usize) -> Result<Vec<Dd>> {
    require_len(samples.len(), 1)?;
    let max_abs = samples
        .iter()
        .fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    check_overflow(max_abs, max_degree)?;
    let mut acc = vec![dd(0.0); graded_count(max_degree)];
    let mut mono = Vec::with_capacity(acc.len());
    for &x in samples {
        monomials_dd(x, max_degree, &mut mono);
        for (slot, &m) in acc.iter_mut().zip(&mono) {
            *slot += m;
        }
    }
    let n = samples.len() as f64;
    Ok(acc.into_iter().map(|s| div(s, dd(n))).collect())
}

/// Graded `Gamma_s^(h,k)` for both components.
pub(crate) fn functional_means_2d_dd(pts: &[[f64; 2]], max_degree: usize) -> Result<[Vec<Dd>; 2]> {
    require_len(pts.len(), 2)?;
    let max_abs = pts
        .iter()
        .fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    check_overflow(max_abs, max_degree + 1)?;
    let size = graded_count(max_degree);
    let mut acc = [vec![dd(0.0); size], vec![dd(0.0); size]];
    let mut mono = Vec::with_capacity(size);
    for w in pts.windows(2) {
        monomials_dd(w[0], max_degree, &mut mono);
        for (t, &m) in mono.iter().enumerate() {
            acc[0][t] += m * w[1][0];
            acc[1][t] += m * w[1][1];
        }
    }
    let n = (pts.len() - 1) as f64;
    let [a, b] = acc;
    Ok([
        a.into_iter().map(|s| div(s, dd(n))).collect(),
        b.into_iter().map(|s| div(s, dd(n))).collect(),
    ])
}

/// Estimated moments `M_0..M_K` of the invariant measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentHierarchy {
    values: Vec<f64>,
    sample_count: usize,
}

impl MomentHierarchy {
    /// Moments of the empirical measure of `samples`.
    pub fn from_samples(samples: &[f64], max_k: usize) -> Result<Self> {
        require_len(samples.len(), 1)?;
        let max_abs = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        check_overflow(max_abs, max_k)?;
        let mut acc = vec![CompensatedSum::default(); max_k + 1];
        for &x in samples {
            accumulate_powers(&mut acc, x, 1.0);
        }
        let n = samples.len() as f64;
        let mut values: Vec<f64> = acc.iter().map(|s| s.value() / n).collect();
        values[0] = 1.0;
        Ok(Self {
            values,
            sample_count: samples.len(),
        })
    }

    /// Builds a hierarchy from known moment values, e.g. analytic ones.
    pub fn from_values(values: Vec<f64>, sample_count: usize) -> Result<Self> {
        if values.first() != Some(&1.0) {
            return Err(Error::InvalidParameter("M_0 must equal 1".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("moments must be finite".into()));
        }
        Ok(Self {
            values,
            sample_count,
        })
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }
}

/// `M_k = (1/N) sum x_i^k` for `k = 0..=max_k`.
pub fn moment_hierarchy(series: &TimeSeries, max_k: usize) -> Result<MomentHierarchy> {
    require_len(series.len(), 2)?;
    MomentHierarchy::from_samples(series.values(), max_k)
}

/// Estimated `Gamma_j = <f(x) x^j>` from consecutive pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalMoments {
    values: Vec<f64>,
    sample_count: usize,
}

impl FunctionalMoments {
    pub fn get(&self, j: usize) -> f64 {
        self.values[j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    /// Number of transition pairs summed, `N - 1`.
    pub fn sample_count(&self) -> usize {
        self.sample_count
    }
}

/// `Gamma_j = (1/(N-1)) sum_{i<N} x_{i+1} x_i^j` for `j = 0..=max_j`.
pub fn functional_moments(series: &TimeSeries, max_j: usize) -> Result<FunctionalMoments> {
    require_len(series.len(), 2)?;
    let xs = series.values();
    let max_abs = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    check_overflow(max_abs, max_j + 1)?;
    let mut acc = vec![CompensatedSum::default(); max_j + 1];
    for pair in xs.windows(2) {
        accumulate_powers(&mut acc, pair[0], pair[1]);
    }
    let n = (xs.len() - 1) as f64;
    Ok(FunctionalMoments {
        values: acc.iter().map(|s| s.value() / n).collect(),
        sample_count: xs.len() - 1,
    })
}

/// Mixed moments `M_pq = <x1^p x2^q>` for `p + q <= K`, stored in graded order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentHierarchy2D {
    max_degree: usize,
    values: Vec<f64>,
    sample_count: usize,
}

impl MomentHierarchy2D {
    pub fn from_samples(samples: &[[f64; 2]], max_total_degree: usize) -> Result<Self> {
        require_len(samples.len(), 1)?;
        let max_abs = samples
            .iter()
            .fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
        check_overflow(max_abs, max_total_degree)?;
        let mut acc = vec![CompensatedSum::default(); graded_count(max_total_degree)];
        let mut x2_powers = vec![0.0; max_total_degree + 1];
        for &[x1, x2] in samples {
            fill_powers(&mut x2_powers, x2);
            let mut p1 = 1.0;
            for p in 0..=max_total_degree {
                for q in 0..=(max_total_degree - p) {
                    acc[graded_position(p, q)].add(p1 * x2_powers[q]);
                }
                p1 *= x1;
            }
        }
        let n = samples.len() as f64;
        let mut values: Vec<f64> = acc.iter().map(|s| s.value() / n).collect();
        values[0] = 1.0;
        Ok(Self {
            max_degree: max_total_degree,
            values,
            sample_count: samples.len(),
        })
    }

    /// `M_pq`, the mean of `x1^p x2^q`.
    pub fn get(&self, p: usize, q: usize) -> f64 {
        assert!(
            p + q <= self.max_degree,
            "moment M({p},{q}) beyond stored degree {}",
            self.max_degree
        );
        self.values[graded_position(p, q)]
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn fill_powers(out: &mut [f64], x: f64) {
    let mut p = 1.0;
    for slot in out.iter_mut() {
        *slot = p;
        p *= x;
    }
}

pub fn moment_hierarchy_2d(
    series: &TimeSeries2D,
    max_total_degree: usize,
) -> Result<MomentHierarchy2D> {
    require_len(series.len(), 2)?;
    MomentHierarchy2D::from_samples(series.values(), max_total_degree)
}

/// `Gamma_s^(h,k) = <x_{s,i+1} x1_i^h x2_i^k>` for `s in {1, 2}`, `h + k <= K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalMoments2D {
    max_degree: usize,
    values: [Vec<f64>; 2],
    sample_count: usize,
}

impl FunctionalMoments2D {
    /// `Gamma_s^(h,k)`; `s` is 1 or 2.
    pub fn get(&self, s: usize, h: usize, k: usize) -> f64 {
        assert!(s == 1 || s == 2, "component index must be 1 or 2");
        assert!(h + k <= self.max_degree);
        self.values[s - 1][graded_position(h, k)]
    }

    /// All entries of one component (`s = 1` or `2`) in graded order.
    pub fn component(&self, s: usize) -> &[f64] {
        &self.values[s - 1]
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }
}

pub fn functional_moments_2d(
    series: &TimeSeries2D,
    max_total_degree: usize,
) -> Result<FunctionalMoments2D> {
    require_len(series.len(), 2)?;
    let pts = series.values();
    let max_abs = pts
        .iter()
        .fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    check_overflow(max_abs, max_total_degree + 1)?;
    let count = graded_count(max_total_degree);
    let mut acc = [
        vec![CompensatedSum::default(); count],
        vec![CompensatedSum::default(); count],
    ];
    let mut x2_powers = vec![0.0; max_total_degree + 1];
    for w in pts.windows(2) {
        let [x1, x2] = w[0];
        let next = w[1];
        fill_powers(&mut x2_powers, x2);
        let mut p1 = 1.0;
        for h in 0..=max_total_degree {
            for k in 0..=(max_total_degree - h) {
                let m = p1 * x2_powers[k];
                let pos = graded_position(h, k);
                acc[0][pos].add(next[0] * m);
                acc[1][pos].add(next[1] * m);
            }
            p1 *= x1;
        }
    }
    let n = (pts.len() - 1) as f64;
    let finish = |a: &Vec<CompensatedSum>| a.iter().map(|s| s.value() / n).collect::<Vec<_>>();
    Ok(FunctionalMoments2D {
        max_degree: max_total_degree,
        values: [finish(&acc[0]), finish(&acc[1])],
        sample_count: pts.len() - 1,
    })
}
