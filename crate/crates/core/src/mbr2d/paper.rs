//! The original bivariate moment recursion, term for term.

use super::{BivarIndex, OrthoPolySystem2D};
use crate::error::Error;
use crate::moments::{graded_count, graded_position, MomentHierarchy2D};
use crate::{CONDITIONING_THRESHOLD, MAX_ORDER};

/// Which subscript the `eta^(k,q)` factor in the `alpha` update carries.
///
/// The formula as stated reads `eta_k^(k,q)`. Orthogonality requires `eta_h^(k,q)`;
/// `I` is the third candidate, which turns the factor into zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EtaSubscript {
    #[default]
    K,
    H,
    I,
}

impl std::str::FromStr for EtaSubscript {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "k" | "K" => Ok(Self::K),
            "h" | "H" => Ok(Self::H),
            "i" | "I" => Ok(Self::I),
            _ => Err(Error::InvalidParameter(format!(
                "unknown eta subscript {s:?} (expected k, h or i)"
            ))),
        }
    }
}

/// Intermediates of one `(i, j)` step.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub index: BivarIndex,
    /// `A_hk^(i,j)` for every earlier degree `h < i`, keyed by `(h, k)`.
    pub a: Vec<(BivarIndex, f64)>,
    /// `B_k^(i,j)` for `k < j`.
    pub b: Vec<f64>,
    pub norm: f64,
}

/// A recursion run that stopped, with everything computed up to that point.
#[derive(Debug)]
pub struct PaperFailure {
    pub error: Error,
    pub trace: Vec<TraceStep>,
}

impl std::fmt::Display for PaperFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} after {} steps", self.error, self.trace.len())
    }
}

impl std::error::Error for PaperFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<PaperFailure> for Error {
    fn from(f: PaperFailure) -> Self {
        f.error
    }
}

/// Recursion with the printed `eta` subscript.
pub fn poly_system_2d_paper(
    m: &MomentHierarchy2D,
    n: usize,
) -> Result<OrthoPolySystem2D, PaperFailure> {
    poly_system_2d_paper_with(m, n, EtaSubscript::K)
}

struct Tables {
    rows: Vec<Vec<f64>>,
}

impl Tables {
    // Coefficients that fall outside a polynomial's support are zero.
    fn alpha(&self, of: (usize, usize), h: usize, k: usize) -> f64 {
        let (r, q) = of;
        if h > k || k >= r {
            return 0.0;
        }
        self.rows[graded_position(r - q, q)][graded_position(k - h, h)]
    }

    fn eta(&self, of: (usize, usize), m: usize) -> f64 {
        let (r, q) = of;
        if m > q {
            return 0.0;
        }
        self.rows[graded_position(r - q, q)][graded_position(r - m, m)]
    }
}

pub fn poly_system_2d_paper_with(
    m: &MomentHierarchy2D,
    n: usize,
    reading: EtaSubscript,
) -> Result<OrthoPolySystem2D, PaperFailure> {
    let fail = |error| PaperFailure {
        error,
        trace: Vec::new(),
    };
    if n > MAX_ORDER {
        return Err(fail(Error::InvalidParameter(format!(
            "order {n} exceeds the supported maximum {MAX_ORDER}"
        ))));
    }
    if m.max_degree() < 2 * n {
        return Err(fail(Error::InvalidParameter(format!(
            "order {n} needs moments through degree {}, have {}",
            2 * n,
            m.max_degree()
        ))));
    }
    let mm = |a: usize, b: usize| m.get(a, b);
    let mut t = Tables {
        rows: vec![vec![1.0]],
    };
    let mut norms = vec![1.0];
    let mut trace = Vec::new();

    for i in 1..=n {
        for j in 0..=i {
            let mut a_vals = Vec::with_capacity(graded_count(i - 1));
            for h in 0..i {
                for k in 0..=h {
                    let mut s = 0.0;
                    for l in 0..h {
                        for mi in 0..=l {
                            s += t.alpha((h, k), mi, l) * mm(l - mi + i - j, mi + j);
                        }
                    }
                    for mi in 0..=k {
                        s += t.eta((h, k), mi) * mm(h - mi + i - j, mi + j);
                    }
                    a_vals.push(-s);
                }
            }
            let a_at = |h: usize, k: usize| a_vals[graded_position(h - k, k)];

            let mut b_vals = Vec::with_capacity(j);
            for k in 0..j {
                let mut s = 0.0;
                for l in 0..i {
                    for mi in 0..=l {
                        s += t.alpha((i, k), mi, l) * mm(l - mi + i - j, mi + j);
                    }
                }
                for mi in 0..=k {
                    s += t.eta((i, k), mi) * mm(2 * i - mi - j, mi + j);
                }
                b_vals.push(-s);
            }

            let diag = mm(2 * (i - j), 2 * j);
            let norm = diag
                - a_vals.iter().map(|v| v * v).sum::<f64>()
                - b_vals.iter().map(|v| v * v).sum::<f64>();
            let index = BivarIndex { i, j };
            trace.push(TraceStep {
                index,
                a: (0..i)
                    .flat_map(|h| (0..=h).map(move |k| BivarIndex { i: h, j: k }))
                    .zip(a_vals.iter().copied())
                    .collect(),
                b: b_vals.clone(),
                norm,
            });
            let error = if norm.abs() <= CONDITIONING_THRESHOLD * diag.abs().max(f64::MIN_POSITIVE)
            {
                Some(Error::IllConditioned2D { i, j, norm })
            } else if norm < 0.0 {
                Some(Error::NegativeNorm { i, j, value: norm })
            } else {
                None
            };
            if let Some(error) = error {
                return Err(PaperFailure { error, trace });
            }
            let root = norm.sqrt();

            let mut row = vec![0.0; graded_position(i - j, j) + 1];
            for k in 0..i {
                for h in 0..=k {
                    let mut s = 0.0;
                    for r in (k + 1)..i {
                        for q in 0..=r {
                            s += a_at(r, q) * t.alpha((r, q), h, k);
                        }
                    }
                    let sub = match reading {
                        EtaSubscript::K => k,
                        EtaSubscript::H => h,
                        EtaSubscript::I => i,
                    };
                    for q in h..=k {
                        s += a_at(k, q) * t.eta((k, q), sub);
                    }
                    for (q, &b) in b_vals.iter().enumerate() {
                        s += b * t.alpha((i, q), h, k);
                    }
                    row[graded_position(k - h, h)] = s / root;
                }
            }
            for k in 0..j {
                let s: f64 = (k..j).map(|q| b_vals[q] * t.eta((i, q), k)).sum();
                row[graded_position(i - k, k)] = s / root;
            }
            row[graded_position(i - j, j)] = 1.0 / root;
            t.rows.push(row);
            norms.push(norm);
        }
    }
    Ok(OrthoPolySystem2D::from_parts(n, t.rows, norms, trace))
}

/// Hand-expanded formula for `N_20`, evaluated literally.
///
/// `N_20 = M_40 - A00^2 - A10^2 - A11^2` with `A00 = -M_20`,
/// `A10 = -(M_10 + M_30) / sqrt(N_10)` and the six-term expression for `A11`.
/// The expansion is not algebraically equivalent to the recursion, so its value
/// can differ from the trace in sign as well as size.
pub fn n20_closed_form(m: &MomentHierarchy2D) -> crate::Result<f64> {
    if m.max_degree() < 4 {
        return Err(Error::InvalidParameter(format!(
            "closed form needs moments through degree 4, have {}",
            m.max_degree()
        )));
    }
    let g = |a, b| m.get(a, b);
    let (m10, m01, m20, m11, m02, m30, m40) = (
        g(1, 0),
        g(0, 1),
        g(2, 0),
        g(1, 1),
        g(0, 2),
        g(3, 0),
        g(4, 0),
    );
    let n10 = m20 - m10 * m10;
    if !(n10 > CONDITIONING_THRESHOLD * m20.abs().max(f64::MIN_POSITIVE)) {
        return Err(Error::IllConditioned2D {
            i: 1,
            j: 0,
            norm: n10,
        });
    }
    let r10 = n10.sqrt();
    let b0 = (m10 * m01 - m11) / r10;
    let n11 = m02 - m01 * m01 - b0 * b0;
    if !(n11 > CONDITIONING_THRESHOLD * m02.abs().max(f64::MIN_POSITIVE)) {
        return Err(Error::IllConditioned2D {
            i: 1,
            j: 1,
            norm: n11,
        });
    }
    let r11 = n11.sqrt();
    let a00 = -m20;
    let a10 = -m10 / r10 - m30 / r10;
    let a11 = m01 / r10 - (m01 * m10).powi(2) / n10.powf(1.5) + m01 * m11 * m10 / n10.powf(1.5)
        - m10 * m01 * m11 / (n10 * r11)
        + m11 * m11 / (n10 * r11)
        - m02 / r11;
    Ok(m40 - a00 * a00 - a10 * a10 - a11 * a11)
}
