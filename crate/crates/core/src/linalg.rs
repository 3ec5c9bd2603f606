//! Double-double Cholesky factorization of moment Gram matrices.
//!
//! Hankel-type Gram matrices of monomials are badly conditioned, so the
//! factorization runs in ~106-bit arithmetic and only the results are rounded
//! back to `f64`.

use twofloat::TwoFloat;

pub(crate) type Dd = TwoFloat;

pub(crate) fn dd(x: f64) -> Dd {
    TwoFloat::from(x)
}

pub(crate) fn to_f64(x: Dd) -> f64 {
    x.hi() + x.lo()
}

/// `a / b` to double-double accuracy.
///
/// `twofloat`'s own quotient is only accurate to `f64` precision; one
/// correction step with the exact residual `a - q b` restores the low word.
pub(crate) fn div(a: Dd, b: Dd) -> Dd {
    let q = a / b;
    let r = a - q * b;
    q + TwoFloat::from(r.hi() / b.hi())
}

/// Outcome of a factorization that stopped at a non-positive or tiny pivot.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PivotFailure {
    pub index: usize,
    /// The squared pivot, i.e. the squared residual norm of basis element `index`.
    pub pivot: f64,
}

/// Lower factor and squared pivots, or the failing pivot with those before it.
pub(crate) type Factorization = Result<(Vec<Vec<Dd>>, Vec<f64>), (PivotFailure, Vec<f64>)>;

/// Lower-triangular Cholesky factor `L` with `G = L L^T`.
///
/// `gram(r, c)` supplies the symmetric matrix entries. A pivot `d_k` fails when
/// `d_k <= eta * max(|G_kk|, f64::MIN_POSITIVE)`. The squared pivots are
/// returned alongside the factor.
pub(crate) fn cholesky<F>(size: usize, gram: F, eta: f64) -> Factorization
where
    F: Fn(usize, usize) -> Dd,
{
    let mut l: Vec<Vec<Dd>> = Vec::with_capacity(size);
    let mut pivots = Vec::with_capacity(size);
    for r in 0..size {
        let mut row = vec![dd(0.0); r + 1];
        for c in 0..r {
            let mut s = gram(r, c);
            for k in 0..c {
                s -= row[k] * l[c][k];
            }
            row[c] = div(s, l[c][c]);
        }
        let mut d = gram(r, r);
        let diag = to_f64(d);
        for k in 0..r {
            d -= row[k] * row[k];
        }
        let pivot = to_f64(d);
        pivots.push(pivot);
        if !(pivot > eta * diag.abs().max(f64::MIN_POSITIVE)) {
            return Err((PivotFailure { index: r, pivot }, pivots));
        }
        row[r] = d.sqrt();
        l.push(row);
    }
    Ok((l, pivots))
}

/// Inverse of a lower-triangular matrix, itself lower triangular.
pub(crate) fn invert_lower(l: &[Vec<Dd>]) -> Vec<Vec<Dd>> {
    let n = l.len();
    let mut inv: Vec<Vec<Dd>> = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = vec![dd(0.0); r + 1];
        row[r] = div(dd(1.0), l[r][r]);
        for c in (0..r).rev() {
            // (L^{-1})_{rc} = -(1/L_rr) sum_{k=c}^{r-1} L_rk (L^{-1})_{kc}
            let mut s = dd(0.0);
            for k in c..r {
                s += l[r][k] * inv[k][c];
            }
            row[c] = div(-s, l[r][r]);
        }
        inv.push(row);
    }
    inv
}
