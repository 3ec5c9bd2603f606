//! `mbr2` text format.
//!
//! ```text
//! mbr2 n=<order> N=<samples>
//! c <s> <i> <j> <c_s^(i,j)>
//! p <i> <j> <h> <k> <coefficient of x1^(h-k) x2^k in pi^(i,j)>
//! ```

use std::fmt;
use std::str::FromStr;

use super::corrected::ReconstructedMap2D;
use super::{BivarIndex, OrthoPolySystem2D};
use crate::error::{Error, Result};
use crate::mbr1d::parse_header;
use crate::moments::graded_count;
use crate::MAX_ORDER;

impl fmt::Display for ReconstructedMap2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.order();
        writeln!(f, "mbr2 n={n} N={}", self.sample_count())?;
        for s in 1..=2 {
            for idx in BivarIndex::up_to(n) {
                writeln!(
                    f,
                    "c {s} {} {} {:?}",
                    idx.i,
                    idx.j,
                    self.coefficient(s, idx)
                )?;
            }
        }
        for idx in BivarIndex::up_to(n) {
            for (t, v) in self.basis().row(idx).iter().enumerate() {
                let m = BivarIndex::from_position(t);
                writeln!(f, "p {} {} {} {} {v:?}", idx.i, idx.j, m.i, m.j)?;
            }
        }
        Ok(())
    }
}

fn field<T: FromStr>(tok: Option<&str>, line: &str) -> Result<T> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::ModelFormat(format!("malformed line {line:?}")))
}

fn index(i: usize, j: usize, n: usize, line: &str) -> Result<BivarIndex> {
    if j > i || i > n {
        return Err(Error::ModelFormat(format!(
            "index out of range in {line:?}"
        )));
    }
    Ok(BivarIndex { i, j })
}

impl FromStr for ReconstructedMap2D {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::ModelFormat("empty model file".into()))?;
        let (n, samples) = parse_header(header, "mbr2")?;
        if n == 0 || n > MAX_ORDER {
            return Err(Error::ModelFormat(format!("unsupported order {n}")));
        }
        let size = graded_count(n);
        let mut coeffs: [Vec<Option<f64>>; 2] = [vec![None; size], vec![None; size]];
        let mut rows: Vec<Vec<Option<f64>>> = (0..size).map(|p| vec![None; p + 1]).collect();

        for line in lines {
            let mut tok = line.split_whitespace();
            let (slot, value_tok) = match tok.next() {
                Some("c") => {
                    let s: usize = field(tok.next(), line)?;
                    let idx = index(field(tok.next(), line)?, field(tok.next(), line)?, n, line)?;
                    if !(1..=2).contains(&s) {
                        return Err(Error::ModelFormat(format!("bad component in {line:?}")));
                    }
                    (&mut coeffs[s - 1][idx.position()], tok.next())
                }
                Some("p") => {
                    let idx = index(field(tok.next(), line)?, field(tok.next(), line)?, n, line)?;
                    let mono = index(field(tok.next(), line)?, field(tok.next(), line)?, n, line)?;
                    if mono.position() > idx.position() {
                        return Err(Error::ModelFormat(format!(
                            "entry above diagonal in {line:?}"
                        )));
                    }
                    (&mut rows[idx.position()][mono.position()], tok.next())
                }
                _ => return Err(Error::ModelFormat(format!("unknown line {line:?}"))),
            };
            let value: f64 = field(value_tok, line)?;
            if !value.is_finite() || tok.next().is_some() {
                return Err(Error::ModelFormat(format!("malformed line {line:?}")));
            }
            if slot.replace(value).is_some() {
                return Err(Error::ModelFormat(format!("duplicate entry {line:?}")));
            }
        }

        let complete = |v: Vec<Option<f64>>| -> Result<Vec<f64>> {
            v.into_iter()
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| Error::ModelFormat("model file is missing entries".into()))
        };
        let [c1, c2] = coeffs;
        let rows = rows.into_iter().map(complete).collect::<Result<Vec<_>>>()?;
        let basis = OrthoPolySystem2D::from_rows(n, rows)?;
        ReconstructedMap2D::from_parts([complete(c1)?, complete(c2)?], basis, samples)
    }
}
