//! Series files and CSV output.
//!
//! Data files hold one sample per line, either one value (scalar series) or two
//! whitespace-separated values (planar series). Lines starting with `#` and
//! blank lines are skipped. Values are written with the shortest decimal that
//! parses back to the same `f64`.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::analysis::{PredictionReport, Spectrum};
use crate::error::{Error, Result};
use crate::mbr2d::Diagnosis2D;
use crate::series::{Series, TimeSeries, TimeSeries2D};

pub fn parse_series(text: &str) -> Result<Series> {
    let mut scalar = Vec::new();
    let mut planar = Vec::new();
    let mut columns: Option<(usize, usize)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = || Error::Parse {
            line: line_no,
            content: raw.to_string(),
        };
        let fields = line
            .split_whitespace()
            .map(|f| f.parse::<f64>().map_err(|_| parse_err()))
            .collect::<Result<Vec<_>>>()?;
        if fields.len() > 2 {
            return Err(parse_err());
        }
        match columns {
            None => columns = Some((fields.len(), line_no)),
            Some((expected, _)) if expected != fields.len() => {
                return Err(Error::MixedColumnCount {
                    line: line_no,
                    expected,
                    found: fields.len(),
                })
            }
            _ => {}
        }
        match fields[..] {
            [x] => scalar.push(x),
            [x, y] => planar.push([x, y]),
            _ => unreachable!(),
        }
    }
    match columns {
        Some((2, _)) => Ok(Series::Planar(TimeSeries2D::new(planar)?)),
        Some(_) => Ok(Series::Scalar(TimeSeries::new(scalar)?)),
        None => Err(Error::InvalidSeries("file contains no samples".into())),
    }
}

pub fn read_series(path: impl AsRef<Path>) -> Result<Series> {
    parse_series(&std::fs::read_to_string(path)?)
}

pub fn format_series(series: &Series) -> String {
    let mut out = String::new();
    match series {
        Series::Scalar(s) => {
            for v in s.values() {
                writeln!(out, "{v:?}").unwrap();
            }
        }
        Series::Planar(s) => {
            for [x, y] in s.values() {
                writeln!(out, "{x:?} {y:?}").unwrap();
            }
        }
    }
    out
}

pub fn write_series(series: &Series, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_series(series))?;
    Ok(())
}

/// `start:stop:step`, both ends included.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("bad grid {spec:?} (expected start:stop:step)"));
    let parts = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    crate::analysis::epsilon_grid(start, stop, step)
}

/// Something that renders as a CSV table.
pub trait CsvTable {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

impl CsvTable for PredictionReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["epsilon", "T"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.epsilons
            .iter()
            .zip(&self.lengths)
            .map(|(&e, t)| vec![num(e), t.to_string()])
            .collect()
    }
}

impl CsvTable for Spectrum {
    fn header(&self) -> Vec<&'static str> {
        vec!["omega", "period", "I"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        (0..self.len())
            .map(|j| {
                vec![
                    num(self.omegas()[j]),
                    num(self.periods()[j]),
                    num(self.ordinates()[j]),
                ]
            })
            .collect()
    }
}

/// Points of a lag plot.
#[derive(Debug, Clone, PartialEq)]
pub struct LagPairs(pub Vec<(f64, f64)>);

impl CsvTable for LagPairs {
    fn header(&self) -> Vec<&'static str> {
        vec!["x_t", "x_t_plus_lag"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.0.iter().map(|&(a, b)| vec![num(a), num(b)]).collect()
    }
}

impl CsvTable for Diagnosis2D {
    fn header(&self) -> Vec<&'static str> {
        vec!["i", "j", "N_paper", "N_oracle", "status"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let cell = |v: Option<f64>| v.map(num).unwrap_or_default();
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.index.i.to_string(),
                    r.index.j.to_string(),
                    cell(r.paper_norm),
                    cell(r.oracle_norm),
                    r.status.as_str().to_string(),
                ]
            })
            .collect()
    }
}

/// Writes a header row and `rows` with LF line endings.
pub fn write_csv_to<W: Write>(writer: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(path: impl AsRef<Path>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let file = File::create(path)?;
    write_csv_to(BufWriter::new(file), header, rows)
}

pub fn write_table(path: impl AsRef<Path>, table: &impl CsvTable) -> Result<()> {
    write_csv(path, &table.header(), &table.rows())
}
