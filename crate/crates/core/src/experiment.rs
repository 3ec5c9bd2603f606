//! The canned experiments, written as CSV files plus a `manifest.txt`.
//!
//! A failure inside one part of an experiment (an ill-conditioned fit, a
//! diverging prediction) is written to the manifest and the rest of the
//! experiment still runs. Only I/O errors abort a run. Output is a pure
//! function of the configuration.

use std::path::{Path, PathBuf};

use crate::analysis::{
    add_gaussian_noise, default_epsilons, lag_pairs, median, periodogram, prediction_curve,
    residuals, table_amplitude, NoiseScaling, PredictionMode, PredictionReport,
};
use crate::error::{Error, Result};
use crate::generators::{
    generate_series, generate_series_2d, MapSpec, DEFAULT_HENON_START, DEFAULT_X0,
};
use crate::io::{write_csv, write_table, CsvTable, LagPairs};
use crate::mbr1d::{fit, ReconstructedMap1D};
use crate::mbr2d::{diagnose2d, fit2d_corrected, BivarIndex};
use crate::series::TimeSeries;
use crate::MAX_ORDER;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    Replicate1D,
    Diagnose2D,
    NoiseSweep,
}

impl ExperimentId {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Replicate1D => "replicate-1d",
            ExperimentId::Diagnose2D => "diagnose-2d",
            ExperimentId::NoiseSweep => "noise-sweep",
        }
    }

    fn default_length(self) -> usize {
        match self {
            ExperimentId::Diagnose2D => 50_000,
            _ => 30_000,
        }
    }
}

impl std::str::FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "replicate-1d" => Ok(ExperimentId::Replicate1D),
            "diagnose-2d" => Ok(ExperimentId::Diagnose2D),
            "noise-sweep" => Ok(ExperimentId::NoiseSweep),
            _ => Err(Error::InvalidParameter(format!(
                "unknown experiment {s:?} (expected replicate-1d, diagnose-2d or noise-sweep)"
            ))),
        }
    }
}

/// Noise levels of the default sweep.
pub const DEFAULT_LEVELS: [f64; 8] = [0.01, 0.05, 0.10, 0.15, 0.20, 0.30, 0.40, 0.50];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    /// Training length; `None` picks 30000 (50000 for the Hénon diagnosis).
    pub length: Option<usize>,
    /// Model order; `None` keeps the per-dataset defaults.
    pub order: Option<usize>,
    /// Held-out samples after the training set.
    pub continuation: usize,
    pub epsilons: Vec<f64>,
    pub levels: Vec<f64>,
    pub seeds: Vec<u64>,
    /// `Absolute` uses the tabulated amplitude for each level.
    pub scaling: NoiseScaling,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(id: ExperimentId, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            id,
            length: None,
            order: None,
            continuation: 1000,
            epsilons: default_epsilons(),
            levels: DEFAULT_LEVELS.to_vec(),
            seeds: (1..=5).collect(),
            scaling: NoiseScaling::Absolute,
            out_dir: out_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.epsilons.is_empty()
            || !self.epsilons.iter().all(|e| *e > 0.0 && e.is_finite())
            || self.epsilons.windows(2).any(|w| w[1] <= w[0])
        {
            return bad("tolerance grid must be positive and strictly increasing".into());
        }
        if let Some(n) = self.length {
            if !(100..=10_000_000).contains(&n) {
                return bad(format!("training length {n} outside 100..=10000000"));
            }
        }
        if let Some(n) = self.order {
            if n == 0 || n > MAX_ORDER {
                return bad(format!("order must lie in 1..={MAX_ORDER}, got {n}"));
            }
        }
        if self.continuation < 2 {
            return bad("continuation must hold at least 2 samples".into());
        }
        if self.id == ExperimentId::NoiseSweep {
            if self.seeds.len() < 5 {
                return bad(format!(
                    "noise sweep needs at least 5 seeds, got {}",
                    self.seeds.len()
                ));
            }
            if self.levels.is_empty() || !self.levels.iter().all(|l| *l >= 0.0 && l.is_finite()) {
                return bad("noise levels must be finite and non-negative".into());
            }
        }
        Ok(())
    }

    fn length(&self) -> usize {
        self.length.unwrap_or(self.id.default_length())
    }
}

/// Ordered `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest(pub Vec<(String, String)>);

impl Manifest {
    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        self.0.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub files: Vec<PathBuf>,
    pub manifest: Manifest,
    /// Parts that failed and were recorded in the manifest.
    pub failures: usize,
}

struct Run<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
    manifest: Manifest,
    failures: usize,
}

impl Run<'_> {
    fn table(&mut self, name: &str, table: &impl CsvTable) -> Result<()> {
        let path = self.dir.join(name);
        write_table(&path, table)?;
        self.files.push(path);
        Ok(())
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let path = self.dir.join(name);
        write_csv(&path, header, rows)?;
        self.files.push(path);
        Ok(())
    }

    fn fail(&mut self, key: &str, e: &Error) {
        self.manifest.set(format!("{key}.error"), e);
        self.failures += 1;
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir)?;
    let mut run = Run {
        dir: &config.out_dir,
        files: Vec::new(),
        manifest: Manifest::default(),
        failures: 0,
    };
    run.manifest.set("experiment", config.id.name());
    run.manifest.set("length", config.length());
    run.manifest.set("continuation", config.continuation);
    run.manifest.set("epsilons", format_list(&config.epsilons));
    match config.id {
        ExperimentId::Replicate1D => replicate_1d(config, &mut run)?,
        ExperimentId::Diagnose2D => diagnose_2d(config, &mut run)?,
        ExperimentId::NoiseSweep => noise_sweep(config, &mut run)?,
    }
    let names: Vec<String> = run
        .files
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    run.manifest.set("files", names.join(","));
    run.manifest.set("failures", run.failures);
    let manifest_path = config.out_dir.join("manifest.txt");
    std::fs::write(&manifest_path, run.manifest.render())?;
    run.files.push(manifest_path);
    Ok(ExperimentOutcome {
        files: run.files,
        manifest: run.manifest,
        failures: run.failures,
    })
}

fn format_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn split(spec: &MapSpec, train: usize, cont: usize) -> Result<(TimeSeries, TimeSeries)> {
    generate_series(spec, train + cont)?.split_at(train)
}

fn curves(
    run: &mut Run,
    key: &str,
    model: &ReconstructedMap1D,
    train: &TimeSeries,
    test: &TimeSeries,
    epsilons: &[f64],
) -> Result<Option<PredictionReport>> {
    let mut end_report = None;
    for (mode, suffix) in [
        (PredictionMode::EndOfSet, "end"),
        (PredictionMode::mean_over_set(), "mean"),
    ] {
        match prediction_curve(model, train.values(), test.values(), epsilons, mode) {
            Ok(r) => {
                if !r.diverged_starts.is_empty() {
                    run.manifest.set(
                        format!("{key}.{suffix}.diverged_starts"),
                        r.diverged_starts.len(),
                    );
                }
                run.table(&format!("{key}_predlen_{suffix}.csv"), &r)?;
                if mode == PredictionMode::EndOfSet {
                    end_report = Some(r);
                }
            }
            Err(e) => run.fail(&format!("{key}.{suffix}"), &e),
        }
    }
    Ok(end_report)
}

fn replicate_1d(config: &ExperimentConfig, run: &mut Run) -> Result<()> {
    let datasets = [
        ("quadratic", MapSpec::quadratic(3.8, DEFAULT_X0), 2),
        (
            "expquad",
            MapSpec::exp_quadratic(10.0, 2.51705, DEFAULT_X0),
            10,
        ),
    ];
    for (key, spec, default_order) in datasets {
        let order = config.order.unwrap_or(default_order);
        run.manifest.set(format!("{key}.order"), order);
        let (train, test) = match split(&spec, config.length(), config.continuation) {
            Ok(p) => p,
            Err(e) => {
                run.fail(key, &e);
                continue;
            }
        };
        let model = match fit(&train, order) {
            Ok(m) => m,
            Err(e) => {
                run.fail(&format!("{key}.fit"), &e);
                continue;
            }
        };
        run.manifest.set(
            format!("{key}.coefficients"),
            format_list(model.coefficients()),
        );
        run.manifest
            .set(format!("{key}.monomial"), format_list(&model.to_monomial()));
        if let Some(r) = curves(run, key, &model, &train, &test, &config.epsilons)? {
            run.manifest
                .set(format!("{key}.T_end_max"), r.lengths.iter().max().unwrap());
        }

        let predicted = match model.predict(train.last(), test.len()) {
            Ok(p) => p,
            Err(d) => {
                run.manifest
                    .set(format!("{key}.prediction_diverged_after"), d.completed());
                if d.completed() < 2 {
                    run.fail(&format!("{key}.spectrum"), &Error::from(d));
                    continue;
                }
                TimeSeries::new(d.prefix).expect("bounded finite prefix")
            }
        };
        for (name, series) in [("actual", &test), ("model", &predicted)] {
            match periodogram(series) {
                Ok(s) => run.table(&format!("{key}_spectrum_{name}.csv"), &s)?,
                Err(e) => run.fail(&format!("{key}.spectrum_{name}"), &e),
            }
        }

        // one-step residuals over the held-out data
        let xs = test.values();
        let one_step: Vec<f64> = xs[..xs.len() - 1].iter().map(|&x| model.eval(x)).collect();
        let lagged = TimeSeries::new(one_step)
            .and_then(|p| residuals(&p, &TimeSeries::new(xs[1..].to_vec())?))
            .and_then(|r| lag_pairs(&r, 1));
        match lagged {
            Ok(pairs) => run.table(&format!("{key}_residual_lag.csv"), &LagPairs(pairs))?,
            Err(e) => run.fail(&format!("{key}.residuals"), &e),
        }
    }
    Ok(())
}

fn diagnose_2d(config: &ExperimentConfig, run: &mut Run) -> Result<()> {
    let order = config.order.unwrap_or(2);
    run.manifest.set("henon.order", order);
    let spec = MapSpec::henon_2d(1.4, 0.3, DEFAULT_HENON_START);
    match generate_series_2d(&spec, config.length()) {
        Ok(series) => {
            match diagnose2d(&series, order) {
                Ok(d) => {
                    run.table("henon_diagnosis.csv", &d)?;
                    let failure = |f: &Option<(BivarIndex, Error)>| match f {
                        Some((idx, e)) => format!("{idx} {e}"),
                        None => "none".into(),
                    };
                    run.manifest
                        .set("henon.paper_failure", failure(&d.paper_failure));
                    run.manifest
                        .set("henon.oracle_failure", failure(&d.oracle_failure));
                    match &d.n20_closed_form {
                        Ok(v) => run.manifest.set("henon.n20_closed_form", format!("{v:?}")),
                        Err(e) => run.manifest.set("henon.n20_closed_form", e),
                    }
                }
                Err(e) => run.fail("henon.diagnosis", &e),
            }
            match fit2d_corrected(&series, order) {
                Ok(model) => {
                    let mono = model.to_monomial();
                    let rows: Vec<Vec<String>> = (0..2)
                        .flat_map(|s| {
                            let mono = &mono[s];
                            (0..mono.len()).map(move |pos| {
                                let (p, q) = BivarIndex::from_position(pos).exponents();
                                vec![
                                    (s + 1).to_string(),
                                    p.to_string(),
                                    q.to_string(),
                                    format!("{:?}", mono[pos]),
                                ]
                            })
                        })
                        .collect();
                    run.csv(
                        "henon_coefficients.csv",
                        &["component", "p", "q", "coefficient"],
                        &rows,
                    )?;
                    run.manifest.set(
                        "henon.one_step_rms",
                        format!("{:?}", model.one_step_rms(&series)),
                    );
                }
                Err(e) => run.fail("henon.fit", &e),
            }
        }
        Err(e) => run.fail("henon", &e),
    }

    let delay_order = config.order.unwrap_or(2);
    run.manifest.set("delay.order", delay_order);
    let spec = MapSpec::henon_delay(1.4, 0.3, DEFAULT_HENON_START);
    let (train, test) = match split(&spec, config.length(), config.continuation) {
        Ok(p) => p,
        Err(e) => {
            run.fail("delay", &e);
            return Ok(());
        }
    };
    match fit(&train, delay_order) {
        Ok(model) => {
            run.manifest
                .set("delay.monomial", format_list(&model.to_monomial()));
            if let Some(r) = curves(run, "delay", &model, &train, &test, &config.epsilons)? {
                run.manifest
                    .set("delay.T_end_max", r.lengths.iter().max().unwrap());
            }
        }
        Err(e) => run.fail("delay.fit", &e),
    }
    Ok(())
}

/// One cell of the noise sweep: fit on `train` plus noise, predict from the
/// clean last training state and score against the clean `test` data.
pub fn noise_cell(
    train: &TimeSeries,
    test: &TimeSeries,
    amplitude: f64,
    seed: u64,
    scaling: NoiseScaling,
    order: usize,
    epsilons: &[f64],
) -> Result<PredictionReport> {
    let noisy = add_gaussian_noise(train, amplitude, seed, scaling)?;
    let model = fit(&noisy, order)?;
    prediction_curve(
        &model,
        train.values(),
        test.values(),
        epsilons,
        PredictionMode::EndOfSet,
    )
}

fn noise_sweep(config: &ExperimentConfig, run: &mut Run) -> Result<()> {
    let order = config.order.unwrap_or(2);
    run.manifest.set("order", order);
    run.manifest.set("levels", format_list(&config.levels));
    run.manifest.set(
        "seeds",
        config
            .seeds
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    run.manifest.set(
        "scaling",
        match config.scaling {
            NoiseScaling::Absolute => "absolute-table",
            NoiseScaling::RelativeToStd => "relative-to-std",
        },
    );
    let spec = MapSpec::quadratic(3.8, DEFAULT_X0);
    let (train, test) = match split(&spec, config.length(), config.continuation) {
        Ok(p) => p,
        Err(e) => {
            run.fail("data", &e);
            return Ok(());
        }
    };

    let mut cells = Vec::new();
    let mut medians = Vec::new();
    for &level in &config.levels {
        let amplitude = match config.scaling {
            NoiseScaling::Absolute => table_amplitude(level),
            NoiseScaling::RelativeToStd => level,
        };
        let mut per_seed: Vec<Vec<f64>> = Vec::new();
        for &seed in &config.seeds {
            let key = format!("level{level:?}.seed{seed}");
            let report = noise_cell(
                &train,
                &test,
                amplitude,
                seed,
                config.scaling,
                order,
                &config.epsilons,
            );
            match report {
                Ok(r) => {
                    for (&e, &t) in r.epsilons.iter().zip(&r.lengths) {
                        cells.push(vec![
                            format!("{level:?}"),
                            seed.to_string(),
                            format!("{e:?}"),
                            t.to_string(),
                        ]);
                    }
                    per_seed.push(r.lengths.iter().map(|&t| t as f64).collect());
                }
                Err(e) => run.fail(&key, &e),
            }
        }
        for (k, &e) in config.epsilons.iter().enumerate() {
            let column: Vec<f64> = per_seed.iter().map(|row| row[k]).collect();
            let m = median(&column)
                .map(|m| format!("{m:?}"))
                .unwrap_or_default();
            medians.push(vec![
                format!("{level:?}"),
                format!("{amplitude:?}"),
                format!("{e:?}"),
                column.len().to_string(),
                m,
            ]);
        }
    }
    run.csv(
        "noise_sweep_cells.csv",
        &["level", "seed", "epsilon", "T"],
        &cells,
    )?;
    run.csv(
        "noise_sweep.csv",
        &["level", "amplitude", "epsilon", "seeds", "T_median"],
        &medians,
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(id: ExperimentId, dir: &Path) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(id, dir);
        c.length = Some(3000);
        c.continuation = 200;
        c.epsilons = vec![0.01, 0.05, 0.1];
        c
    }

    #[test]
    fn ids_parse() {
        for id in [
            ExperimentId::Replicate1D,
            ExperimentId::Diagnose2D,
            ExperimentId::NoiseSweep,
        ] {
            assert_eq!(id.name().parse::<ExperimentId>().unwrap(), id);
        }
        assert!("fig1".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig::new(ExperimentId::NoiseSweep, "x");
        assert!(c.validate().is_ok());
        c.seeds = vec![1, 2];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new(ExperimentId::Replicate1D, "x");
        c.epsilons = vec![0.2, 0.1];
        assert!(c.validate().is_err());
    }

    #[test]
    fn replicate_writes_all_tables() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&small(ExperimentId::Replicate1D, dir.path())).unwrap();
        assert_eq!(out.failures, 0, "{}", out.manifest.render());
        for key in ["quadratic", "expquad"] {
            for f in [
                "predlen_end",
                "predlen_mean",
                "spectrum_actual",
                "spectrum_model",
                "residual_lag",
            ] {
                assert!(
                    dir.path().join(format!("{key}_{f}.csv")).exists(),
                    "{key}_{f}"
                );
            }
        }
        let manifest = std::fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
        assert!(manifest.starts_with("experiment=replicate-1d\n"));
    }

    #[test]
    fn diagnosis_records_paper_failure() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&small(ExperimentId::Diagnose2D, dir.path())).unwrap();
        assert_ne!(out.manifest.get("henon.paper_failure"), Some("none"));
        assert_eq!(out.manifest.get("henon.oracle_failure"), Some("none"));
        let csv = std::fs::read_to_string(dir.path().join("henon_diagnosis.csv")).unwrap();
        assert!(csv.starts_with("i,j,N_paper,N_oracle,status\n"));
    }

    #[test]
    fn failures_do_not_abort() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small(ExperimentId::Replicate1D, dir.path());
        // too few samples for an order-12 fit of either dataset
        c.length = Some(100);
        c.order = Some(12);
        let out = run_experiment(&c).unwrap();
        assert!(out.failures >= 2);
        assert!(out.manifest.get("quadratic.fit.error").is_some());
    }
}
