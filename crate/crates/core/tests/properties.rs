use mbrecon::analysis::{periodogram, prediction_length, residuals};
use mbrecon::experiment::{run_experiment, ExperimentConfig, ExperimentId};
use mbrecon::generators::{generate_series, MapSpec, DEFAULT_X0};
use mbrecon::io::{format_series, parse_series};
use mbrecon::mbr1d::{fit, ReconstructedMap1D};
use mbrecon::{Series, TimeSeries};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
}

proptest! {
    #[test]
    fn parseval(y in prop::collection::vec(-10.0f64..10.0, 2..300)) {
        let n = y.len();
        let spec = periodogram(&TimeSeries::new(y.clone()).unwrap()).unwrap();
        let ord = spec.ordinates();
        let nyquist = if n % 2 == 0 { ord[ord.len() - 1] } else { 0.0 };
        let all = 2.0 * ord.iter().sum::<f64>() - nyquist;
        let mean = y.iter().sum::<f64>() / n as f64;
        let energy = n as f64 * y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
        prop_assert!((all - energy).abs() <= 1e-6 * energy.max(1e-300));
    }

    #[test]
    fn prediction_length_is_monotone(
        pairs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..60),
        mut eps in prop::collection::vec(1e-4f64..2.0, 1..20),
    ) {
        eps.sort_by(f64::total_cmp);
        let (p, t): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let (p, t) = (TimeSeries::new(p).unwrap(), TimeSeries::new(t).unwrap());
        let lengths: Vec<usize> = eps.iter().map(|&e| prediction_length(&p, &t, e)).collect();
        prop_assert!(lengths.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn residuals_reconstruct_truth(pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..60)) {
        let (p, t): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let pred = TimeSeries::new(p.clone()).unwrap();
        let r = residuals(&pred, &TimeSeries::new(t.clone()).unwrap()).unwrap();
        for ((ri, pi), ti) in r.values().iter().zip(&p).zip(&t) {
            // one rounding in the difference and one in the sum
            let scale = pi.abs().max(ti.abs());
            prop_assert!((ri + pi - ti).abs() <= 2.0 * f64::EPSILON * scale);
        }
    }

    #[test]
    fn series_text_round_trip(xs in prop::collection::vec(finite(), 1..50)) {
        let s = Series::Scalar(TimeSeries::new(xs).unwrap());
        prop_assert_eq!(parse_series(&format_series(&s)).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn model_text_round_trip(mu in 3.6f64..4.0, n in 1usize..6) {
        let s = generate_series(&MapSpec::quadratic(mu, DEFAULT_X0), 2000).unwrap();
        let model = fit(&s, n).unwrap();
        let back: ReconstructedMap1D = model.to_string().parse().unwrap();
        prop_assert_eq!(back.coefficients(), model.coefficients());
        for x in [0.0, 0.3, 0.77, 1.0] {
            prop_assert_eq!(back.eval(x), model.eval(x));
        }
    }
}

#[test]
fn refit_after_file_round_trip_is_identical() {
    let s = generate_series(&MapSpec::quadratic(3.8, DEFAULT_X0), 30_000).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.dat");
    mbrecon::io::write_series(&Series::Scalar(s.clone()), &path).unwrap();
    let back = mbrecon::io::read_series(&path)
        .unwrap()
        .into_scalar()
        .unwrap();
    for n in [2, 5] {
        assert_eq!(
            fit(&back, n).unwrap().coefficients(),
            fit(&s, n).unwrap().coefficients()
        );
    }
}

fn outputs(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn experiments_are_byte_identical() {
    for id in [
        ExperimentId::Replicate1D,
        ExperimentId::Diagnose2D,
        ExperimentId::NoiseSweep,
    ] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        for dir in [&a, &b] {
            let mut c = ExperimentConfig::new(id, dir.path());
            c.length = Some(5000);
            c.continuation = 300;
            run_experiment(&c).unwrap();
        }
        let (fa, fb) = (outputs(a.path()), outputs(b.path()));
        assert!(fa.len() >= 3);
        assert_eq!(fa, fb, "{}", id.name());
    }
}

#[test]
fn noise_sweep_shortens_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::new(ExperimentId::NoiseSweep, dir.path());
    c.levels = vec![0.01, 0.5];
    c.epsilons = vec![0.05];
    let out = run_experiment(&c).unwrap();
    assert_eq!(out.failures, 0);
    let text = std::fs::read_to_string(dir.path().join("noise_sweep.csv")).unwrap();
    let medians: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(medians.len(), 2);
    assert!(medians[1] < medians[0], "{text}");
}
