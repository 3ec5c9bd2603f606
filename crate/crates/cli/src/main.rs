use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mbrecon::analysis::{
    add_gaussian_noise, default_epsilons, lag_pairs, periodogram, prediction_curve, NoiseScaling,
    PredictionMode, PredictionReport,
};
use mbrecon::experiment::{run_experiment, ExperimentConfig, ExperimentId};
use mbrecon::generators::{
    generate_orbit, MapSpec, DEFAULT_BURN_IN, DEFAULT_HENON_START, DEFAULT_X0,
};
use mbrecon::io::{format_series, parse_grid, read_series, write_csv_to, CsvTable, LagPairs};
use mbrecon::mbr1d::{fit, ReconstructedMap1D};
use mbrecon::mbr2d::{diagnose2d_with, fit2d_corrected, EtaSubscript, ReconstructedMap2D};
use mbrecon::{Error, Result, Series};

/// Measure based reconstruction of chaotic maps from time series.
#[derive(Parser)]
#[command(name = "mbrecon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an orbit of a test map.
    Generate(GenerateArgs),
    /// Fit a reconstruction to a data file and write the model.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        steps: usize,
        /// Start value (first coordinate for planar models).
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<f64>,
        /// Second coordinate of the start for planar models.
        #[arg(long, allow_hyphen_values = true)]
        y0: Option<f64>,
        /// Start from the last sample of this data file instead.
        #[arg(long, conflicts_with_all = ["x0", "y0"])]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prediction length, periodogram and lag plots.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Add seeded Gaussian noise to a scalar data file.
    Noise {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        level: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Scaling::Relative)]
        scaling: Scaling,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the printed planar recursion with the Gram factorization.
    Diagnose2d {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Reading of the subscript of eta in the recursion (k, h or i).
        #[arg(long, default_value = "k")]
        eta: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the canned experiments.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MapName {
    Quadratic,
    Expquad,
    Henon,
    HenonDelay,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scaling {
    Relative,
    Absolute,
}

impl From<Scaling> for NoiseScaling {
    fn from(s: Scaling) -> Self {
        match s {
            Scaling::Relative => NoiseScaling::RelativeToStd,
            Scaling::Absolute => NoiseScaling::Absolute,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    End,
    Mean,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    map: MapName,
    #[arg(long, default_value_t = 3.8)]
    mu: f64,
    #[arg(long, default_value_t = 2.51705)]
    k: f64,
    #[arg(long, default_value_t = 1.4)]
    a: f64,
    #[arg(long, default_value_t = 0.3)]
    b: f64,
    /// Initial value; for the Hénon forms the first coordinate.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y0: Option<f64>,
    /// Number of samples written.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Prediction length T(epsilon) of a saved model.
    Predlen {
        #[arg(long)]
        model: PathBuf,
        /// Training data.
        #[arg(long)]
        input: PathBuf,
        /// Held-out continuation, needed in end mode.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::End)]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Periodogram of a scalar data file.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lag pairs of a scalar data file.
    Lag {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        lag: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// replicate-1d, diagnose-2d or noise-sweep.
    id: String,
    #[arg(long)]
    out: PathBuf,
    /// Training length.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    eps: Option<String>,
    /// Comma-separated noise levels.
    #[arg(long, value_delimiter = ',')]
    level: Option<Vec<f64>>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seed: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    scaling: Option<Scaling>,
    #[arg(long)]
    continuation: Option<usize>,
}

enum Model {
    Scalar(ReconstructedMap1D),
    Planar(ReconstructedMap2D),
}

fn read_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path)?;
    match text.split_whitespace().next() {
        Some("mbr1") => Ok(Model::Scalar(text.parse()?)),
        Some("mbr2") => Ok(Model::Planar(text.parse()?)),
        _ => Err(Error::ModelFormat(format!(
            "{} does not start with an mbr1 or mbr2 header",
            path.display()
        ))),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_table(out: Option<&Path>, table: &impl CsvTable) -> Result<()> {
    match out {
        Some(p) => mbrecon::io::write_table(p, table),
        None => write_csv_to(std::io::stdout().lock(), &table.header(), &table.rows()),
    }
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let x0 = args.x0.unwrap_or(match args.map {
        MapName::Quadratic | MapName::Expquad => DEFAULT_X0,
        _ => DEFAULT_HENON_START.0,
    });
    let pair = (x0, args.y0.unwrap_or(DEFAULT_HENON_START.1));
    if args.y0.is_some() && matches!(args.map, MapName::Quadratic | MapName::Expquad) {
        return Err(Error::InvalidParameter(
            "--y0 only applies to the Hénon maps".into(),
        ));
    }
    let spec = match args.map {
        MapName::Quadratic => MapSpec::quadratic(args.mu, x0),
        MapName::Expquad => MapSpec::exp_quadratic(args.mu, args.k, x0),
        MapName::Henon => MapSpec::henon_2d(args.a, args.b, pair),
        MapName::HenonDelay => MapSpec::henon_delay(args.a, args.b, pair),
    }
    .burn_in(args.burn);
    let series = generate_orbit(&spec, args.n)?;
    emit(args.out.as_deref(), &format_series(&series))
}

fn predict(
    model: &Path,
    steps: usize,
    x0: Option<f64>,
    y0: Option<f64>,
    input: Option<&Path>,
) -> Result<Series> {
    let last = match input {
        Some(p) => Some(read_series(p)?),
        None => None,
    };
    match read_model(model)? {
        Model::Scalar(m) => {
            let start = match (&last, x0) {
                (Some(s), _) => s.clone().into_scalar()?.last(),
                (None, Some(x)) => x,
                (None, None) => return Err(Error::InvalidParameter("give --x0 or --input".into())),
            };
            Ok(Series::Scalar(m.predict(start, steps)?))
        }
        Model::Planar(m) => {
            let start = match (&last, x0, y0) {
                (Some(s), _, _) => s.clone().into_planar()?.last(),
                (None, Some(x), Some(y)) => [x, y],
                _ => {
                    return Err(Error::InvalidParameter(
                        "give --x0 and --y0, or --input".into(),
                    ))
                }
            };
            Ok(Series::Planar(m.predict(start, steps)?))
        }
    }
}

fn predlen(
    model: &Path,
    input: &Path,
    truth: Option<&Path>,
    eps: Option<&str>,
    mode: Mode,
) -> Result<PredictionReport> {
    let eps = match eps {
        Some(g) => parse_grid(g)?,
        None => default_epsilons(),
    };
    let mode = match mode {
        Mode::End => PredictionMode::EndOfSet,
        Mode::Mean => PredictionMode::mean_over_set(),
    };
    let train = read_series(input)?;
    let truth = match truth {
        Some(p) => Some(read_series(p)?),
        None if mode == PredictionMode::EndOfSet => {
            return Err(Error::InvalidParameter("end mode needs --truth".into()))
        }
        None => None,
    };
    match read_model(model)? {
        Model::Scalar(m) => {
            let train = train.into_scalar()?;
            let truth = truth.map(Series::into_scalar).transpose()?;
            let t = truth.as_ref().map(|s| s.values()).unwrap_or(&[]);
            prediction_curve(&m, train.values(), t, &eps, mode)
        }
        Model::Planar(m) => {
            let train = train.into_planar()?;
            let truth = truth.map(Series::into_planar).transpose()?;
            let t = truth.as_ref().map(|s| s.values()).unwrap_or(&[]);
            prediction_curve(&m, train.values(), t, &eps, mode)
        }
    }
}

fn experiment(args: &ExperimentArgs) -> Result<()> {
    let id: ExperimentId = args.id.parse()?;
    let mut config = ExperimentConfig::new(id, &args.out);
    config.length = args.n;
    config.order = args.order;
    if let Some(g) = &args.eps {
        config.epsilons = parse_grid(g)?;
    }
    if let Some(l) = &args.level {
        config.levels = l.clone();
    }
    if let Some(s) = &args.seed {
        config.seeds = s.clone();
    }
    if let Some(s) = args.scaling {
        config.scaling = s.into();
    }
    if let Some(c) = args.continuation {
        config.continuation = c;
    }
    let outcome = run_experiment(&config)?;
    eprintln!(
        "{}: wrote {} files to {} ({} recorded failures)",
        id.name(),
        outcome.files.len(),
        args.out.display(),
        outcome.failures
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => generate(&args),
        Command::Fit { input, order, out } => {
            let text = match read_series(&input)? {
                Series::Scalar(s) => fit(&s, order)?.to_string(),
                Series::Planar(s) => fit2d_corrected(&s, order)?.to_string(),
            };
            emit(out.as_deref(), &text)
        }
        Command::Predict {
            model,
            steps,
            x0,
            y0,
            input,
            out,
        } => {
            let s = predict(&model, steps, x0, y0, input.as_deref())?;
            emit(out.as_deref(), &format_series(&s))
        }
        Command::Eval(EvalCommand::Predlen {
            model,
            input,
            truth,
            eps,
            mode,
            out,
        }) => {
            let r = predlen(&model, &input, truth.as_deref(), eps.as_deref(), mode)?;
            if !r.diverged_starts.is_empty() {
                eprintln!("{} predictions diverged", r.diverged_starts.len());
            }
            emit_table(out.as_deref(), &r)
        }
        Command::Eval(EvalCommand::Spectrum { input, out }) => {
            let s = periodogram(&read_series(&input)?.into_scalar()?)?;
            emit_table(out.as_deref(), &s)
        }
        Command::Eval(EvalCommand::Lag { input, lag, out }) => {
            let pairs = lag_pairs(&read_series(&input)?.into_scalar()?, lag)?;
            emit_table(out.as_deref(), &LagPairs(pairs))
        }
        Command::Noise {
            input,
            level,
            seed,
            scaling,
            out,
        } => {
            let s = read_series(&input)?.into_scalar()?;
            let noisy = add_gaussian_noise(&s, level, seed, scaling.into())?;
            emit(out.as_deref(), &format_series(&Series::Scalar(noisy)))
        }
        Command::Diagnose2d {
            input,
            order,
            eta,
            out,
        } => {
            let reading: EtaSubscript = eta.parse()?;
            let d = diagnose2d_with(&read_series(&input)?.into_planar()?, order, reading)?;
            if let Some((idx, e)) = &d.paper_failure {
                eprintln!("recursion stopped at {idx}: {e}");
            }
            emit_table(out.as_deref(), &d)
        }
        Command::Experiment(args) => experiment(&args),
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_usage() {
        2
    } else if e.is_numerical() {
        4
    } else {
        3
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
