use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use l01svm::bench::{rows_to_csv, rows_to_json, run_suite, BenchOptions, Suite};
use l01svm::model::Model;
use l01svm::synthgen::gen_example;
use l01svm::{
    accuracy, apply_scaler, cross_validate, fit_scaler, parse_libsvm, signed_design, solve, write_libsvm, CvPlan,
    CvReport, Dataset, Grid, MetricsReport, SolverConfig,
};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("file not found: {0}")]
    NotFound(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Svm(#[from] l01svm::Error),
    #[error("solver stopped after {tni} iterations without meeting the tolerance (max theta {max_theta:e})")]
    NotConverged { tni: usize, max_theta: f64 },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::NotConverged { .. } | CliError::Svm(l01svm::Error::Divergence { .. }) => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "l01svm", version, about = "Linear SVM with the L0/1 soft-margin loss")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model on a LIBSVM file.
    Train {
        data: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Model file to write (default: <data>.model).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a model on a LIBSVM file.
    Predict {
        model: PathBuf,
        data: PathBuf,
        /// Per-sample predictions as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid-search C and sigma by k-fold cross validation.
    Cv {
        data: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the grid table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate two-Gaussian train/test files.
    Synth {
        kind: SynthKind,
        /// Samples per split.
        #[arg(long, default_value_t = 2000)]
        m: usize,
        /// Per-class flip ratio (example2 only).
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output prefix; writes <out>.train and <out>.test.
        #[arg(long, default_value = "synth")]
        out: PathBuf,
    },
    /// Run a synthetic benchmark suite and write <out>.csv and <out>.json.
    Bench {
        suite: SuiteArg,
        /// Sample sizes (table1 sweeps these; default 2000..10000).
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        /// Flip ratios (table2 sweeps these; default 0,0.05,...,0.2).
        #[arg(long, value_delimiter = ',')]
        r: Vec<f64>,
        /// First seed; repeat i uses seed + i.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        repeats: u64,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "bench")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long = "C", allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 1.618)]
    eta: f64,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = 1000)]
    max_iter: usize,
    /// Skip the [-1, 1] feature scaling.
    #[arg(long = "no-scale")]
    no_scale: bool,
}

impl SolverArgs {
    fn config(&self) -> CliResult<SolverConfig> {
        let d = SolverConfig::default();
        let cfg = SolverConfig {
            c: self.c.unwrap_or(d.c),
            sigma: self.sigma.unwrap_or(d.sigma),
            eta: self.eta,
            tol: self.tol,
            max_iter: self.max_iter,
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    /// The default grid, or a single row/column when `--C`/`--sigma` is fixed.
    fn grid(&self) -> Grid {
        let mut g = Grid::default();
        if let Some(c) = self.c {
            g.c_values = vec![c];
        }
        if let Some(s) = self.sigma {
            g.sigma_values = vec![s];
        }
        g
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    Example1,
    Example2,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Table1,
    Table2,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => CliError::NotFound(path.to_path_buf()),
        _ => CliError::Io { path: path.to_path_buf(), source: e },
    })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}

fn load(path: &Path) -> CliResult<Dataset> {
    Ok(parse_libsvm(&read(path)?, None)?)
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

fn train(data: &Path, args: &SolverArgs, out: Option<PathBuf>) -> CliResult<()> {
    let cfg = args.config()?;
    let raw = load(data)?;
    let scaler = (!args.no_scale).then(|| fit_scaler(&raw));
    let scaled = match &scaler {
        Some(s) => apply_scaler(&raw, s)?,
        None => raw.clone(),
    };
    let res = solve(&signed_design(&scaled), &cfg)?;
    let model = Model::from_result(&res, cfg, scaler);
    let acc = accuracy(&model.predict(&raw)?, raw.y());

    let out = out.unwrap_or_else(|| {
        let mut p = data.as_os_str().to_owned();
        p.push(".model");
        PathBuf::from(p)
    });
    write(&out, &model.to_text())?;
    print_json(&MetricsReport::new(acc, &res, &cfg));
    if !res.converged {
        return Err(CliError::NotConverged { tni: res.trace.tni(), max_theta: res.residuals.max_theta });
    }
    Ok(())
}

fn predict(model: &Path, data: &Path, out: Option<PathBuf>) -> CliResult<()> {
    let model = Model::from_text(&read(model)?)?;
    let d = load(data)?;
    let pred = model.predict(&d)?;
    let report = MetricsReport {
        acc: accuracy(&pred, d.y()),
        nsv: model.support.len(),
        sws_per_iter: model.sws_per_iter,
        tni: model.tni,
        cpu: 0.0,
        converged: model.converged,
        c: model.config.c,
        sigma: model.config.sigma,
        eta: model.config.eta,
        tol: model.config.tol,
        max_iter: model.config.max_iter,
    };
    if let Some(out) = out {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["index", "prediction", "label"]).map_err(csv_err)?;
        for (i, (p, y)) in pred.iter().zip(d.y()).enumerate() {
            w.write_record([i.to_string(), p.to_string(), y.to_string()]).map_err(csv_err)?;
        }
        write(&out, &finish_csv(w)?)?;
    }
    print_json(&report);
    Ok(())
}

fn cv_table(report: &CvReport) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["C", "sigma", "mean_accuracy", "failed_folds", "selected"]).map_err(csv_err)?;
    for (i, cell) in report.cells.iter().enumerate() {
        w.write_record([
            cell.c.to_string(),
            cell.sigma.to_string(),
            cell.mean_accuracy.to_string(),
            cell.failed_folds.to_string(),
            if i == report.selected { "*".into() } else { String::new() },
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Usage(format!("csv: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn cv(data: &Path, k: usize, seed: u64, args: &SolverArgs, out: Option<PathBuf>) -> CliResult<()> {
    let base = args.config()?;
    let d = load(data)?;
    let plan = CvPlan { scale: !args.no_scale, ..CvPlan::new(k, seed) };
    let report = cross_validate(&d, &args.grid(), &plan, &base)?;
    let table = cv_table(&report)?;
    match out {
        Some(out) => write(&out, &table)?,
        None => print!("{table}"),
    }
    let best = report.best();
    eprintln!("selected C={} sigma={} mean accuracy {:.4}", best.c, best.sigma, best.mean_accuracy);
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut p = prefix.as_os_str().to_owned();
    p.push(suffix);
    PathBuf::from(p)
}

fn synth(kind: SynthKind, m: usize, r: f64, seed: u64, out: &Path) -> CliResult<()> {
    let r = match kind {
        SynthKind::Example1 => 0.0,
        SynthKind::Example2 => r,
    };
    let (train, test) = gen_example(m, r, seed)?;
    write(&with_suffix(out, ".train"), &write_libsvm(&train))?;
    write(&with_suffix(out, ".test"), &write_libsvm(&test))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn bench(
    suite: SuiteArg,
    m: Vec<usize>,
    r: Vec<f64>,
    seed: u64,
    repeats: u64,
    k: usize,
    args: &SolverArgs,
    out: &Path,
) -> CliResult<()> {
    let suite = match suite {
        SuiteArg::Table1 => Suite::Table1,
        SuiteArg::Table2 => Suite::Table2,
    };
    let mut points = suite.default_points();
    match suite {
        Suite::Table1 if !m.is_empty() => points = m.iter().map(|&m| (m, 0.0)).collect(),
        Suite::Table2 if !r.is_empty() => {
            let m = m.first().copied().unwrap_or(points[0].0);
            points = r.iter().map(|&r| (m, r)).collect();
        }
        Suite::Table2 if !m.is_empty() => points.iter_mut().for_each(|p| p.0 = m[0]),
        _ => {}
    }
    if repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let opts = BenchOptions { folds: k, grid: args.grid(), base: args.config()?, scale: !args.no_scale, ..Default::default() };
    let seeds: Vec<u64> = (0..repeats).map(|i| seed + i).collect();
    let rows = run_suite(suite, &points, &seeds, &opts)?;
    write(&with_suffix(out, ".csv"), &rows_to_csv(&rows)?)?;
    write(&with_suffix(out, ".json"), &rows_to_json(&rows))?;
    print!("{}", rows_to_csv(&rows)?);
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Train { data, solver, out } => train(&data, &solver, out),
        Command::Predict { model, data, out } => predict(&model, &data, out),
        Command::Cv { data, k, seed, solver, out } => cv(&data, k, seed, &solver, out),
        Command::Synth { kind, m, r, seed, out } => synth(kind, m, r, seed, &out),
        Command::Bench { suite, m, r, seed, repeats, k, solver, out } => {
            bench(suite, m, r, seed, repeats, k, &solver, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
