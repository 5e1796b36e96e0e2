//! Synthetic benchmark suites: accuracy and efficiency of CV-tuned solves on
//! the two-Gaussian data, swept over sample size (`table1`) or flip ratio
//! (`table2`).
//!
//! Repeat `s` uses seed `s` for data generation (see `gen_example`) and fold
//! shuffling.

use serde::{Deserialize, Serialize};

use crate::dataio::{apply_scaler, fit_scaler, signed_design, SignedDesign};
use crate::error::{Error, Result};
use crate::modelsel::{cross_validate, CvPlan, CvReport, Grid};
use crate::par::Execution;
use crate::report::{accuracy, MetricsReport};
use crate::solver::{predict, solve, SolverConfig, SolverResult};
use crate::synthgen::gen_example;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Table1,
    Table2,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "table1" => Ok(Suite::Table1),
            "table2" => Ok(Suite::Table2),
            other => Err(Error::InvalidConfig(format!("unknown suite {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Table1 => "table1",
            Suite::Table2 => "table2",
        }
    }

    /// Default sweep: `m ∈ {2000, …, 10000}` at `r = 0`, or
    /// `r ∈ {0, 0.05, …, 0.2}` at `m = 5000`.
    pub fn default_points(self) -> Vec<(usize, f64)> {
        match self {
            Suite::Table1 => (1..=5).map(|k| (2000 * k, 0.0)).collect(),
            Suite::Table2 => [0.0, 0.05, 0.1, 0.15, 0.2].iter().map(|&r| (5000, r)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub folds: usize,
    pub grid: Grid,
    pub base: SolverConfig,
    pub scale: bool,
    pub exec: Execution,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { folds: 10, grid: Grid::default(), base: SolverConfig::default(), scale: true, exec: Execution::default() }
    }
}

/// Everything produced by one seeded run.
#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub report: MetricsReport,
    pub cv: CvReport,
    pub result: SolverResult,
    /// The (scaled) training design the final model was fit on.
    pub train: SignedDesign,
    pub config: SolverConfig,
}

/// Generates `m` samples per class with seed `seed`, flips a fraction `r` of
/// labels per class in both splits, tunes `(C, σ)` by CV on the training
/// split and reports test metrics of the refit model.
pub fn run_case(m: usize, r: f64, seed: u64, opts: &BenchOptions) -> Result<CaseOutcome> {
    let (train, test) = gen_example(m, r, seed)?;

    let plan = CvPlan { k: opts.folds, seed, scale: opts.scale, exec: opts.exec };
    let cv = cross_validate(&train, &opts.grid, &plan, &opts.base)?;
    let best = cv.best();
    let config = opts.base.with_penalties(best.c, best.sigma);

    let (train, test) = if opts.scale {
        let s = fit_scaler(&train);
        (apply_scaler(&train, &s)?, apply_scaler(&test, &s)?)
    } else {
        (train, test)
    };
    let train = signed_design(&train);
    let result = solve(&train, &config)?;
    let acc = accuracy(&predict(&result.w, result.b, test.x())?, test.y());
    let report = MetricsReport::new(acc, &result, &config);
    Ok(CaseOutcome { report, cv, result, train, config })
}

/// One averaged suite row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub suite: Suite,
    pub m: usize,
    pub r: f64,
    pub repeats: usize,
    /// Mean test accuracy in percent.
    pub acc: f64,
    pub nsv: f64,
    pub sws_per_iter: f64,
    pub tni: f64,
    pub cpu_mean: f64,
    pub cpu_median: f64,
    pub converged: usize,
}

impl BenchRow {
    pub fn from_reports(suite: Suite, m: usize, r: f64, reports: &[MetricsReport]) -> Self {
        let k = reports.len().max(1) as f64;
        let mean = |f: &dyn Fn(&MetricsReport) -> f64| reports.iter().map(f).sum::<f64>() / k;
        let mut cpu: Vec<f64> = reports.iter().map(|r| r.cpu).collect();
        cpu.sort_by(f64::total_cmp);
        let cpu_median = match cpu.len() {
            0 => 0.0,
            n if n % 2 == 1 => cpu[n / 2],
            n => 0.5 * (cpu[n / 2 - 1] + cpu[n / 2]),
        };
        Self {
            suite,
            m,
            r,
            repeats: reports.len(),
            acc: 100.0 * mean(&|r| r.acc),
            nsv: mean(&|r| r.nsv as f64),
            sws_per_iter: mean(&|r| r.sws_per_iter),
            tni: mean(&|r| r.tni as f64),
            cpu_mean: mean(&|r| r.cpu),
            cpu_median,
            converged: reports.iter().filter(|r| r.converged).count(),
        }
    }
}

/// Runs every `(m, r)` point once per seed and averages the reports.
pub fn run_suite(suite: Suite, points: &[(usize, f64)], seeds: &[u64], opts: &BenchOptions) -> Result<Vec<BenchRow>> {
    points
        .iter()
        .map(|&(m, r)| {
            let reports = seeds
                .iter()
                .map(|&s| run_case(m, r, s, opts).map(|o| o.report))
                .collect::<Result<Vec<_>>>()?;
            Ok(BenchRow::from_reports(suite, m, r, &reports))
        })
        .collect()
}

pub fn rows_to_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn rows_from_csv(text: &str) -> Result<Vec<BenchRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| Error::Parse { line: 0, msg: e.to_string() }))
        .collect()
}

pub fn rows_to_json(rows: &[BenchRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

pub fn rows_from_json(text: &str) -> Result<Vec<BenchRow>> {
    serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
}
