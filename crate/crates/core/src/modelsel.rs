//! k-fold cross-validated grid search over `(C, σ)`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataio::{apply_scaler, fit_scaler, signed_design, Dataset, SignedDesign};
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::report::accuracy;
use crate::solver::{predict, solve, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub c_values: Vec<f64>,
    pub sigma_values: Vec<f64>,
}

impl Default for Grid {
    /// `C ∈ {2⁻⁷, …, 2⁷}`, `σ ∈ {a⁻⁷, …, a⁷}` with `a = √2`.
    fn default() -> Self {
        let exps = -7..=7;
        Self {
            c_values: exps.clone().map(|e| 2f64.powi(e)).collect(),
            // a^e = 2^(e/2); `powf` on the exact exponent avoids compounding √2.
            sigma_values: exps.map(|e| 2f64.powf(e as f64 / 2.0)).collect(),
        }
    }
}

impl Grid {
    pub fn single(c: f64, sigma: f64) -> Self {
        Self { c_values: vec![c], sigma_values: vec![sigma] }
    }

    /// All `(C, σ)` pairs, `C`-major.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.c_values
            .iter()
            .flat_map(|&c| self.sigma_values.iter().map(move |&s| (c, s)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.c_values.len() * self.sigma_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Shuffles `0..m` with a seeded `ChaCha8Rng` and cuts it into `k` contiguous
/// folds; the first `m mod k` folds hold one extra index.
pub fn k_fold_split(m: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 folds, got {k}")));
    }
    if m < k {
        return Err(Error::TooFewSamples { m, k });
    }
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (m / k, m % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(idx[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvCell {
    pub c: f64,
    pub sigma: f64,
    pub mean_accuracy: f64,
    /// Folds whose solve returned an error; they score 0.
    pub failed_folds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub cells: Vec<CvCell>,
    pub selected: usize,
    pub k: usize,
    pub seed: u64,
}

impl CvReport {
    pub fn best(&self) -> &CvCell {
        &self.cells[self.selected]
    }
}

/// Fold layout and execution of a CV sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvPlan {
    pub k: usize,
    pub seed: u64,
    pub scale: bool,
    pub exec: Execution,
}

impl CvPlan {
    pub fn new(k: usize, seed: u64) -> Self {
        Self { k, seed, scale: true, exec: Execution::default() }
    }

    pub fn sequential(self) -> Self {
        Self { exec: Execution::Sequential, ..self }
    }
}

struct Fold {
    train: SignedDesign,
    test: Dataset,
}

/// Evaluates every grid pair on every fold. Each fold's scaler is fit on
/// that fold's training part only (unless scaling is off). The winner has the
/// highest mean accuracy, ties going to smaller `C`, then smaller `σ`.
pub fn cross_validate(d: &Dataset, grid: &Grid, plan: &CvPlan, base: &SolverConfig) -> Result<CvReport> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty parameter grid".into()));
    }
    let CvPlan { k, seed, scale, exec } = *plan;
    let split = k_fold_split(d.sample_count(), k, seed)?;
    let folds: Vec<Fold> = (0..k)
        .map(|f| {
            let train_idx: Vec<usize> =
                split.iter().enumerate().filter(|&(g, _)| g != f).flat_map(|(_, s)| s.iter().copied()).collect();
            let train = d.subset(&train_idx);
            let test = d.subset(&split[f]);
            if !scale {
                return Ok(Fold { train: signed_design(&train), test });
            }
            let scaler = fit_scaler(&train);
            Ok(Fold { train: signed_design(&apply_scaler(&train, &scaler)?), test: apply_scaler(&test, &scaler)? })
        })
        .collect::<Result<_>>()?;

    let pairs = grid.pairs();
    let scores = map_indexed(pairs.len() * k, exec, |job| {
        let (c, sigma) = pairs[job / k];
        let fold = &folds[job % k];
        let cfg = base.with_penalties(c, sigma);
        solve(&fold.train, &cfg)
            .and_then(|res| predict(&res.w, res.b, fold.test.x()))
            .map(|pred| accuracy(&pred, fold.test.y()))
            .ok()
    });

    let cells: Vec<CvCell> = pairs
        .iter()
        .zip(scores.chunks(k))
        .map(|(&(c, sigma), s)| CvCell {
            c,
            sigma,
            mean_accuracy: s.iter().map(|a| a.unwrap_or(0.0)).sum::<f64>() / k as f64,
            failed_folds: s.iter().filter(|a| a.is_none()).count(),
        })
        .collect();

    let selected = (0..cells.len())
        .min_by(|&a, &b| {
            let (a, b) = (&cells[a], &cells[b]);
            b.mean_accuracy
                .total_cmp(&a.mean_accuracy)
                .then(a.c.total_cmp(&b.c))
                .then(a.sigma.total_cmp(&b.sigma))
        })
        .expect("grid is non-empty");

    Ok(CvReport { cells, selected, k, seed })
}
