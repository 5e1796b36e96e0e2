//! Evaluation metrics: ACC, NSV, SWS/ITER, TNI and CPU.

use serde::{Deserialize, Serialize};

use crate::solver::{SolverConfig, SolverResult};

/// `1 − (1 / 2m_t) Σ |ŷ_j − y_j|` for `±1` predictions and labels.
pub fn accuracy(predicted: &[f64], truth: &[f64]) -> f64 {
    assert_eq!(predicted.len(), truth.len(), "prediction/label length mismatch");
    if truth.is_empty() {
        return 0.0;
    }
    let miss: f64 = predicted.iter().zip(truth).map(|(p, y)| (p - y).abs()).sum();
    1.0 - miss / (2.0 * truth.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Accuracy as a fraction in `[0, 1]`.
    pub acc: f64,
    pub nsv: usize,
    pub sws_per_iter: f64,
    pub tni: usize,
    /// Seconds spent in the solver loop.
    pub cpu: f64,
    pub converged: bool,
    pub c: f64,
    pub sigma: f64,
    pub eta: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl MetricsReport {
    pub fn new(acc: f64, res: &SolverResult, cfg: &SolverConfig) -> Self {
        Self {
            acc,
            nsv: res.nsv(),
            sws_per_iter: res.trace.sws_per_iter(),
            tni: res.trace.tni(),
            cpu: res.wall_time,
            converged: res.converged,
            c: cfg.c,
            sigma: cfg.sigma,
            eta: cfg.eta,
            tol: cfg.tol,
            max_iter: cfg.max_iter,
        }
    }
}
