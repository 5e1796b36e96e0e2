//! Working-set proximal ADMM for the L0/1 soft-margin SVM.
//!
//! Each iteration selects the working set `T = { i : z_i ∈ (0, √(2C/σ)] }`
//! with `z = 1 − Aw − by − λ/σ`, then updates `u`, `w`, `b` and `λ` in turn.
//! Samples outside `T` drop out of the `w` solve entirely, so its cost is
//! governed by `min(n, |T|)`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataio::SignedDesign;
use crate::error::{Error, Result};
use crate::l01::{
    initial_point, objective_with_aw, residuals_with_aw, PrimalDualPoint, ProxThreshold,
    StationarityResiduals,
};
use crate::linalg::{cholesky_solve, dot, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Loss penalty `C`.
    pub c: f64,
    /// Augmented-Lagrangian penalty `σ`.
    pub sigma: f64,
    /// Dual step size `η`.
    pub eta: f64,
    pub tol: f64,
    /// Iteration cap `K`.
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { c: 1.0, sigma: 0.5, eta: 1.618, tol: 1e-3, max_iter: 1000 }
    }
}

impl SolverConfig {
    pub fn with_penalties(self, c: f64, sigma: f64) -> Self {
        Self { c, sigma, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("C", self.c)?;
        positive("sigma", self.sigma)?;
        positive("eta", self.eta)?;
        positive("tol", self.tol)?;
        if self.tol >= 1.0 {
            return Err(Error::InvalidConfig(format!("tol must be below 1, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Sorted working-set indices (0-based) and the `z` that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkingSet {
    pub indices: Vec<usize>,
    pub z: Vec<f64>,
}

impl WorkingSet {
    /// `T = { i : 0 < z_i <= √(2C/σ) }`.
    pub fn from_z(z: Vec<f64>, c: f64, sigma: f64) -> Result<Self> {
        let prox = ProxThreshold::for_penalty(c, sigma)?;
        Ok(Self::from_z_with(z, &prox))
    }

    fn from_z_with(z: Vec<f64>, prox: &ProxThreshold) -> Self {
        let tau = prox.tau();
        let indices = z
            .iter()
            .enumerate()
            .filter(|&(_, &zi)| zi > 0.0 && zi <= tau)
            .map(|(i, _)| i)
            .collect();
        Self { indices, z }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub fn working_set(
    sd: &SignedDesign,
    w: &[f64],
    b: f64,
    lambda: &[f64],
    c: f64,
    sigma: f64,
) -> Result<WorkingSet> {
    check_len(w.len(), sd.feature_count())?;
    check_len(lambda.len(), sd.sample_count())?;
    let prox = ProxThreshold::for_penalty(c, sigma)?;
    let aw = sd.a().mul_vec(w);
    Ok(working_set_with_aw(sd, &aw, b, lambda, &prox, sigma))
}

fn working_set_with_aw(
    sd: &SignedDesign,
    aw: &[f64],
    b: f64,
    lambda: &[f64],
    prox: &ProxThreshold,
    sigma: f64,
) -> WorkingSet {
    let z = aw
        .iter()
        .zip(sd.y())
        .zip(lambda)
        .map(|((&awi, &yi), &li)| 1.0 - awi - b * yi - li / sigma)
        .collect();
    WorkingSet::from_z_with(z, prox)
}

/// `u_T = 0`, `u` equals `z` off the working set.
pub fn update_u(ws: &WorkingSet) -> Vec<f64> {
    let mut u = ws.z.clone();
    for &i in &ws.indices {
        u[i] = 0.0;
    }
    u
}

/// Which factorisation `update_w` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WPath {
    /// `n x n` system `(I + σ A_Tᵀ A_T) w = σ A_Tᵀ v_T`.
    Direct,
    /// `|T| x |T|` system through Sherman–Morrison–Woodbury.
    Woodbury,
}

impl WPath {
    pub fn select(n: usize, t: usize) -> Self {
        if n <= t {
            WPath::Direct
        } else {
            WPath::Woodbury
        }
    }
}

/// Solves `(I + σ A_Tᵀ A_T) w = σ A_Tᵀ v_T` for `w`.
pub fn update_w(
    sd: &SignedDesign,
    ws: &WorkingSet,
    u_next: &[f64],
    b: f64,
    lambda: &[f64],
    sigma: f64,
) -> Result<Vec<f64>> {
    let n = sd.feature_count();
    if ws.is_empty() {
        return Ok(vec![0.0; n]);
    }
    let y = sd.y();
    let v_t: Vec<f64> = ws
        .indices
        .iter()
        .map(|&i| -(u_next[i] + b * y[i] - 1.0 + lambda[i] / sigma))
        .collect();
    let a_t = sd.a().select_rows(&ws.indices);
    match WPath::select(n, ws.len()) {
        WPath::Direct => solve_w_direct(&a_t, &v_t, sigma),
        WPath::Woodbury => solve_w_woodbury(&a_t, &v_t, sigma),
    }
}

/// `w = (I + σ A_Tᵀ A_T)⁻¹ σ A_Tᵀ v_T` via an `n x n` Cholesky solve.
pub fn solve_w_direct(a_t: &Matrix, v_t: &[f64], sigma: f64) -> Result<Vec<f64>> {
    check_len(v_t.len(), a_t.rows())?;
    let n = a_t.cols();
    let mut gram = vec![0.0; n * n];
    for r in 0..a_t.rows() {
        let row = a_t.row(r);
        for j in 0..n {
            let s = sigma * row[j];
            if s == 0.0 {
                continue;
            }
            for k in 0..=j {
                gram[j * n + k] += s * row[k];
            }
        }
    }
    for j in 0..n {
        gram[j * n + j] += 1.0;
    }
    let mut rhs = a_t.tr_mul_vec(v_t);
    rhs.iter_mut().for_each(|v| *v *= sigma);
    cholesky_solve(&mut gram, n, &mut rhs)?;
    Ok(rhs)
}

/// `w = σ A_Tᵀ (I + σ A_T A_Tᵀ)⁻¹ v_T` via a `|T| x |T|` Cholesky solve.
pub fn solve_w_woodbury(a_t: &Matrix, v_t: &[f64], sigma: f64) -> Result<Vec<f64>> {
    check_len(v_t.len(), a_t.rows())?;
    let t = a_t.rows();
    let mut gram = vec![0.0; t * t];
    for i in 0..t {
        let ri = a_t.row(i);
        for j in 0..i {
            gram[i * t + j] = sigma * dot(ri, a_t.row(j));
        }
        gram[i * t + i] = 1.0 + sigma * dot(ri, ri);
    }
    let mut x = v_t.to_vec();
    cholesky_solve(&mut gram, t, &mut x)?;
    let mut w = a_t.tr_mul_vec(&x);
    w.iter_mut().for_each(|v| *v *= sigma);
    Ok(w)
}

/// `b = ⟨y, r⟩ / m` with `r = 1 − Aw − u − λ/σ`.
pub fn update_b(sd: &SignedDesign, w_next: &[f64], u_next: &[f64], lambda: &[f64], sigma: f64) -> f64 {
    let aw = sd.a().mul_vec(w_next);
    update_b_with_aw(sd, &aw, u_next, lambda, sigma)
}

fn update_b_with_aw(sd: &SignedDesign, aw: &[f64], u: &[f64], lambda: &[f64], sigma: f64) -> f64 {
    let y = sd.y();
    let mut acc = 0.0;
    for i in 0..y.len() {
        acc += y[i] * (1.0 - aw[i] - u[i] - lambda[i] / sigma);
    }
    acc / y.len() as f64
}

/// Constraint violation `ϖ = u − 1 + Aw + by`.
pub fn constraint_violation(sd: &SignedDesign, u: &[f64], w: &[f64], b: f64) -> Vec<f64> {
    let aw = sd.a().mul_vec(w);
    violation_with_aw(sd, u, &aw, b)
}

fn violation_with_aw(sd: &SignedDesign, u: &[f64], aw: &[f64], b: f64) -> Vec<f64> {
    u.iter()
        .zip(aw)
        .zip(sd.y())
        .map(|((&ui, &awi), &yi)| ui - 1.0 + awi + b * yi)
        .collect()
}

/// `λ_T += ησ ϖ_T`, and `λ` is reset to zero off the working set.
pub fn update_lambda(ws: &WorkingSet, violation: &[f64], lambda: &[f64], eta: f64, sigma: f64) -> Vec<f64> {
    let mut next = vec![0.0; lambda.len()];
    let step = eta * sigma;
    for &i in &ws.indices {
        next[i] = lambda[i] + step * violation[i];
    }
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub working_set_size: usize,
    pub max_theta: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    /// Total number of iterations.
    pub fn tni(&self) -> usize {
        self.records.len()
    }

    /// Mean working-set size per iteration; 0 when no iteration ran.
    pub fn sws_per_iter(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        let total: usize = self.records.iter().map(|r| r.working_set_size).sum();
        total as f64 / self.records.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub w: Vec<f64>,
    pub b: f64,
    pub u: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Final working set: the L0/1 support vectors.
    pub support_indices: Vec<usize>,
    pub residuals: StationarityResiduals,
    pub trace: IterationTrace,
    pub converged: bool,
    /// Seconds spent in the iteration loop.
    pub wall_time: f64,
}

impl SolverResult {
    pub fn nsv(&self) -> usize {
        self.support_indices.len()
    }

    pub fn point(&self) -> PrimalDualPoint {
        PrimalDualPoint { w: self.w.clone(), b: self.b, u: self.u.clone(), lambda: self.lambda.clone() }
    }
}

/// Runs the working-set ADMM from [`initial_point`] until
/// `max θ < tol` or `max_iter` iterations have run.
pub fn solve(sd: &SignedDesign, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let prox = ProxThreshold::for_penalty(cfg.c, cfg.sigma)?;
    let sigma = cfg.sigma;

    let start = Instant::now();
    let mut p = initial_point(sd, cfg.c);
    let mut aw = sd.a().mul_vec(&p.w);
    let mut support = Vec::new();
    let mut residuals = residuals_with_aw(sd, &p, &aw, &support, &prox, sigma)?;
    let mut trace = IterationTrace::default();
    let mut converged = false;

    for iteration in 1..=cfg.max_iter {
        let ws = working_set_with_aw(sd, &aw, p.b, &p.lambda, &prox, sigma);
        let u = update_u(&ws);
        let w = update_w(sd, &ws, &u, p.b, &p.lambda, sigma)?;
        sd.a().mul_vec_into(&w, &mut aw);
        let b = update_b_with_aw(sd, &aw, &u, &p.lambda, sigma);
        let violation = violation_with_aw(sd, &u, &aw, b);
        let lambda = update_lambda(&ws, &violation, &p.lambda, cfg.eta, sigma);

        p = PrimalDualPoint { w, b, u, lambda };
        if !p.is_finite() {
            return Err(Error::Divergence { iteration });
        }
        support = ws.indices;
        residuals = residuals_with_aw(sd, &p, &aw, &support, &prox, sigma)?;
        trace.records.push(IterationRecord {
            working_set_size: support.len(),
            max_theta: residuals.max_theta,
            objective: objective_with_aw(sd, &p.w, &aw, p.b, cfg.c),
        });
        if residuals.max_theta < cfg.tol {
            converged = true;
            break;
        }
    }

    let wall_time = start.elapsed().as_secs_f64();
    Ok(SolverResult {
        w: p.w,
        b: p.b,
        u: p.u,
        lambda: p.lambda,
        support_indices: support,
        residuals,
        trace,
        converged,
        wall_time,
    })
}

/// `+1` where `⟨w, x⟩ + b > 0`, `−1` otherwise (zero maps to `−1`).
pub fn predict(w: &[f64], b: f64, x: &Matrix) -> Result<Vec<f64>> {
    check_len(x.cols(), w.len())?;
    Ok((0..x.rows())
        .map(|i| if dot(x.row(i), w) + b > 0.0 { 1.0 } else { -1.0 })
        .collect())
}

/// Largest `|1 − y_i(⟨w, x_i⟩ + b)|` over the support set, i.e. the distance
/// of support vectors from their margin hyperplanes.
pub fn support_hyperplane_gap(sd: &SignedDesign, res: &SolverResult) -> f64 {
    res.support_indices
        .iter()
        .map(|&i| (1.0 - dot(sd.a().row(i), &res.w) - res.b * sd.y()[i]).abs())
        .fold(0.0, f64::max)
}

fn check_len(found: usize, expected: usize) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
