//! The L0/1 soft-margin loss, its proximal operator, the P-stationarity
//! residuals and the starting-point rule.

use serde::{Deserialize, Serialize};

use crate::dataio::SignedDesign;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm};

/// Iterate `(w, b, u, lambda)` of the constrained problem
/// `min ½‖w‖² + C‖u₊‖₀  s.t.  u + Aw + by = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalDualPoint {
    pub w: Vec<f64>,
    pub b: f64,
    pub u: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl PrimalDualPoint {
    pub fn is_finite(&self) -> bool {
        self.b.is_finite()
            && self.w.iter().chain(&self.u).chain(&self.lambda).all(|v| v.is_finite())
    }
}

/// Step `gamma` and penalty `C` of the L0/1 proximal operator, with the
/// derived threshold `tau = sqrt(2 gamma C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxThreshold {
    gamma: f64,
    c: f64,
    tau: f64,
}

impl ProxThreshold {
    pub fn new(gamma: f64, c: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!("prox step must be positive, got {gamma}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidConfig(format!("C must be positive, got {c}")));
        }
        Ok(Self { gamma, c, tau: (2.0 * gamma * c).sqrt() })
    }

    /// Threshold used by the ADMM u-step, where `gamma = 1 / sigma`.
    pub fn for_penalty(c: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma must be positive, got {sigma}")));
        }
        let mut t = Self::new(1.0 / sigma, c)?;
        t.tau = (2.0 * c / sigma).sqrt();
        Ok(t)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Scalar prox: entries in `(0, tau]` collapse to zero, everything else
    /// passes through.
    #[inline]
    pub fn apply(&self, z: f64) -> f64 {
        if z > 0.0 && z <= self.tau {
            0.0
        } else {
            z
        }
    }
}

/// `‖u₊‖₀`: number of strictly positive entries.
pub fn l01_count(u: &[f64]) -> usize {
    u.iter().filter(|&&v| v > 0.0).count()
}

/// `½‖w‖² + C ‖(1 - Aw - by)₊‖₀`.
pub fn primal_objective(sd: &SignedDesign, w: &[f64], b: f64, c: f64) -> f64 {
    let aw = sd.a().mul_vec(w);
    objective_with_aw(sd, w, &aw, b, c)
}

pub(crate) fn objective_with_aw(sd: &SignedDesign, w: &[f64], aw: &[f64], b: f64, c: f64) -> f64 {
    let violated = aw
        .iter()
        .zip(sd.y())
        .filter(|&(&awi, &yi)| 1.0 - awi - b * yi > 0.0)
        .count();
    0.5 * dot(w, w) + c * violated as f64
}

/// Elementwise L0/1 proximal operator.
pub fn prox_l01(z: &[f64], t: &ProxThreshold) -> Vec<f64> {
    z.iter().map(|&v| t.apply(v)).collect()
}

/// The four scaled residuals of the P-stationarity system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarityResiduals {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
    pub max_theta: f64,
}

impl StationarityResiduals {
    pub fn new(theta1: f64, theta2: f64, theta3: f64, theta4: f64) -> Self {
        let max_theta = theta1.max(theta2).max(theta3).max(theta4);
        Self { theta1, theta2, theta3, theta4, max_theta }
    }
}

/// Residuals of point `p` against the P-stationarity conditions with
/// working set `t` (0-based indices) and prox step `1 / sigma`:
///
/// * θ1 = ‖w + A_Tᵀ λ_T‖ / (1 + ‖w‖)
/// * θ2 = |⟨y_T, λ_T⟩| / (1 + |T|)
/// * θ3 = ‖u − 1 + Aw + by‖ / √m
/// * θ4 = ‖u − prox(u − λ/σ)‖ / (1 + ‖u‖)
pub fn stationarity_residuals(
    sd: &SignedDesign,
    p: &PrimalDualPoint,
    t: &[usize],
    c: f64,
    sigma: f64,
) -> Result<StationarityResiduals> {
    let aw = sd.a().mul_vec(&p.w);
    residuals_with_aw(sd, p, &aw, t, &ProxThreshold::for_penalty(c, sigma)?, sigma)
}

pub(crate) fn residuals_with_aw(
    sd: &SignedDesign,
    p: &PrimalDualPoint,
    aw: &[f64],
    t: &[usize],
    prox: &ProxThreshold,
    sigma: f64,
) -> Result<StationarityResiduals> {
    let m = sd.sample_count();
    if p.w.len() != sd.feature_count() {
        return Err(Error::DimensionMismatch { expected: sd.feature_count(), found: p.w.len() });
    }
    if p.u.len() != m || p.lambda.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: p.u.len().min(p.lambda.len()) });
    }

    let mut grad = p.w.clone();
    let mut y_dot_lambda = 0.0;
    for &i in t {
        axpy(p.lambda[i], sd.a().row(i), &mut grad);
        y_dot_lambda += sd.y()[i] * p.lambda[i];
    }
    let theta1 = norm(&grad) / (1.0 + norm(&p.w));
    let theta2 = y_dot_lambda.abs() / (1.0 + t.len() as f64);

    let mut feas = 0.0;
    let mut fixed = 0.0;
    for (i, &awi) in aw.iter().enumerate() {
        let r = p.u[i] - 1.0 + awi + p.b * sd.y()[i];
        feas += r * r;
        let d = p.u[i] - prox.apply(p.u[i] - p.lambda[i] / sigma);
        fixed += d * d;
    }
    let theta3 = feas.sqrt() / (m as f64).sqrt();
    let theta4 = fixed.sqrt() / (1.0 + norm(&p.u));
    Ok(StationarityResiduals::new(theta1, theta2, theta3, theta4))
}

/// Starting point: `u = λ = 0`, and `w = 1/100, b = 0` when that already
/// satisfies `f(w; b) <= C min(m₊, m₋)`. Otherwise `w = 0` with the sign of
/// `b` that minimises `f(0; b)`, i.e. `b = +1` when `m₋ <= m₊`.
pub fn initial_point(sd: &SignedDesign, c: f64) -> PrimalDualPoint {
    let m = sd.sample_count();
    let n = sd.feature_count();
    let (pos, neg) = sd.class_counts();
    let bound = c * pos.min(neg) as f64;

    let w = vec![0.01; n];
    let (w, b) = if primal_objective(sd, &w, 0.0, c) <= bound {
        (w, 0.0)
    } else {
        (vec![0.0; n], if neg <= pos { 1.0 } else { -1.0 })
    };
    PrimalDualPoint { w, b, u: vec![0.0; m], lambda: vec![0.0; m] }
}
