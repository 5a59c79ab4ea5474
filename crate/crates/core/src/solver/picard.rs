//! Picard iteration on whole trajectories.

use serde::{Deserialize, Serialize};

use super::config::{Constants, SolverConfig};
use super::maps::{difference_norm, linear_march, mild_map, xt_norm, yt_norm};
use super::state::BoussinesqState;
use crate::error::{Error, Result};
use crate::spectral::{ensure_same, Field, ScalarField, VectorField, SOLENOIDAL_TOL};

/// Iterate distances beyond this multiple of `max(K₀, 1)` count as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;
/// Width of the band below zero in which `1 - 16K₀(k₂+k₃)` is treated as noise.
pub const DISCRIMINANT_NOISE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdStatus {
    Satisfied,
    Violated,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PicardOutcome {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalNorms {
    pub u_x: f64,
    pub theta_y: f64,
    /// `‖u‖_X + w‖θ‖_Y`.
    pub weighted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// `w` in `‖θ‖' = w‖θ‖_Y`.
    pub theta_weight: f64,
    /// `‖u₀‖_{Ḣ^{s₀}} + w‖θ₀‖`.
    pub data_norm: f64,
    pub data_budget: f64,
    /// `K₀ = ‖u_L‖_X + w‖θ_L‖_Y`.
    pub k0: f64,
    pub smallness_threshold: f64,
    pub threshold_status: ThresholdStatus,
    pub lambda1: Option<f64>,
    /// `(k₂+k₃)λ₁² - λ₁/2 + K₀`.
    pub lambda1_residual: Option<f64>,
    pub iterations: usize,
    pub distances: Vec<f64>,
    pub contraction_factors: Vec<f64>,
    pub outcome: PicardOutcome,
    pub converged: bool,
    pub final_norms: Option<FinalNorms>,
    /// `(‖u‖_X + w‖θ‖_Y) / (12 · data_norm)`.
    pub bound_check: Option<f64>,
    pub momentum_residual: Option<f64>,
    pub max_divergence_defect: Option<f64>,
}

/// Smaller root of `(k₂+k₃)λ² - λ/2 + K₀ = 0`, in the cancellation-free form
/// `4K₀ / (1 + √(1 - 16K₀(k₂+k₃)))`.
pub fn lambda1(k0: f64, k2: f64, k3: f64) -> (ThresholdStatus, Option<f64>) {
    let disc = 1.0 - 16.0 * k0 * (k2 + k3);
    if disc >= 0.0 {
        (ThresholdStatus::Satisfied, Some(4.0 * k0 / (1.0 + disc.sqrt())))
    } else if disc > -DISCRIMINANT_NOISE {
        (ThresholdStatus::Inconclusive, None)
    } else {
        (ThresholdStatus::Violated, None)
    }
}

pub struct PicardRun {
    pub report: FixedPointReport,
    /// Present only when the iteration converged.
    pub state: Option<BoussinesqState>,
}

pub(crate) fn check_data(u0: &VectorField, theta0: &ScalarField, cfg: &SolverConfig) -> Result<()> {
    ensure_same(&cfg.grid()?, u0.grid())?;
    ensure_same(u0.grid(), theta0.grid())?;
    if !(u0.is_real() && theta0.is_real()) {
        return Err(Error::NotReal);
    }
    if !u0.is_solenoidal() && u0.divergence_defect() > SOLENOIDAL_TOL {
        return Err(Error::precondition("initial velocity is not divergence-free"));
    }
    let scale = |f: f64| 1e-14 * f.max(f64::MIN_POSITIVE);
    for c in 0..u0.channel_count() {
        if u0.channel(c)[0].norm() > scale(u0.max_abs_coeff()) {
            return Err(Error::precondition("initial velocity must be mean-free"));
        }
    }
    if theta0.mean().norm() > scale(theta0.max_abs_coeff()) {
        return Err(Error::precondition("initial temperature must be mean-free"));
    }
    Ok(())
}

/// Iterates `u ← u_L + L(θ) + Φ(u,u)`, `θ ← θ_L + Ψ(u,θ)` from `(u_L, θ_L)`
/// until the weighted distance `‖Δu‖_X + w‖Δθ‖_Y` drops below `picard_tol`.
///
/// Non-convergence is a reported outcome, not an error.
pub fn picard_solve(
    u0: &VectorField,
    theta0: &ScalarField,
    cfg: &SolverConfig,
    k: &Constants,
) -> Result<PicardRun> {
    cfg.validate()?;
    k.validate()?;
    check_data(u0, theta0, cfg)?;
    let w = cfg.theta_weight(k.k1);
    let zero_u = u0.zeros_like();
    let zero_t = theta0.zeros_like();
    let (ul, tl) = linear_march(u0, theta0, cfg, |_| Ok((zero_u.clone(), zero_t.clone())))?;
    let k0 = xt_norm(&ul, cfg)? + w * yt_norm(&tl, cfg)?;
    let (status, lam) = lambda1(k0, k.k2, k.k3);
    let data_norm = u0.hdot_norm(cfg.s0()) + w * theta0.hdot_norm(cfg.theta_data_index());
    let cap = DIVERGENCE_FACTOR * k0.max(1.0);

    let (mut u, mut th) = (ul, tl);
    let mut distances = Vec::new();
    let mut factors = Vec::new();
    let mut outcome = PicardOutcome::MaxIterations;
    for _ in 0..cfg.picard_max_iters {
        let (un, tn) = mild_map(&u, &th, cfg)?;
        let d = difference_norm(&un, &u)? + w * difference_norm(&tn, &th)?;
        u = un;
        th = tn;
        if !d.is_finite() || d > cap {
            outcome = PicardOutcome::Diverged;
            break;
        }
        if let Some(&prev) = distances.last() {
            if prev > 0.0 {
                factors.push(d / prev);
            }
        }
        distances.push(d);
        if d < cfg.picard_tol {
            outcome = PicardOutcome::Converged;
            break;
        }
    }
    let converged = outcome == PicardOutcome::Converged;
    let final_norms = match (xt_norm(&u, cfg), yt_norm(&th, cfg)) {
        (Ok(a), Ok(b)) if a.is_finite() && b.is_finite() => Some(FinalNorms {
            u_x: a,
            theta_y: b,
            weighted: a + w * b,
        }),
        _ => None,
    };
    let bound_check = final_norms.map(|f| {
        if data_norm == 0.0 {
            0.0
        } else {
            f.weighted / (12.0 * data_norm)
        }
    });
    let mut report = FixedPointReport {
        k1: k.k1,
        k2: k.k2,
        k3: k.k3,
        theta_weight: w,
        data_norm,
        data_budget: k.data_budget(),
        k0,
        smallness_threshold: k.smallness_threshold(),
        threshold_status: status,
        lambda1: lam,
        lambda1_residual: lam.map(|l| (k.k2 + k.k3) * l * l - l / 2.0 + k0),
        iterations: distances.len() + usize::from(outcome == PicardOutcome::Diverged),
        distances,
        contraction_factors: factors,
        outcome,
        converged,
        final_norms,
        bound_check,
        momentum_residual: None,
        max_divergence_defect: None,
    };
    let state = if converged {
        let state = BoussinesqState::new(u, th, cfg)?;
        report.momentum_residual = Some(state.momentum_residual(cfg)?);
        report.max_divergence_defect = Some(state.divergence_defect());
        Some(state)
    } else {
        None
    };
    Ok(PicardRun { report, state })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda1_solves_its_quadratic() {
        let (k0, k2, k3) = (0.01, 0.7, 0.4);
        let (status, l) = lambda1(k0, k2, k3);
        assert_eq!(status, ThresholdStatus::Satisfied);
        let l = l.unwrap();
        assert!(((k2 + k3) * l * l - l / 2.0 + k0).abs() < 1e-15);
        assert!(l <= 4.0 * k0);
        let naive = (1.0 - (1.0 - 16.0 * k0 * (k2 + k3)).sqrt()) / (4.0 * (k2 + k3));
        assert!((l - naive).abs() < 1e-14);
    }

    #[test]
    fn threshold_classification() {
        let k = 1.0 / 16.0;
        assert_eq!(lambda1(1.0, k, 0.0).0, ThresholdStatus::Satisfied);
        assert_eq!(lambda1(1.0 + 1e-12, k, 0.0).0, ThresholdStatus::Inconclusive);
        assert_eq!(lambda1(2.0, k, 0.0), (ThresholdStatus::Violated, None));
    }
}
