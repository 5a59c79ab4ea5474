//! Difference estimates between two solutions from the same data.

use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::maps::{xt_norm, ScalarTrajectory, VelocityTrajectory};
use super::state::BoussinesqState;
use crate::error::{Error, Result};
use crate::semigroup::{NormProfile, Trajectory};
use crate::spectral::Field;

/// Relative mismatch of the initial nodes above which two states count as
/// coming from different data.
pub const SAME_DATA_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeParams {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// Constant of the interpolation term.
    pub c_interp: f64,
    /// `0 < ε < α`.
    pub epsilon: f64,
    /// Discretization error budget; the window differences are compared with `2·budget`.
    pub budget: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub times: Vec<f64>,
    /// `k₂‖u₂‖_{L²(0,t;Ḣ^{s₀+α})} + k₃‖θ₂‖_{L²(0,t)} + C‖u₁‖_X^{1-ε/α}‖u₁‖_{L²(0,t;Ḣ^{s₀+α})}^{ε/α}`.
    pub coefficient: Vec<f64>,
    /// `‖δu‖_{X_t}` and `‖δθ‖_{Y_t}` on `[0, t_m]`.
    pub delta_u: Vec<f64>,
    pub delta_theta: Vec<f64>,
    pub window_found: bool,
    pub t0: f64,
    pub window_index: usize,
    pub delta_u_window: f64,
    pub delta_theta_window: f64,
    pub budget: f64,
    pub within_budget: bool,
    /// `k₁T^{1/2}` (or `k₁`), the factor coupling `‖δθ‖_Y` into the velocity estimate.
    pub theta_coupling: f64,
    /// `‖u₂‖²_{L²(0,t/2)} / ‖u₂‖²_{L²(0,t)}` for `t = 2dt, 4dt, …`; tends to 1/2.
    pub halving: Vec<[f64; 2]>,
}

fn check_params(p: &ProbeParams, alpha: f64) -> Result<()> {
    for (name, v) in [("k1", p.k1), ("k2", p.k2), ("k3", p.k3), ("c_interp", p.c_interp), ("budget", p.budget)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::precondition(format!("{name} = {v} must be nonnegative")));
        }
    }
    if !(p.epsilon > 0.0 && p.epsilon < alpha) {
        return Err(Error::precondition(format!(
            "epsilon = {} must lie in (0, alpha = {alpha})",
            p.epsilon
        )));
    }
    Ok(())
}

fn relative_gap<F: Field>(a: &F, b: &F) -> f64 {
    let scale = a.max_abs_coeff().max(b.max_abs_coeff());
    if scale == 0.0 {
        0.0
    } else {
        a.difference(b).max_abs_coeff() / scale
    }
}

fn difference_profile<F: Field>(a: &Trajectory<F>, b: &Trajectory<F>) -> Result<NormProfile> {
    a.difference(b)?.profile()
}

fn running_l2_sq<F: Field>(traj: &Trajectory<F>, s: f64) -> Vec<f64> {
    let dt = traj.time().dt();
    let sq: Vec<f64> = traj.nodes().iter().map(|f| f.hdot_norm_sq(s)).collect();
    let mut acc = vec![0.0; sq.len()];
    for m in 1..sq.len() {
        acc[m] = acc[m - 1] + 0.5 * dt * (sq[m - 1] + sq[m]);
    }
    acc
}

/// Evaluates the Grönwall coefficient of the uniqueness argument along the
/// time grid, finds the largest initial window on which it stays at or below
/// 1/2, and measures the differences on that window.
pub fn uniqueness_probe(
    s1: &BoussinesqState,
    s2: &BoussinesqState,
    cfg: &SolverConfig,
    p: &ProbeParams,
) -> Result<ProbeReport> {
    check_params(p, cfg.alpha)?;
    let (u1, u2): (&VelocityTrajectory, &VelocityTrajectory) = (&s1.u, &s2.u);
    let (t1, t2): (&ScalarTrajectory, &ScalarTrajectory) = (&s1.theta, &s2.theta);
    if u1.time() != u2.time() || t1.time() != t2.time() || u1.time() != t1.time() {
        return Err(Error::TimeMismatch("the two states use different time grids".into()));
    }
    let gap = relative_gap(u1.first(), u2.first()).max(relative_gap(t1.first(), t2.first()));
    if gap > SAME_DATA_TOL {
        return Err(Error::precondition(format!(
            "states come from different data (relative gap {gap:e})"
        )));
    }
    let x = cfg.x_indices();
    let y = cfg.y_indices();
    let du = difference_profile(u1, u2)?;
    let dth = difference_profile(t1, t2)?;
    let u1_x = xt_norm(u1, cfg)?;
    let u1_l2 = running_l2_sq(u1, x.l2);
    let u2_l2 = running_l2_sq(u2, x.l2);
    let t2_l2 = running_l2_sq(t2, y.l2);
    let r = p.epsilon / cfg.alpha;
    let coefficient: Vec<f64> = (0..u1_l2.len())
        .map(|m| {
            p.k2 * u2_l2[m].sqrt()
                + p.k3 * t2_l2[m].sqrt()
                + p.c_interp * u1_x.powf(1.0 - r) * u1_l2[m].sqrt().powf(r)
        })
        .collect();
    let window_index = coefficient.iter().take_while(|&&c| c <= 0.5).count().saturating_sub(1);
    let window_found = window_index > 0;
    let delta_u: Vec<f64> = (0..coefficient.len()).map(|m| du.total_upto(m)).collect();
    let delta_theta: Vec<f64> = (0..coefficient.len()).map(|m| dth.total_upto(m)).collect();
    let (dw_u, dw_t) = (delta_u[window_index], delta_theta[window_index]);
    let mut halving = Vec::new();
    let mut m = 2;
    while m < u2_l2.len() {
        if u2_l2[m] > 0.0 {
            halving.push([u1.time().time(m), u2_l2[m / 2] / u2_l2[m]]);
        }
        m *= 2;
    }
    Ok(ProbeReport {
        times: u1.time().times(),
        coefficient,
        delta_u,
        delta_theta,
        window_found,
        t0: u1.time().time(window_index),
        window_index,
        delta_u_window: dw_u,
        delta_theta_window: dw_t,
        budget: p.budget,
        within_budget: window_found && dw_u <= 2.0 * p.budget && dw_t <= 2.0 * p.budget,
        theta_coupling: cfg.theta_weight(p.k1) / 2.0,
        halving,
    })
}
