//! The scaling `u_λ(x,t) = λ^{2α-1} u(λx, λ^{2α}t)`, `θ_λ = λ^{4α-1} θ(λx, λ^{2α}t)`
//! applied to discrete states.
//!
//! On the torus the map is exact: a trajectory on `[0,L)ⁿ` keeps its
//! coefficient arrays, the box shrinks to `L/λ`, time shrinks by `λ^{-2α}`,
//! and amplitudes pick up the powers above. Every `dt·|ξ|^{2α}` is unchanged,
//! so the discrete mild map commutes with the scaling.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::config::{Mode, SolverConfig};
use super::maps::mild_map;
use super::state::BoussinesqState;
use crate::error::{Error, Result};
use crate::semigroup::{NormIndices, TimeGrid, Trajectory};
use crate::spectral::{make_grid, Field, ScalarField, SpectralGrid, VectorField};

/// Offset from `s₀` of the non-critical index reported alongside the critical ones.
pub const NONCRITICAL_OFFSET: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub lambda: u32,
    pub alpha: f64,
    pub s0: f64,
    pub scaled_length: f64,
    pub scaled_horizon: f64,
    /// `‖u₀‖_{Ḣ^{s₀}}` before and after.
    pub u0_critical: [f64; 2],
    /// `‖θ₀‖_{Ḣ^{s₀-2α}}` before and after.
    pub theta0_critical: [f64; 2],
    /// `‖u₀‖_{Ḣ^{s₀+1/2}}` after over before.
    pub u0_noncritical_ratio: f64,
    /// `λ^{1/2}`.
    pub noncritical_expected: f64,
    /// `‖u - Mu‖_X + ‖θ - Mθ‖_Y` with the scaling-invariant `Y` indices,
    /// where `M` is one application of the mild map.
    pub residual: f64,
    pub scaled_residual: f64,
    /// `scaled_residual / residual`, 1 when both vanish.
    pub residual_ratio: f64,
}

fn regrid_scalar(f: &ScalarField, grid: &Arc<SpectralGrid>, a: f64) -> Result<ScalarField> {
    let coeffs = f.coeffs().iter().map(|c| c * a).collect();
    ScalarField::from_coeffs(grid, coeffs, f.is_real())
}

fn regrid_vector(u: &VectorField, grid: &Arc<SpectralGrid>, a: f64) -> Result<VectorField> {
    let comps = u
        .components()
        .iter()
        .map(|c| regrid_scalar(c, grid, a))
        .collect::<Result<Vec<_>>>()?;
    let mut v = VectorField::new(comps)?;
    v.set_solenoidal(u.is_solenoidal());
    Ok(v)
}

fn regrid_trajectory<F: Field>(
    traj: &Trajectory<F>,
    time: TimeGrid,
    amplitude: f64,
    rate_factor: f64,
    move_field: impl Fn(&F, f64) -> Result<F>,
) -> Result<Trajectory<F>> {
    let nodes = traj
        .nodes()
        .iter()
        .map(|f| move_field(f, amplitude))
        .collect::<Result<Vec<_>>>()?;
    let out = Trajectory::new(time, nodes, traj.indices())?;
    match traj.rates() {
        Some(r) => out.with_rates(
            r.iter()
                .map(|f| move_field(f, amplitude * rate_factor))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => Ok(out),
    }
}

fn check_lambda(lambda: u32) -> Result<()> {
    if lambda == 0 || !lambda.is_power_of_two() {
        return Err(Error::precondition(format!(
            "scaling factor {lambda} must be a positive power of two"
        )));
    }
    Ok(())
}

/// The rescaled state and the configuration it lives on.
pub fn rescale(
    state: &BoussinesqState,
    lambda: u32,
    cfg: &SolverConfig,
) -> Result<(BoussinesqState, SolverConfig)> {
    check_lambda(lambda)?;
    let l = f64::from(lambda);
    let a = cfg.alpha;
    let time_factor = l.powf(2.0 * a);
    let scfg = SolverConfig {
        length: cfg.length / l,
        horizon: cfg.horizon / time_factor,
        ..cfg.clone()
    };
    let grid = make_grid(cfg.n, cfg.modes, scfg.length)?;
    let time = scfg.time()?;
    let (gu, gt) = (l.powf(2.0 * a - 1.0), l.powf(4.0 * a - 1.0));
    let mv = |u: &VectorField, c: f64| regrid_vector(u, &grid, c);
    let ms = |f: &ScalarField, c: f64| regrid_scalar(f, &grid, c);
    let state = BoussinesqState {
        u: regrid_trajectory(&state.u, time, gu, time_factor, mv)?,
        theta: regrid_trajectory(&state.theta, time, gt, time_factor, ms)?,
        grad_pi: regrid_trajectory(&state.grad_pi, time, gt, time_factor, mv)?,
    };
    Ok((state, scfg))
}

/// Scaling-invariant `Y` indices `(s₀-2α, s₀-α, s₀-3α)`.
fn critical_y(cfg: &SolverConfig) -> NormIndices {
    SolverConfig {
        mode: Mode::GlobalScaling,
        ..cfg.clone()
    }
    .y_indices()
}

fn residual(state: &BoussinesqState, cfg: &SolverConfig) -> Result<f64> {
    let (mu, mt) = mild_map(&state.u, &state.theta, cfg)?;
    let (x, y) = (cfg.x_indices(), critical_y(cfg));
    let du = state.u.clone().with_indices(x).difference(&mu.with_indices(x))?;
    let dt = state.theta.clone().with_indices(y).difference(&mt.with_indices(y))?;
    Ok(du.space_time_norm()? + dt.space_time_norm()?)
}

/// Rescales `state` by `λ` and compares critical norms and mild-map residuals.
pub fn scaling_check(state: &BoussinesqState, lambda: u32, cfg: &SolverConfig) -> Result<ScalingReport> {
    let (scaled, scfg) = rescale(state, lambda, cfg)?;
    let s0 = cfg.s0();
    let ts = critical_y(cfg).sup;
    let (u0, v0) = (state.u.first(), scaled.u.first());
    let (t0, w0) = (state.theta.first(), scaled.theta.first());
    let r = residual(state, cfg)?;
    let rs = residual(&scaled, &scfg)?;
    let residual_ratio = if r > 0.0 {
        rs / r
    } else if rs == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    let sn = s0 + NONCRITICAL_OFFSET;
    Ok(ScalingReport {
        lambda,
        alpha: cfg.alpha,
        s0,
        scaled_length: scfg.length,
        scaled_horizon: scfg.horizon,
        u0_critical: [u0.hdot_norm(s0), v0.hdot_norm(s0)],
        theta0_critical: [t0.hdot_norm(ts), w0.hdot_norm(ts)],
        u0_noncritical_ratio: v0.hdot_norm(sn) / u0.hdot_norm(sn),
        noncritical_expected: f64::from(lambda).powf(NONCRITICAL_OFFSET),
        residual: r,
        scaled_residual: rs,
        residual_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rustfft::num_complex::Complex64;
    use std::f64::consts::PI;

    fn cfg() -> SolverConfig {
        SolverConfig {
            n: 3,
            alpha: 0.8,
            horizon: 1.0,
            modes: 8,
            length: 2.0 * PI,
            time_steps: 4,
            picard_tol: 1e-10,
            picard_max_iters: 5,
            mode: Mode::FiniteHorizon,
        }
    }

    fn single_mode_state(c: &SolverConfig) -> BoussinesqState {
        let g = c.grid().unwrap();
        let a = ScalarField::real_mode(&g, &[0, 1, 0], Complex64::new(0.3, 0.1)).unwrap();
        let u = VectorField::along_axis(&a, 0).assume_solenoidal().unwrap();
        let th = ScalarField::real_mode(&g, &[1, 1, 0], Complex64::new(0.0, 0.2)).unwrap();
        let time = c.time().unwrap();
        let ut = Trajectory::constant(time, &u, c.x_indices());
        let tt = Trajectory::constant(time, &th, c.y_indices());
        BoussinesqState::new(ut, tt, c).unwrap()
    }

    #[test]
    fn critical_norms_are_invariant_for_a_single_mode() {
        let c = cfg();
        let st = single_mode_state(&c);
        for lambda in [1, 2, 4] {
            let r = scaling_check(&st, lambda, &c).unwrap();
            assert!((r.u0_critical[1] / r.u0_critical[0] - 1.0).abs() < 1e-13);
            assert!((r.theta0_critical[1] / r.theta0_critical[0] - 1.0).abs() < 1e-13);
            // |ξ|^{s₀+1/2} picks up λ^{1/2} on top of the critical balance
            let expect = f64::from(lambda).sqrt();
            assert!((r.u0_noncritical_ratio - expect).abs() < 1e-13 * expect);
            assert!((r.residual_ratio - 1.0).abs() < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn identity_for_lambda_one() {
        let c = cfg();
        let st = single_mode_state(&c);
        let (s, sc) = rescale(&st, 1, &c).unwrap();
        assert_eq!(sc, c);
        let d = s.u.difference(&st.u).unwrap();
        assert_eq!(d.sup_norm(0.0), 0.0);
    }

    #[test]
    fn rejects_non_powers_of_two() {
        let c = cfg();
        let st = single_mode_state(&c);
        assert!(scaling_check(&st, 3, &c).is_err());
        assert!(scaling_check(&st, 0, &c).is_err());
    }
}
