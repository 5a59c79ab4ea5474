//! Exponential time differencing (ETD2RK) for the full system, used as an
//! independent oracle for the fixed-point solver.

use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::maps::{forcing, xt_norm, yt_norm};
use super::picard::check_data;
use super::state::BoussinesqState;
use crate::error::{Error, Result};
use crate::semigroup::{NormIndices, NormProfile, PhiWeights, Trajectory};
use crate::spectral::{Field, ScalarField, VectorField};

/// A run is aborted once the monitored norm exceeds this multiple of its start.
pub const BLOW_UP_FACTOR: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtdErrors {
    /// Richardson estimate of the error of the stored (fine) velocity in `X_T`.
    pub u_x: f64,
    /// Same for the temperature in `Y_T`.
    pub theta_y: f64,
    pub fine_steps: usize,
}

pub struct EtdRun {
    pub state: BoussinesqState,
    pub errors: EtdErrors,
}

struct Stepper<'a> {
    cfg: &'a SolverConfig,
    phi: PhiWeights,
    limit: f64,
}

struct Node {
    u: VectorField,
    theta: ScalarField,
    u_rate: VectorField,
    theta_rate: ScalarField,
    grad_pi: VectorField,
}

impl Stepper<'_> {
    fn monitor(&self, u: &VectorField, th: &ScalarField) -> f64 {
        u.hdot_norm(self.cfg.s0()) + th.hdot_norm(self.cfg.theta_data_index())
    }

    /// Runs `steps` ETD2RK steps and hands every `stride`-th state to `sink`.
    fn run(
        &self,
        u0: &VectorField,
        th0: &ScalarField,
        steps: usize,
        stride: usize,
        mut sink: impl FnMut(usize, Node) -> Result<()>,
    ) -> Result<()> {
        let h = self.phi.dt();
        let (p0, p1, p2) = (self.phi.phi0(), self.phi.phi1(), self.phi.phi2());
        let lam = self.phi.rate();
        let (mut u, mut th) = (u0.clone(), th0.clone());
        let mut f = forcing(&u, &th)?;
        for step in 0..=steps {
            if step % stride == 0 {
                let mut ur = f.velocity.clone();
                ur.axpy_symbol(|i| -lam[i], &u);
                let mut tr = f.theta.clone();
                tr.axpy_symbol(|i| -lam[i], &th);
                sink(
                    step / stride,
                    Node {
                        u: u.clone(),
                        theta: th.clone(),
                        u_rate: ur,
                        theta_rate: tr,
                        grad_pi: f.grad_pi.clone(),
                    },
                )?;
            }
            if step == steps {
                break;
            }
            let predict = |x: &VectorField, n: &VectorField| {
                let mut a = x.clone();
                a.apply_symbol(|i| p0[i]);
                a.axpy_symbol(|i| h * p1[i], n);
                a
            };
            let au = predict(&u, &f.velocity);
            let mut at = th.clone();
            at.apply_symbol(|i| p0[i]);
            at.axpy_symbol(|i| h * p1[i], &f.theta);
            let fa = forcing(&au, &at)?;
            let mut nu = au;
            nu.axpy_symbol(|i| h * p2[i], &fa.velocity);
            nu.axpy_symbol(|i| -h * p2[i], &f.velocity);
            let mut nt = at;
            nt.axpy_symbol(|i| h * p2[i], &fa.theta);
            nt.axpy_symbol(|i| -h * p2[i], &f.theta);
            let norm = self.monitor(&nu, &nt);
            if !(norm <= self.limit) {
                return Err(Error::BlowUp {
                    step: step + 1,
                    norm,
                    limit: self.limit,
                });
            }
            u = nu;
            th = nt;
            f = forcing(&u, &th)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct ProfileBuilder {
    sup: Vec<f64>,
    l2_sq: Vec<f64>,
    rate_sq: Vec<f64>,
}

impl ProfileBuilder {
    fn push<F: Field>(&mut self, value: &F, rate: &F, idx: NormIndices) {
        self.sup.push(value.hdot_norm(idx.sup));
        self.l2_sq.push(value.hdot_norm_sq(idx.l2));
        self.rate_sq.push(rate.hdot_norm_sq(idx.rate));
    }

    fn finish(self, dt: f64) -> NormProfile {
        NormProfile {
            dt,
            sup: self.sup,
            l2_sq: self.l2_sq,
            rate_sq: self.rate_sq,
        }
    }
}

/// Marches the system with ETD2RK at step `T/(2M)`, stores every second state,
/// and estimates the error of the stored trajectory by a second run at `T/M`:
/// for a second-order method the fine error is about `‖fine - coarse‖ / 3`.
pub fn etd_march(u0: &VectorField, theta0: &ScalarField, cfg: &SolverConfig) -> Result<EtdRun> {
    cfg.validate()?;
    check_data(u0, theta0, cfg)?;
    let time = cfg.time()?;
    let steps = time.steps;
    let grid = u0.grid().clone();
    let start = u0.hdot_norm(cfg.s0()) + theta0.hdot_norm(cfg.theta_data_index());
    let limit = BLOW_UP_FACTOR * start.max(f64::MIN_POSITIVE);
    let fine = Stepper {
        cfg,
        phi: PhiWeights::new(&grid, cfg.alpha, time.dt() / 2.0)?,
        limit,
    };
    let mut nodes: Vec<Node> = Vec::with_capacity(steps + 1);
    fine.run(u0, theta0, 2 * steps, 2, |_, node| {
        nodes.push(node);
        Ok(())
    })?;

    let coarse = Stepper {
        cfg,
        phi: PhiWeights::new(&grid, cfg.alpha, time.dt())?,
        limit,
    };
    let (xi, yi) = (cfg.x_indices(), cfg.y_indices());
    let mut du = ProfileBuilder::default();
    let mut dt = ProfileBuilder::default();
    coarse.run(u0, theta0, steps, 1, |m, node| {
        let f = &nodes[m];
        du.push(&node.u.difference(&f.u), &node.u_rate.difference(&f.u_rate), xi);
        dt.push(
            &node.theta.difference(&f.theta),
            &node.theta_rate.difference(&f.theta_rate),
            yi,
        );
        Ok(())
    })?;
    let errors = EtdErrors {
        u_x: du.finish(time.dt()).total() / 3.0,
        theta_y: dt.finish(time.dt()).total() / 3.0,
        fine_steps: 2 * steps,
    };

    let mut un = Vec::with_capacity(nodes.len());
    let mut ur = Vec::with_capacity(nodes.len());
    let mut tn = Vec::with_capacity(nodes.len());
    let mut tr = Vec::with_capacity(nodes.len());
    let mut gp = Vec::with_capacity(nodes.len());
    for n in nodes {
        un.push(n.u);
        ur.push(n.u_rate);
        tn.push(n.theta);
        tr.push(n.theta_rate);
        gp.push(n.grad_pi);
    }
    let state = BoussinesqState {
        u: Trajectory::new(time, un, xi)?.with_rates(ur)?,
        theta: Trajectory::new(time, tn, yi)?.with_rates(tr)?,
        grad_pi: Trajectory::new(time, gp, NormIndices::uniform(cfg.s0() - cfg.alpha))?,
    };
    Ok(EtdRun { state, errors })
}

/// Multiple of `max(picard_tol, Richardson estimate)` allowed between the two solvers.
pub const CROSS_CHECK_FACTOR: f64 = 10.0;

/// Distance between a fixed-point solution and an ETD run from the same data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub u_x: f64,
    pub theta_y: f64,
    /// `‖Δu‖_X + w‖Δθ‖_Y`.
    pub weighted: f64,
    /// `10 · max(picard_tol, e_u + w e_θ)` with the Richardson estimates `e`.
    pub tolerance: f64,
    pub within: bool,
}

pub fn cross_check(
    picard: &BoussinesqState,
    etd: &EtdRun,
    cfg: &SolverConfig,
    k1: f64,
) -> Result<CrossCheck> {
    let w = cfg.theta_weight(k1);
    let u_x = xt_norm(&picard.u.difference(&etd.state.u)?, cfg)?;
    let theta_y = yt_norm(&picard.theta.difference(&etd.state.theta)?, cfg)?;
    let weighted = u_x + w * theta_y;
    let richardson = etd.errors.u_x + w * etd.errors.theta_y;
    let tolerance = CROSS_CHECK_FACTOR * cfg.picard_tol.max(richardson);
    Ok(CrossCheck {
        u_x,
        theta_y,
        weighted,
        tolerance,
        within: weighted <= tolerance,
    })
}
