use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::maps::{buoyancy, ScalarTrajectory, VelocityTrajectory};
use crate::error::{Error, Result};
use crate::semigroup::{NormIndices, Trajectory};
use crate::spectral::{advect_vec, gradient_part, Field, ScalarField, VectorField};

/// Velocity, temperature and the recovered pressure gradient on one time grid.
#[derive(Clone, Debug)]
pub struct BoussinesqState {
    pub u: VelocityTrajectory,
    pub theta: ScalarTrajectory,
    pub grad_pi: VelocityTrajectory,
}

/// `∇π = Q(θ e_n - u·∇u)` at every node.
pub fn recover_pressure(
    u: &VelocityTrajectory,
    theta: &ScalarTrajectory,
    cfg: &SolverConfig,
) -> Result<VelocityTrajectory> {
    if u.time() != theta.time() {
        return Err(Error::TimeMismatch("velocity and temperature time grids differ".into()));
    }
    let nodes = u
        .nodes()
        .iter()
        .zip(theta.nodes())
        .map(|(v, th)| {
            let mut g = buoyancy(th);
            g.axpy(-1.0, &advect_vec(v, v)?);
            Ok(gradient_part(&g))
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(u.time(), nodes, NormIndices::uniform(cfg.s0() - cfg.alpha))
}

impl BoussinesqState {
    pub fn new(u: VelocityTrajectory, theta: ScalarTrajectory, cfg: &SolverConfig) -> Result<Self> {
        let grad_pi = recover_pressure(&u, &theta, cfg)?;
        Ok(BoussinesqState { u, theta, grad_pi })
    }

    /// `‖∂_t u + (-Δ)^α u + u·∇u + ∇π - θ e_n‖_{Ḣ^{s₀-α}}` at every node.
    pub fn momentum_residuals(&self, cfg: &SolverConfig) -> Result<Vec<f64>> {
        let rates = self
            .u
            .rates()
            .ok_or_else(|| Error::precondition("velocity trajectory carries no time derivative"))?;
        let lam = self.u.grid().xi_power(2.0 * cfg.alpha);
        let s = cfg.s0() - cfg.alpha;
        let mut out = Vec::with_capacity(rates.len());
        for m in 0..rates.len() {
            let u = self.u.node(m);
            let mut r = rates[m].clone();
            r.axpy_symbol(|i| lam[i], u);
            r.axpy(1.0, &advect_vec(u, u)?);
            r.axpy(1.0, self.grad_pi.node(m));
            r.axpy(-1.0, &buoyancy(self.theta.node(m)));
            out.push(r.hdot_norm(s));
        }
        Ok(out)
    }

    pub fn momentum_residual(&self, cfg: &SolverConfig) -> Result<f64> {
        Ok(self.momentum_residuals(cfg)?.into_iter().fold(0.0, f64::max))
    }

    /// Largest relative divergence over the velocity nodes.
    pub fn divergence_defect(&self) -> f64 {
        self.u
            .nodes()
            .iter()
            .map(VectorField::divergence_defect)
            .fold(0.0, f64::max)
    }

    /// One row per node: norms at the configured indices and the momentum residual.
    pub fn norm_series(&self, cfg: &SolverConfig) -> Result<Vec<SeriesRow>> {
        let x = cfg.x_indices();
        let y = cfg.y_indices();
        let residuals = self.momentum_residuals(cfg)?;
        Ok((0..self.u.nodes().len())
            .map(|m| SeriesRow {
                t: self.u.time().time(m),
                u_sup: self.u.node(m).hdot_norm(x.sup),
                u_l2: self.u.node(m).hdot_norm(x.l2),
                theta_sup: self.theta.node(m).hdot_norm(y.sup),
                theta_l2: self.theta.node(m).hdot_norm(y.l2),
                theta_energy: l2_energy(self.theta.node(m)),
                residual: residuals[m],
            })
            .collect())
    }
}

/// `‖θ‖_{L²}` including the mean.
pub(crate) fn l2_energy(theta: &ScalarField) -> f64 {
    crate::spectral::parseval_l2(theta)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub u_sup: f64,
    pub u_l2: f64,
    pub theta_sup: f64,
    pub theta_l2: f64,
    pub theta_energy: f64,
    pub residual: f64,
}

impl SeriesRow {
    pub const HEADER: [&'static str; 7] = [
        "t",
        "u_sup_norm",
        "u_l2_index_norm",
        "theta_sup_norm",
        "theta_l2_index_norm",
        "theta_l2",
        "momentum_residual",
    ];

    pub fn values(&self) -> [f64; 7] {
        [
            self.t,
            self.u_sup,
            self.u_l2,
            self.theta_sup,
            self.theta_l2,
            self.theta_energy,
            self.residual,
        ]
    }
}
