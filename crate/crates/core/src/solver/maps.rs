//! The integral maps `L`, `Φ`, `Ψ` and the `X_T`, `Y_T` norms.

use super::config::SolverConfig;
use crate::error::{Error, Result};
use crate::semigroup::{
    duhamel, duhamel_step, rate_from_equation, NormIndices, PhiWeights, Trajectory,
};
use crate::spectral::{
    ensure_same, helmholtz_split, leray_project, Field, ScalarField, Transport, VectorField,
};

pub type VelocityTrajectory = Trajectory<VectorField>;
pub type ScalarTrajectory = Trajectory<ScalarField>;

fn check_indices<F: Field>(traj: &Trajectory<F>, want: NormIndices, what: &str) -> Result<()> {
    let got = traj.indices();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs());
    if close(got.sup, want.sup) && close(got.l2, want.l2) && close(got.rate, want.rate) {
        Ok(())
    } else {
        Err(Error::precondition(format!(
            "{what} norm needs indices {want:?}, trajectory carries {got:?}"
        )))
    }
}

/// `‖u‖_{X_T}`.
pub fn xt_norm(u: &VelocityTrajectory, cfg: &SolverConfig) -> Result<f64> {
    check_indices(u, cfg.x_indices(), "X_T")?;
    u.space_time_norm()
}

/// `‖θ‖_{Y_T}` at the indices of `cfg.mode`.
pub fn yt_norm(theta: &ScalarTrajectory, cfg: &SolverConfig) -> Result<f64> {
    check_indices(theta, cfg.y_indices(), "Y_T")?;
    theta.space_time_norm()
}

fn check_pair<A: Field, B: Field>(a: &Trajectory<A>, b: &Trajectory<B>) -> Result<()> {
    if a.time() != b.time() {
        return Err(Error::TimeMismatch(format!("{:?} vs {:?}", a.time(), b.time())));
    }
    ensure_same(a.grid(), b.grid())
}

/// `θ e_n`, the buoyancy term.
pub(crate) fn buoyancy(theta: &ScalarField) -> VectorField {
    VectorField::along_axis(theta, theta.grid().dim() - 1)
}

/// `L(θ) = ∫_0^t S(t-τ) P(θ e_n) dτ`.
pub fn map_l(theta: &ScalarTrajectory, cfg: &SolverConfig) -> Result<VelocityTrajectory> {
    let nodes = theta.nodes().iter().map(|t| leray_project(&buoyancy(t))).collect();
    let forcing = Trajectory::new(theta.time(), nodes, NormIndices::uniform(cfg.s0() - cfg.alpha))?;
    duhamel(&forcing, cfg.alpha)
}

/// `Φ(u, v) = -∫_0^t S(t-τ) P(u·∇v) dτ`.
pub fn map_phi(u: &VelocityTrajectory, v: &VelocityTrajectory, cfg: &SolverConfig) -> Result<VelocityTrajectory> {
    check_pair(u, v)?;
    let nodes = u
        .nodes()
        .iter()
        .zip(v.nodes())
        .map(|(a, b)| {
            let t = Transport::new(a)?;
            let refs: Vec<&ScalarField> = b.components().iter().collect();
            let adv = VectorField::new(t.advect_all(&refs)?)?;
            Ok(leray_project(&adv).scaled(-1.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let forcing = Trajectory::new(u.time(), nodes, NormIndices::uniform(cfg.s0() - cfg.alpha))?;
    duhamel(&forcing, cfg.alpha)
}

/// `Ψ(u, θ) = -∫_0^t S(t-τ) u·∇θ dτ`.
pub fn map_psi(u: &VelocityTrajectory, theta: &ScalarTrajectory, cfg: &SolverConfig) -> Result<ScalarTrajectory> {
    check_pair(u, theta)?;
    let nodes = u
        .nodes()
        .iter()
        .zip(theta.nodes())
        .map(|(a, th)| Ok(crate::spectral::advect(a, th)?.scaled(-1.0)))
        .collect::<Result<Vec<_>>>()?;
    let forcing = Trajectory::new(u.time(), nodes, NormIndices::uniform(cfg.y_indices().rate))?;
    duhamel(&forcing, cfg.alpha)
}

/// Right-hand sides of the projected system at one instant:
/// `(P(θe_n - u·∇u), -u·∇θ)`, plus the discarded gradient part
/// `Q(θe_n - u·∇u) = ∇π`.
pub struct Forcing {
    pub velocity: VectorField,
    pub theta: ScalarField,
    pub grad_pi: VectorField,
}

pub fn forcing(u: &VectorField, theta: &ScalarField) -> Result<Forcing> {
    ensure_same(u.grid(), theta.grid())?;
    let t = Transport::new(u)?;
    let mut refs: Vec<&ScalarField> = u.components().iter().collect();
    refs.push(theta);
    let mut adv = t.advect_all(&refs)?;
    let u_theta = adv.pop().expect("scalar advection");
    let mut g = buoyancy(theta);
    g.axpy(-1.0, &VectorField::new(adv)?);
    let (p, q) = helmholtz_split(&g);
    Ok(Forcing {
        velocity: p,
        theta: u_theta.scaled(-1.0),
        grad_pi: q,
    })
}

/// Solves `∂_t u + A u = F_u`, `∂_t θ + A θ = F_θ` from `(u₀, θ₀)` with the
/// forcing at node `m` supplied by `force(m)` and interpolated linearly between
/// nodes. Returns trajectories at the `X_T`, `Y_T` indices with rates attached.
pub(crate) fn linear_march<G>(
    u0: &VectorField,
    theta0: &ScalarField,
    cfg: &SolverConfig,
    mut force: G,
) -> Result<(VelocityTrajectory, ScalarTrajectory)>
where
    G: FnMut(usize) -> Result<(VectorField, ScalarField)>,
{
    let time = cfg.time()?;
    let phi = PhiWeights::new(u0.grid(), cfg.alpha, time.dt())?;
    let count = time.node_count();
    let (mut un, mut tn) = (Vec::with_capacity(count), Vec::with_capacity(count));
    let (mut ur, mut tr) = (Vec::with_capacity(count), Vec::with_capacity(count));
    let (mut fu, mut ft) = force(0)?;
    let (mut u, mut th) = (u0.clone(), theta0.clone());
    for m in 0..count {
        ur.push(rate_from_equation(&u, &fu, &phi));
        tr.push(rate_from_equation(&th, &ft, &phi));
        if m + 1 < count {
            let (gu, gt) = force(m + 1)?;
            let next_u = duhamel_step(&u, &fu, &gu, &phi);
            let next_t = duhamel_step(&th, &ft, &gt, &phi);
            un.push(std::mem::replace(&mut u, next_u));
            tn.push(std::mem::replace(&mut th, next_t));
            fu = gu;
            ft = gt;
        } else {
            un.push(u.clone());
            tn.push(th.clone());
        }
    }
    let u_traj = Trajectory::new(time, un, cfg.x_indices())?.with_rates(ur)?;
    let t_traj = Trajectory::new(time, tn, cfg.y_indices())?.with_rates(tr)?;
    Ok((u_traj, t_traj))
}

/// One application of the mild map:
/// `(u_L + L(θ) + Φ(u,u), θ_L + Ψ(u,θ))` with `u_L, θ_L` started from the
/// first nodes of the inputs.
pub fn mild_map(
    u: &VelocityTrajectory,
    theta: &ScalarTrajectory,
    cfg: &SolverConfig,
) -> Result<(VelocityTrajectory, ScalarTrajectory)> {
    check_pair(u, theta)?;
    if u.time() != cfg.time()? {
        return Err(Error::TimeMismatch("trajectory does not match the configured time grid".into()));
    }
    linear_march(u.first(), theta.first(), cfg, |m| {
        let f = forcing(u.node(m), theta.node(m))?;
        Ok((f.velocity, f.theta))
    })
}

/// Space-time norm of `a - b` at `a`'s indices.
pub(crate) fn difference_norm<F: Field>(a: &Trajectory<F>, b: &Trajectory<F>) -> Result<f64> {
    a.difference(b)?.space_time_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{free_solution, TimeGrid};
    use crate::solver::Mode;
    use crate::spectral::make_grid;
    use rustfft::num_complex::Complex64;
    use std::f64::consts::PI;

    fn cfg() -> SolverConfig {
        SolverConfig {
            n: 3,
            alpha: 1.0,
            horizon: 1.0,
            modes: 8,
            length: 2.0 * PI,
            time_steps: 16,
            picard_tol: 1e-10,
            picard_max_iters: 10,
            mode: Mode::FiniteHorizon,
        }
    }

    #[test]
    fn map_l_of_perpendicular_mode_is_scalar_duhamel() {
        let c = cfg();
        let g = c.grid().unwrap();
        let th = ScalarField::real_mode(&g, &[1, 0, 0], Complex64::new(0.5, 0.0)).unwrap();
        let traj = Trajectory::constant(c.time().unwrap(), &th, c.y_indices());
        let l = map_l(&traj, &c).unwrap();
        let idx = g.index_of(&[1, 0, 0]).unwrap();
        // ξ ⊥ e_3: P leaves θ e_3 alone; |ξ| = 1
        let want = 0.5 * (1.0 - (-1f64).exp());
        assert!((l.last().channel(2)[idx].re - want).abs() < 1e-14);
        assert_eq!(l.last().channel(0)[idx].re, 0.0);
        assert!(l.last().is_solenoidal());
        assert_eq!(l.indices(), c.x_indices());
    }

    #[test]
    fn map_l_of_parallel_mode_vanishes() {
        let c = cfg();
        let g = c.grid().unwrap();
        let th = ScalarField::real_mode(&g, &[0, 0, 2], Complex64::new(0.5, 0.1)).unwrap();
        let traj = Trajectory::constant(c.time().unwrap(), &th, c.y_indices());
        let l = map_l(&traj, &c).unwrap();
        assert!(l.last().max_abs_coeff() < 1e-17);
    }

    #[test]
    fn phi_is_bilinear() {
        let c = cfg();
        let g = c.grid().unwrap();
        let time = c.time().unwrap();
        let a = crate::spectral::random_solenoidal(&g, &spec(), 1).unwrap();
        let b = crate::spectral::random_solenoidal(&g, &spec(), 2).unwrap();
        let ua = Trajectory::constant(time, &a, c.x_indices());
        let vb = Trajectory::constant(time, &b, c.x_indices());
        let base = map_phi(&ua, &vb, &c).unwrap();
        let scaled = map_phi(&ua.scaled(2.0), &vb.scaled(3.0), &c).unwrap();
        let d = scaled.last().difference(&base.last().scaled(6.0)).max_abs_coeff();
        assert!(d <= 1e-12 * base.last().max_abs_coeff());
        let zero = map_phi(&ua.scaled(0.0), &vb, &c).unwrap();
        assert_eq!(zero.last().max_abs_coeff(), 0.0);
    }

    fn spec() -> crate::spectral::SpectrumSpec {
        crate::spectral::SpectrumSpec::new(
            1.0,
            2.0,
            0.0,
            crate::spectral::NormTarget {
                norm: crate::spectral::NormSpec::Hdot { s: 0.5 },
                value: 0.1,
            },
        )
    }

    #[test]
    fn free_solution_has_x_norm_at_most_three_times_data() {
        let c = cfg();
        let g = make_grid(3, 8, 2.0 * PI).unwrap();
        let a = crate::spectral::random_solenoidal(&g, &spec(), 4).unwrap();
        let traj = free_solution(&a, 1.0, c.s0() - 1.0, TimeGrid::new(1.0, 16).unwrap()).unwrap();
        let x = xt_norm(&traj, &c).unwrap();
        assert!(x <= 3.0 * a.hdot_norm(c.s0()));
        let wrong = traj.with_indices(NormIndices::uniform(0.0));
        assert!(xt_norm(&wrong, &c).is_err());
    }

    #[test]
    fn forcing_splits_into_projected_and_gradient_parts() {
        let c = cfg();
        let g = c.grid().unwrap();
        let u = crate::spectral::random_solenoidal(&g, &spec(), 5).unwrap();
        let th = crate::spectral::random_field(&g, &spec(), 6).unwrap();
        let f = forcing(&u, &th).unwrap();
        assert!(f.velocity.divergence_defect() < 1e-12);
        assert!(leray_project(&f.grad_pi).max_abs_coeff() <= 1e-12 * f.grad_pi.max_abs_coeff());
    }
}
