//! Duhamel integrals `w(t) = ∫_0^t S(t-τ) f(τ) dτ`.

use super::phi::PhiWeights;
use super::trajectory::{NormIndices, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::Field;

/// One step of the exponential trapezoid recurrence
/// `ŵ_{m+1} = φ₀ ŵ_m + Δt[(φ₁ - φ₂) f̂_m + φ₂ f̂_{m+1}]`,
/// exact when `f` is linear on the step.
pub fn duhamel_step<F: Field>(w: &F, f_now: &F, f_next: &F, phi: &PhiWeights) -> F {
    let dt = phi.dt();
    let (p0, p1, p2) = (phi.phi0(), phi.phi1(), phi.phi2());
    let mut out = w.clone();
    out.apply_symbol(|i| p0[i]);
    out.axpy_symbol(|i| dt * (p1[i] - p2[i]), f_now);
    out.axpy_symbol(|i| dt * p2[i], f_next);
    out
}

/// `∂_t w = f - (-Δ)^α w` at one node.
pub fn rate_from_equation<F: Field>(w: &F, f: &F, phi: &PhiWeights) -> F {
    let lam = phi.rate();
    let mut r = f.clone();
    r.axpy_symbol(|i| -lam[i], w);
    r
}

/// Duhamel integral of a forcing trajectory, `w(0) = 0`.
///
/// The forcing is interpolated linearly between nodes; `∂_t w` comes from the
/// equation. If the forcing is tagged with `L²(Ḣ^σ)` at `indices.l2 = σ`, the
/// result carries `(σ+α, σ+2α, σ)`.
pub fn duhamel<F: Field>(forcing: &Trajectory<F>, alpha: f64) -> Result<Trajectory<F>> {
    let time = forcing.time();
    let phi = PhiWeights::new(forcing.grid(), alpha, time.dt())?;
    let f = forcing.nodes();
    let mut nodes = Vec::with_capacity(f.len());
    let mut rates = Vec::with_capacity(f.len());
    let mut w = f[0].zeros_like();
    for m in 0..f.len() {
        if m > 0 {
            w = duhamel_step(&w, &f[m - 1], &f[m], &phi);
        }
        rates.push(rate_from_equation(&w, &f[m], &phi));
        nodes.push(w.clone());
    }
    let indices = NormIndices::parabolic(forcing.indices().l2, alpha);
    Trajectory::new(time, nodes, indices)?.with_rates(rates)
}

/// `(‖∂_t w‖_{L²(Ḣ^s)} + ‖w‖_{L²(Ḣ^{s+2α})}) / ‖f‖_{L²(Ḣ^s)}` for the Duhamel
/// integral `w` of `f`.
pub fn max_regularity_ratio<F: Field>(forcing: &Trajectory<F>, alpha: f64, s: f64) -> Result<f64> {
    let denom = forcing.l2_norm(s);
    if denom == 0.0 {
        return Err(Error::precondition("forcing vanishes in L²(Ḣ^s)"));
    }
    let tagged = forcing.clone().with_indices(NormIndices::uniform(s));
    let w = duhamel(&tagged, alpha)?;
    let p = w.profile()?;
    let m = p.last();
    Ok((p.rate_upto(m) + p.l2_upto(m)) / denom)
}

/// Both sides of `sup_t ‖w‖²_{sup} ≤ ‖w(0)‖²_{sup} + 2‖w‖_{L²(l2)} ‖∂_t w‖_{L²(rate)}`,
/// at the trajectory's own indices.
pub fn energy_bound<F: Field>(w: &Trajectory<F>) -> Result<(f64, f64)> {
    let p = w.profile()?;
    let m = p.last();
    let sup = p.sup_upto(m);
    let rhs = p.sup[0] * p.sup[0] + 2.0 * p.l2_upto(m) * p.rate_upto(m);
    Ok((sup * sup, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::TimeGrid;
    use crate::spectral::{make_grid, ScalarField};
    use rustfft::num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn constant_forcing_on_one_mode() {
        let g = make_grid(3, 8, 2.0 * PI).unwrap();
        let f = ScalarField::single_mode(&g, &[0, 2, 0], Complex64::new(1.0, 0.0)).unwrap();
        let time = TimeGrid::new(1.0, 16).unwrap();
        let forcing = Trajectory::constant(time, &f, NormIndices::uniform(0.0));
        let w = duhamel(&forcing, 1.0).unwrap();
        let idx = g.index_of(&[0, 2, 0]).unwrap();
        let got = w.last().coeffs()[idx].re;
        assert!((got - (1.0 - (-4f64).exp()) / 4.0).abs() < 1e-14);
        assert!((got - 0.24542).abs() < 1e-5);
        assert_eq!(w.first().max_abs_coeff(), 0.0);
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let g = make_grid(2, 8, 1.0).unwrap();
        let time = TimeGrid::new(1.0, 4).unwrap();
        let forcing = Trajectory::constant(time, &ScalarField::zeros(&g, true), NormIndices::uniform(0.0));
        let w = duhamel(&forcing, 0.8).unwrap();
        assert!(w.nodes().iter().all(|f| f.max_abs_coeff() == 0.0));
    }

    #[test]
    fn recurrence_residual_is_zero() {
        let g = make_grid(2, 8, 2.0 * PI).unwrap();
        let base = ScalarField::real_mode(&g, &[1, 1], Complex64::new(0.3, 0.1)).unwrap();
        let time = TimeGrid::new(0.5, 6).unwrap();
        let forcing =
            Trajectory::from_fn(time, NormIndices::uniform(0.0), |t| base.scaled((3.0 * t).sin()))
                .unwrap();
        let w = duhamel(&forcing, 0.9).unwrap();
        let phi = PhiWeights::new(&g, 0.9, time.dt()).unwrap();
        for m in 0..time.steps {
            let next = duhamel_step(w.node(m), forcing.node(m), forcing.node(m + 1), &phi);
            assert_eq!(next.coeffs(), w.node(m + 1).coeffs());
        }
    }
}
