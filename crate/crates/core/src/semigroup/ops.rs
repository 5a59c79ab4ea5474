//! The semigroup `S(t) = e^{-t(-Δ)^α}` and related multipliers.

use rustfft::num_complex::Complex64;

use super::trajectory::{trapezoid, NormIndices, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::{Field, ScalarField};

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::precondition(format!("alpha = {alpha} must be positive")))
    }
}

/// `S(t) f`: mode `k` multiplied by `e^{-t|ξ_k|^{2α}}`, the zero mode by 1.
pub fn heat_flow<F: Field>(f: &F, t: f64, alpha: f64) -> Result<F> {
    check_alpha(alpha)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::precondition(format!("time {t} must be nonnegative")));
    }
    let rate = f.grid().xi_power(2.0 * alpha);
    let mut out = f.clone();
    out.apply_symbol(|i| (-t * rate[i]).exp());
    Ok(out)
}

/// `t^{γ/α} ‖(-Δ)^γ S(t) f‖_{Ḣ^s} / ‖f‖_{Ḣ^s}`.
pub fn smoothing_ratio<F: Field>(f: &F, t: f64, alpha: f64, gamma: f64, s: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::precondition(format!("time {t} must be positive")));
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::precondition(format!("gamma = {gamma} must be nonnegative")));
    }
    let denom = f.hdot_norm(s);
    if denom == 0.0 {
        return Err(Error::precondition("field has zero norm"));
    }
    let grid = f.grid();
    let rate = grid.xi_power(2.0 * alpha);
    let lift = grid.xi_power(2.0 * gamma);
    let mut g = f.clone();
    g.apply_symbol(|i| lift[i] * (-t * rate[i]).exp());
    Ok(t.powf(gamma / alpha) * g.hdot_norm(s) / denom)
}

/// `sup_{y ≥ 0} y^r e^{-y} = r^r e^{-r}` with `r = γ/α`.
pub fn smoothing_bound(alpha: f64, gamma: f64) -> f64 {
    let r = gamma / alpha;
    if r == 0.0 {
        1.0
    } else {
        (r * r.ln() - r).exp()
    }
}

/// `A^{iy} f` with `A = (-Δ)^α`: mode `k` multiplied by `e^{i 2α y ln|ξ_k|}`,
/// the zero mode annihilated. The output is not flagged real unless `y = 0`.
pub fn imaginary_power(f: &ScalarField, y: f64, alpha: f64) -> ScalarField {
    let logq = f.grid().log_xi_norm();
    let mut out = f.clone();
    for (i, z) in out.coeffs_mut().iter_mut().enumerate() {
        if i == 0 {
            *z = Complex64::new(0.0, 0.0);
        } else {
            *z *= Complex64::from_polar(1.0, 2.0 * alpha * y * logq[i]);
        }
    }
    out.set_real(f.is_real() && y == 0.0);
    out
}

/// `∫_0^∞ ‖(-Δ)^α S(t) a‖²_{Ḣ^s} dt`, per mode in closed form:
/// `L^n Σ_{k≠0} |ξ|^{2s+4α} |â|² / (2|ξ|^{2α})`.
pub fn char_integral_raw<F: Field>(a: &F, alpha: f64, s: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(0.5 * a.hdot_norm_sq(s + alpha))
}

/// Prefactor that turns the integral in [`char_integral_raw`] into
/// `‖a‖²_{Ḣ^{s+α}}`. A prefactor of 1/2 under-reports by exactly 4.
pub const CHAR_PREFACTOR: f64 = 2.0;

/// `2 ∫_0^∞ ‖(-Δ)^α S(t) a‖²_{Ḣ^s} dt`, which equals `‖a‖²_{Ḣ^{s+α}}`.
pub fn char_integral<F: Field>(a: &F, alpha: f64, s: f64) -> Result<f64> {
    Ok(CHAR_PREFACTOR * char_integral_raw(a, alpha, s)?)
}

/// `a_L(t) = S(t) a` on the time grid, with `∂_t a_L = -(-Δ)^α a_L` attached and
/// indices `(s+α, s+2α, s)`. The zero mode of `a` is carried but never measured.
pub fn free_solution<F: Field>(a: &F, alpha: f64, s: f64, time: TimeGrid) -> Result<Trajectory<F>> {
    check_alpha(alpha)?;
    let rate = a.grid().xi_power(2.0 * alpha);
    let mut nodes = Vec::with_capacity(time.node_count());
    let mut rates = Vec::with_capacity(time.node_count());
    for m in 0..=time.steps {
        let t = time.time(m);
        let mut f = a.clone();
        f.apply_symbol(|i| (-t * rate[i]).exp());
        let mut r = f.clone();
        r.apply_symbol(|i| -rate[i]);
        nodes.push(f);
        rates.push(r);
    }
    Trajectory::new(time, nodes, NormIndices::parabolic(s, alpha))?.with_rates(rates)
}

/// The three terms of `sup_t ‖a_L‖_{Ḣ^{s+α}} + ‖a_L‖_{L²(0,∞;Ḣ^{s+2α})} + ‖∂_t a_L‖_{L²(0,∞;Ḣ^s)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeFunctional {
    pub sup: f64,
    pub l2: f64,
    pub rate: f64,
}

impl FreeFunctional {
    pub fn total(&self) -> f64 {
        self.sup + self.l2 + self.rate
    }
}

/// Evaluates the infinite-horizon functional of a free solution: trapezoid on
/// `[0, T]` plus the tail beyond `T` in closed form from the last node.
pub fn free_functional<F: Field>(traj: &Trajectory<F>, alpha: f64) -> Result<FreeFunctional> {
    check_alpha(alpha)?;
    let p = traj.profile()?;
    let idx = traj.indices();
    let last = traj.last();
    let m = p.last();
    // ∫_T^∞ |ξ|^{2σ} e^{-2λ(t-T)} |â_T|² dt = |ξ|^{2σ} |â_T|² / (2λ), with λ = |ξ|^{2α}
    let tail_l2 = 0.5 * last.hdot_norm_sq(idx.l2 - alpha);
    let tail_rate = 0.5 * last.hdot_norm_sq(idx.rate + alpha);
    Ok(FreeFunctional {
        sup: p.sup_upto(m),
        l2: (trapezoid(&p.l2_sq, p.dt, m) + tail_l2).sqrt(),
        rate: (trapezoid(&p.rate_sq, p.dt, m) + tail_rate).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, VectorField};
    use std::f64::consts::PI;

    #[test]
    fn heat_flow_halves_unit_mode() {
        let g = make_grid(2, 8, 2.0 * PI).unwrap();
        let f = ScalarField::real_mode(&g, &[1, 0], Complex64::new(1.0, 0.0)).unwrap();
        let out = heat_flow(&f, 2f64.ln(), 1.0).unwrap();
        let idx = g.index_of(&[1, 0]).unwrap();
        assert!((out.coeffs()[idx].re - 0.5).abs() < 1e-15);
        assert!(heat_flow(&f, -1.0, 1.0).is_err());
        assert!(heat_flow(&f, 1.0, 0.0).is_err());
    }

    #[test]
    fn heat_flow_keeps_mean_and_solenoidality() {
        let g = make_grid(2, 8, 2.0 * PI).unwrap();
        let u = VectorField::constant(&g, &[1.0, 2.0]).unwrap();
        let out = heat_flow(&u, 3.0, 0.7).unwrap();
        assert!(out.is_solenoidal());
        assert_eq!(out.channel(1)[0].re, 2.0);
    }

    #[test]
    fn smoothing_bounds_from_direct_maximization() {
        let oracle = |r: f64| {
            (0..=200_000)
                .map(|j| j as f64 * 1e-4)
                .map(|y| y.powf(r) * (-y).exp())
                .fold(0.0, f64::max)
        };
        for r in [0.5, 1.0, 2.0] {
            assert!((smoothing_bound(1.0, r) - oracle(r)).abs() < 1e-8);
        }
        assert!((smoothing_bound(0.8, 0.8) - 0.36788).abs() < 1e-5);
        assert!((smoothing_bound(1.0, 2.0) - 0.54134).abs() < 1e-5);
        assert_eq!(smoothing_bound(1.0, 0.0), 1.0);
    }

    #[test]
    fn single_mode_attains_the_bound() {
        let g = make_grid(2, 8, 2.0 * PI).unwrap();
        let f = ScalarField::real_mode(&g, &[1, 1], Complex64::new(1.0, 0.0)).unwrap();
        let lam = 2.0;
        // y = t λ = γ/α at the maximizer
        let ratio = smoothing_ratio(&f, 1.0 / lam, 1.0, 1.0, 0.3).unwrap();
        assert!((ratio - (-1f64).exp()).abs() < 1e-14);
        assert!(smoothing_ratio(&f, 0.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn imaginary_power_group_law() {
        let g = make_grid(2, 8, 2.0 * PI).unwrap();
        let f = ScalarField::real_mode(&g, &[2, 1], Complex64::new(0.3, 0.4)).unwrap();
        let a = imaginary_power(&imaginary_power(&f, 0.4, 0.9), -1.1, 0.9);
        let b = imaginary_power(&f, -0.7, 0.9);
        assert!(a.difference(&b).max_abs_coeff() < 1e-15);
        assert!(!b.is_real());
        let same = imaginary_power(&f, 0.0, 0.9);
        assert!(same.is_real());
        assert!(same.difference(&f).max_abs_coeff() < 1e-16);
    }

    #[test]
    fn char_integral_single_unit_mode() {
        let g = make_grid(2, 8, 2.0 * PI).unwrap();
        let c = Complex64::new(0.6, 0.0);
        let a = ScalarField::single_mode(&g, &[1, 0], c).unwrap();
        // ∫_0^∞ e^{-2t} dt = 1/2 at |ξ| = 1
        let raw = char_integral_raw(&a, 1.0, 0.4).unwrap();
        assert!((raw - 0.5 * c.norm_sqr() * g.volume()).abs() < 1e-14);
        assert!((char_integral(&a, 1.0, 0.4).unwrap() - a.hdot_norm_sq(1.4)).abs() < 1e-13);
    }

    #[test]
    fn free_solution_starts_at_data() {
        let g = make_grid(2, 8, 2.0 * PI).unwrap();
        let a = ScalarField::real_mode(&g, &[1, 2], Complex64::new(0.1, -0.2)).unwrap();
        let traj = free_solution(&a, 0.75, 0.0, TimeGrid::new(1.0, 4).unwrap()).unwrap();
        assert_eq!(traj.first().coeffs(), a.coeffs());
        assert_eq!(traj.indices(), NormIndices::parabolic(0.0, 0.75));
    }
}
