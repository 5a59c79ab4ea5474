//! Helmholtz decomposition `u = Pu + Qu` with `Qu = ∇(-Δ)^{-1}(∇·u)`.

use rustfft::num_complex::Complex64;
use rustfft::num_traits::Zero;

use super::field::{Field, VectorField};

/// Leray projection onto divergence-free fields:
/// `(Pu)^_k = û_k - ξ_k (ξ_k·û_k)/|ξ_k|²`, the zero mode passed through.
pub fn leray_project(u: &VectorField) -> VectorField {
    let mut out = u.clone();
    project_in_place(&mut out, Part::Solenoidal);
    out.set_solenoidal(true);
    out
}

/// Gradient part `Q = I - P`.
pub fn gradient_part(u: &VectorField) -> VectorField {
    let mut out = u.clone();
    project_in_place(&mut out, Part::Gradient);
    out.set_solenoidal(false);
    out
}

/// Splits `u` into `(Pu, Qu)`.
pub fn helmholtz_split(u: &VectorField) -> (VectorField, VectorField) {
    (leray_project(u), gradient_part(u))
}

#[derive(Clone, Copy)]
enum Part {
    Solenoidal,
    Gradient,
}

fn project_in_place(u: &mut VectorField, part: Part) {
    let grid = u.grid().clone();
    let dim = grid.dim();
    let qn = grid.xi_norm();
    let mut xi = vec![0.0; dim];
    for i in 0..grid.len() {
        let q2 = qn[i] * qn[i];
        if q2 == 0.0 {
            if let Part::Gradient = part {
                for c in 0..dim {
                    u.channel_mut(c)[i] = Complex64::zero();
                }
            }
            continue;
        }
        let mut dot = Complex64::zero();
        for (c, x) in xi.iter_mut().enumerate() {
            *x = grid.xi(c)[i];
            dot += u.channel(c)[i] * *x;
        }
        let dot = dot / q2;
        for (c, &x) in xi.iter().enumerate() {
            let z = &mut u.channel_mut(c)[i];
            match part {
                Part::Solenoidal => *z -= dot * x,
                Part::Gradient => *z = dot * x,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, ScalarField};
    use std::f64::consts::PI;

    #[test]
    fn hand_computed_single_mode() {
        let g = make_grid(3, 8, 2.0 * PI).unwrap();
        let idx = g.index_of(&[1, 0, 0]).unwrap();
        let comps = [1.0, 1.0, 0.0]
            .iter()
            .map(|&v| {
                let mut f = ScalarField::zeros(&g, false);
                f.coeffs_mut()[idx] = Complex64::new(v, 0.0);
                f
            })
            .collect();
        let u = VectorField::new(comps).unwrap();
        let p = leray_project(&u);
        let got: Vec<f64> = (0..3).map(|c| p.channel(c)[idx].re).collect();
        assert_eq!(got, vec![0.0, 1.0, 0.0]);
        assert!(p.is_solenoidal());
        let q = gradient_part(&u);
        let got: Vec<f64> = (0..3).map(|c| q.channel(c)[idx].re).collect();
        assert_eq!(got, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn mean_flow_is_kept_by_p() {
        let g = make_grid(2, 8, 1.0).unwrap();
        let u = VectorField::constant(&g, &[0.5, -2.0]).unwrap();
        let p = leray_project(&u);
        assert_eq!(p.channel(0)[0].re, 0.5);
        assert_eq!(p.channel(1)[0].re, -2.0);
        assert_eq!(gradient_part(&u).max_abs_coeff(), 0.0);
    }

    #[test]
    fn split_adds_back() {
        let g = make_grid(2, 8, 1.0).unwrap();
        let a = ScalarField::real_mode(&g, &[1, 2], Complex64::new(0.3, 0.2)).unwrap();
        let b = ScalarField::real_mode(&g, &[-2, 1], Complex64::new(-0.1, 0.7)).unwrap();
        let u = VectorField::new(vec![a, b]).unwrap();
        let (p, q) = helmholtz_split(&u);
        let mut sum = p.clone();
        sum.axpy(1.0, &q);
        assert!(sum.difference(&u).max_abs_coeff() < 1e-15);
        assert!(p.hdot_inner(&q, 0.4).abs() < 1e-15);
    }
}
