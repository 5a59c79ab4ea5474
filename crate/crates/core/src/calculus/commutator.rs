use crate::error::{Error, Result};
use crate::spectral::{lambda_power, product, Field, ScalarField};

/// `R_s(f, g) = Λ^s(fg) - (Λ^s f) g - f (Λ^s g)` with dealiased products,
/// for `0 < s < 1`.
pub fn commutator(f: &ScalarField, g: &ScalarField, s: f64) -> Result<ScalarField> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::precondition(format!(
            "commutator index s = {s} must lie in (0, 1)"
        )));
    }
    let fg = product(f, g)?;
    let mut out = lambda_power(&fg, s);
    out.axpy(-1.0, &product(&lambda_power(f, s), g)?);
    out.axpy(-1.0, &product(f, &lambda_power(g, s))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use rustfft::num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn constants_commute() {
        let g = make_grid(3, 16, 2.0 * PI).unwrap();
        let f = ScalarField::real_mode(&g, &[1, 2, 0], Complex64::new(0.4, -0.3)).unwrap();
        let c = ScalarField::from_fn(&g, |_| 2.5);
        let r = commutator(&f, &c, 0.5).unwrap();
        assert!(r.max_abs_coeff() < 1e-15);
    }

    #[test]
    fn rejects_index_outside_unit_interval() {
        let g = make_grid(2, 8, 1.0).unwrap();
        let f = ScalarField::zeros(&g, true);
        assert!(commutator(&f, &f, 0.0).is_err());
        assert!(commutator(&f, &f, 1.0).is_err());
    }

    #[test]
    fn two_mode_convolution() {
        // f = g = cos x₁ + cos 2x₂; at s = 1/2 the commutator is a finite sum
        // over the pairwise sums of the four wavevectors ±e₁, ±2e₂.
        let g = make_grid(2, 16, 2.0 * PI).unwrap();
        let f = ScalarField::from_fn(&g, |x| x[0].cos() + (2.0 * x[1]).cos());
        let r = commutator(&f, &f, 0.5).unwrap();
        let modes: [([i64; 2], f64); 4] = [([1, 0], 0.5), ([-1, 0], 0.5), ([0, 2], 0.5), ([0, -2], 0.5)];
        let norm = |k: &[i64]| ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt().sqrt();
        let mut expected = vec![Complex64::new(0.0, 0.0); g.len()];
        for (ka, ca) in &modes {
            for (kb, cb) in &modes {
                let k = [ka[0] + kb[0], ka[1] + kb[1]];
                let idx = g.index_of(&k).unwrap();
                let w = norm(&k) - norm(ka) - norm(kb);
                expected[idx] += ca * cb * w;
            }
        }
        for (a, b) in r.coeffs().iter().zip(&expected) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
