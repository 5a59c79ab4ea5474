//! Pseudo-spectral quadratic terms with 2/3-rule dealiasing.
//!
//! Inputs are truncated to the 2/3 band before they are brought to physical
//! space and every product is truncated again on the way back, so the
//! retained modes of a product are free of aliasing. Two real fields share one
//! complex transform (`a + i b`), which halves the transform count.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::num_traits::Zero;

use super::field::{Field, ScalarField, VectorField};
use super::grid::{ensure_same, SpectralGrid};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn masked(grid: &SpectralGrid, coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .zip(grid.dealias_mask())
        .map(|(&z, &keep)| if keep { z } else { Complex64::zero() })
        .collect()
}

/// Collocation values of several real coefficient arrays, two per transform.
fn to_physical_reals(grid: &SpectralGrid, fields: &[Vec<Complex64>]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        let mut buf: Vec<Complex64> = match pair {
            [a, b] => a.iter().zip(b).map(|(x, y)| x + y * I).collect(),
            [a] => a.clone(),
            _ => unreachable!(),
        };
        grid.inverse_transform(&mut buf);
        out.push(buf.iter().map(|z| z.re).collect());
        if pair.len() == 2 {
            out.push(buf.iter().map(|z| z.im).collect());
        }
    }
    out
}

/// Dealiased coefficients of several real collocation arrays.
fn to_spectral_reals(grid: &SpectralGrid, values: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    let mask = grid.dealias_mask();
    let mut out = Vec::with_capacity(values.len());
    for pair in values.chunks(2) {
        let mut buf: Vec<Complex64> = match pair {
            [a, b] => a
                .iter()
                .zip(b)
                .map(|(&x, &y)| Complex64::new(x, y))
                .collect(),
            [a] => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            _ => unreachable!(),
        };
        grid.forward_transform(&mut buf);
        if pair.len() == 1 {
            for (z, &keep) in buf.iter_mut().zip(mask) {
                if !keep {
                    *z = Complex64::zero();
                }
            }
            out.push(buf);
            continue;
        }
        let mut a = vec![Complex64::zero(); buf.len()];
        let mut b = vec![Complex64::zero(); buf.len()];
        for i in 0..buf.len() {
            if !mask[i] {
                continue;
            }
            let zm = buf[grid.mirror_index(i)].conj();
            a[i] = (buf[i] + zm) * 0.5;
            b[i] = (buf[i] - zm) * (-0.5 * I);
        }
        out.push(a);
        out.push(b);
    }
    out
}

fn require_real(f: &ScalarField) -> Result<()> {
    if f.is_real() {
        Ok(())
    } else {
        Err(Error::NotReal)
    }
}

/// A real velocity field brought to collocation points once and reused for
/// several advected quantities.
pub struct Transport {
    grid: Arc<SpectralGrid>,
    velocity: Vec<Vec<f64>>,
}

impl Transport {
    pub fn new(u: &VectorField) -> Result<Self> {
        if !u.is_real() {
            return Err(Error::NotReal);
        }
        let grid = u.grid().clone();
        let comps: Vec<Vec<Complex64>> = u
            .components()
            .iter()
            .map(|c| masked(&grid, c.coeffs()))
            .collect();
        let velocity = to_physical_reals(&grid, &comps);
        Ok(Transport { grid, velocity })
    }

    /// `u·∇f` for each input, dealiased.
    pub fn advect_all(&self, fields: &[&ScalarField]) -> Result<Vec<ScalarField>> {
        let dim = self.grid.dim();
        let mut grads = Vec::with_capacity(fields.len() * dim);
        for f in fields {
            ensure_same(&self.grid, f.grid())?;
            require_real(f)?;
            let base = masked(&self.grid, f.coeffs());
            for axis in 0..dim {
                let symbol = self.grid.derivative_symbol(axis);
                grads.push(
                    base.iter()
                        .zip(symbol)
                        .map(|(z, &x)| z * Complex64::new(0.0, x))
                        .collect(),
                );
            }
        }
        let grads = to_physical_reals(&self.grid, &grads);
        let products: Vec<Vec<f64>> = grads
            .chunks(dim)
            .map(|g| {
                let mut acc = vec![0.0; self.grid.len()];
                for (gj, uj) in g.iter().zip(&self.velocity) {
                    for ((a, &d), &v) in acc.iter_mut().zip(gj).zip(uj) {
                        *a += v * d;
                    }
                }
                acc
            })
            .collect();
        to_spectral_reals(&self.grid, &products)
            .into_iter()
            .map(|c| ScalarField::from_coeffs(&self.grid, c, true))
            .collect()
    }

    /// Collocation values of the velocity components (after truncation).
    pub fn velocity(&self) -> &[Vec<f64>] {
        &self.velocity
    }
}

/// `u·∇f`, computed pseudo-spectrally and dealiased.
pub fn advect(u: &VectorField, f: &ScalarField) -> Result<ScalarField> {
    ensure_same(u.grid(), f.grid())?;
    let t = Transport::new(u)?;
    Ok(t.advect_all(&[f])?.pop().expect("one output"))
}

/// `(u·∇)v`, componentwise.
pub fn advect_vec(u: &VectorField, v: &VectorField) -> Result<VectorField> {
    ensure_same(u.grid(), v.grid())?;
    let t = Transport::new(u)?;
    let refs: Vec<&ScalarField> = v.components().iter().collect();
    VectorField::new(t.advect_all(&refs)?)
}

/// Dealiased pointwise product `fg`.
pub fn product(f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
    ensure_same(f.grid(), g.grid())?;
    require_real(f)?;
    require_real(g)?;
    let grid = f.grid().clone();
    let phys = to_physical_reals(&grid, &[masked(&grid, f.coeffs()), masked(&grid, g.coeffs())]);
    let prod: Vec<f64> = phys[0].iter().zip(&phys[1]).map(|(a, b)| a * b).collect();
    let coeffs = to_spectral_reals(&grid, &[prod]).pop().expect("one output");
    ScalarField::from_coeffs(&grid, coeffs, true)
}

/// Dealiased `f u` for a scalar `f` and vector `u`.
pub fn scalar_times_vector(f: &ScalarField, u: &VectorField) -> Result<VectorField> {
    ensure_same(f.grid(), u.grid())?;
    require_real(f)?;
    if !u.is_real() {
        return Err(Error::NotReal);
    }
    let grid = f.grid().clone();
    let mut inputs = vec![masked(&grid, f.coeffs())];
    inputs.extend(u.components().iter().map(|c| masked(&grid, c.coeffs())));
    let phys = to_physical_reals(&grid, &inputs);
    let prods: Vec<Vec<f64>> = phys[1..]
        .iter()
        .map(|uj| uj.iter().zip(&phys[0]).map(|(a, b)| a * b).collect())
        .collect();
    let comps = to_spectral_reals(&grid, &prods)
        .into_iter()
        .map(|c| ScalarField::from_coeffs(&grid, c, true))
        .collect::<Result<Vec<_>>>()?;
    VectorField::new(comps)
}

/// Real `L²` pairing `∫ f g dx` by Parseval.
pub fn l2_pairing(f: &ScalarField, g: &ScalarField) -> f64 {
    let s: f64 = f
        .coeffs()
        .iter()
        .zip(g.coeffs())
        .map(|(a, b)| (a * b.conj()).re)
        .sum();
    s * f.grid().volume()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn zero_velocity_gives_zero() {
        let g = make_grid(3, 8, 2.0 * PI).unwrap();
        let u = VectorField::zeros(&g, true);
        let f = ScalarField::from_fn(&g, |x| x[0].sin() + x[2].cos());
        assert_eq!(advect(&u, &f).unwrap().max_abs_coeff(), 0.0);
    }

    #[test]
    fn constant_velocity_differentiates() {
        let g = make_grid(3, 16, 2.0 * PI).unwrap();
        let u = VectorField::constant(&g, &[1.0, 0.0, 0.0]).unwrap();
        let f = ScalarField::from_fn(&g, |x| x[0].sin());
        let out = advect(&u, &f).unwrap();
        let expected = ScalarField::from_fn(&g, |x| x[0].cos());
        assert!(out.difference(&expected).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn packed_product_matches_direct() {
        let g = make_grid(2, 16, 2.0 * PI).unwrap();
        let f = ScalarField::from_fn(&g, |x| x[0].sin() + 0.5 * (2.0 * x[1]).cos());
        let h = ScalarField::from_fn(&g, |x| (x[0] + x[1]).cos());
        let out = product(&f, &h).unwrap();
        let expected = ScalarField::from_fn(&g, |x| {
            (x[0].sin() + 0.5 * (2.0 * x[1]).cos()) * (x[0] + x[1]).cos()
        });
        assert!(out.difference(&expected).max_abs_coeff() < 1e-14);
        assert!(out.hermitian_defect() < 1e-14);
    }

    #[test]
    fn products_are_truncated() {
        let g = make_grid(2, 16, 2.0 * PI).unwrap();
        let f = ScalarField::from_fn(&g, |x| (4.0 * x[0]).cos());
        let out = product(&f, &f).unwrap();
        // cos² = (1 + cos 8x)/2; the k = 8 harmonic lies beyond the 2/3 band
        assert!((out.coeffs()[0].re - 0.5).abs() < 1e-15);
        let k8 = g.index_of(&[-8, 0]).unwrap();
        assert_eq!(out.coeffs()[k8], Complex64::zero());
    }

    #[test]
    fn rejects_mismatched_grids() {
        let a = make_grid(2, 8, 1.0).unwrap();
        let b = make_grid(2, 8, 2.0).unwrap();
        let u = VectorField::zeros(&a, true);
        let f = ScalarField::zeros(&b, true);
        assert!(matches!(advect(&u, &f), Err(Error::GridMismatch { .. })));
    }
}
