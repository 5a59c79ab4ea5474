use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::num_traits::Zero;

use super::grid::{ensure_same, SpectralGrid};
use crate::error::{Error, Result};

/// Common surface of scalar and vector coefficient arrays.
///
/// A field is a set of channels (one for a scalar, `n` for a vector), each a
/// coefficient array in the grid's mode ordering.
pub trait Field: Clone + Send + Sync {
    fn grid(&self) -> &Arc<SpectralGrid>;
    fn channel_count(&self) -> usize;
    fn channel(&self, c: usize) -> &[Complex64];
    fn channel_mut(&mut self, c: usize) -> &mut [Complex64];
    fn zeros_like(&self) -> Self;

    /// `‖f‖²_{Ḣ^s} = L^n Σ_{k≠0} |ξ_k|^{2s} |f̂_k|²`, summed over channels.
    fn hdot_norm_sq(&self, s: f64) -> f64 {
        let grid = self.grid();
        let logq = grid.log_xi_norm();
        let mut acc = 0.0;
        for c in 0..self.channel_count() {
            for (i, z) in self.channel(c).iter().enumerate().skip(1) {
                let w = if s == 0.0 { 1.0 } else { (2.0 * s * logq[i]).exp() };
                acc += w * z.norm_sqr();
            }
        }
        acc * grid.volume()
    }

    fn hdot_norm(&self, s: f64) -> f64 {
        self.hdot_norm_sq(s).sqrt()
    }

    /// Real part of the `Ḣ^s` inner product.
    fn hdot_inner(&self, other: &Self, s: f64) -> f64 {
        let grid = self.grid();
        let logq = grid.log_xi_norm();
        let mut acc = 0.0;
        for c in 0..self.channel_count() {
            for (i, (a, b)) in self
                .channel(c)
                .iter()
                .zip(other.channel(c))
                .enumerate()
                .skip(1)
            {
                let w = if s == 0.0 { 1.0 } else { (2.0 * s * logq[i]).exp() };
                acc += w * (a * b.conj()).re;
            }
        }
        acc * grid.volume()
    }

    /// Multiplies every mode of every channel by `symbol(mode)`.
    fn apply_symbol(&mut self, symbol: impl Fn(usize) -> f64) {
        for c in 0..self.channel_count() {
            for (i, z) in self.channel_mut(c).iter_mut().enumerate() {
                *z *= symbol(i);
            }
        }
    }

    /// `self += a * x`.
    fn axpy(&mut self, a: f64, x: &Self) {
        for c in 0..self.channel_count() {
            for (y, xv) in self.channel_mut(c).iter_mut().zip(x.channel(c)) {
                *y += xv * a;
            }
        }
    }

    /// `self += symbol(mode) * x`, mode by mode.
    fn axpy_symbol(&mut self, symbol: impl Fn(usize) -> f64, x: &Self) {
        for c in 0..self.channel_count() {
            for (i, (y, xv)) in self.channel_mut(c).iter_mut().zip(x.channel(c)).enumerate() {
                *y += xv * symbol(i);
            }
        }
    }

    fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.apply_symbol(|_| a);
        out
    }

    fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    fn max_abs_coeff(&self) -> f64 {
        (0..self.channel_count())
            .flat_map(|c| self.channel(c).iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }
}

/// Scalar field stored as Fourier coefficients, `f(x) = Σ_k f̂_k e^{iξ_k·x}`.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<SpectralGrid>,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<SpectralGrid>, real: bool) -> Self {
        ScalarField {
            grid: grid.clone(),
            coeffs: vec![Complex64::zero(); grid.len()],
            real,
        }
    }

    pub fn from_coeffs(grid: &Arc<SpectralGrid>, coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Format(format!(
                "{} coefficients for a grid of {} modes",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(ScalarField {
            grid: grid.clone(),
            coeffs,
            real,
        })
    }

    /// Samples `f` on the collocation points and transforms.
    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut data: Vec<Complex64> = (0..grid.len())
            .map(|j| Complex64::new(f(&grid.point(j)), 0.0))
            .collect();
        grid.forward_transform(&mut data);
        ScalarField {
            grid: grid.clone(),
            coeffs: data,
            real: true,
        }
    }

    /// Transforms real collocation values to coefficients.
    pub fn from_physical(grid: &Arc<SpectralGrid>, values: &[f64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Format(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        grid.forward_transform(&mut data);
        Ok(ScalarField {
            grid: grid.clone(),
            coeffs: data,
            real: true,
        })
    }

    /// A single complex coefficient at integer wavevector `k` (not real-valued).
    pub fn single_mode(grid: &Arc<SpectralGrid>, k: &[i64], c: Complex64) -> Result<Self> {
        let idx = grid
            .index_of(k)
            .ok_or_else(|| Error::precondition(format!("wavevector {k:?} not on grid")))?;
        let mut f = ScalarField::zeros(grid, false);
        f.coeffs[idx] = c;
        Ok(f)
    }

    /// `c e^{iξ·x} + conj(c) e^{-iξ·x}`; a real field.
    pub fn real_mode(grid: &Arc<SpectralGrid>, k: &[i64], c: Complex64) -> Result<Self> {
        let idx = grid
            .index_of(k)
            .ok_or_else(|| Error::precondition(format!("wavevector {k:?} not on grid")))?;
        if grid.is_nyquist(idx) {
            return Err(Error::precondition("real modes cannot sit on a Nyquist plane"));
        }
        let mut f = ScalarField::zeros(grid, true);
        let m = grid.mirror_index(idx);
        if m == idx {
            f.coeffs[idx] = Complex64::new(c.re, 0.0);
        } else {
            f.coeffs[idx] = c;
            f.coeffs[m] = c.conj();
        }
        Ok(f)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn set_real(&mut self, real: bool) {
        self.real = real;
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Collocation values `f(x_j)`.
    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        self.grid.inverse_transform(&mut data);
        data
    }

    /// Real collocation values; rejects fields not flagged real.
    pub fn to_physical_real(&self) -> Result<Vec<f64>> {
        if !self.real {
            return Err(Error::NotReal);
        }
        Ok(self.to_physical().into_iter().map(|z| z.re).collect())
    }

    /// Largest violation of `f̂_{-k} = conj(f̂_k)`, relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.coeffs.len() {
            if self.grid.is_nyquist(i) {
                continue;
            }
            let m = self.grid.mirror_index(i);
            worst = worst.max((self.coeffs[m] - self.coeffs[i].conj()).norm());
        }
        worst / scale
    }

    /// Zeroes modes outside the 2/3 band.
    pub fn dealias(&mut self) {
        for (z, &keep) in self.coeffs.iter_mut().zip(self.grid.dealias_mask()) {
            if !keep {
                *z = Complex64::zero();
            }
        }
    }

    /// `∂_j f`, with the Nyquist plane of axis `j` zeroed.
    pub fn derivative(&self, axis: usize) -> ScalarField {
        let symbol = self.grid.derivative_symbol(axis);
        let coeffs = self
            .coeffs
            .iter()
            .zip(symbol)
            .map(|(z, &x)| z * Complex64::new(0.0, x))
            .collect();
        ScalarField {
            grid: self.grid.clone(),
            coeffs,
            real: self.real,
        }
    }

    pub fn gradient(&self) -> VectorField {
        let comps = (0..self.grid.dim()).map(|a| self.derivative(a)).collect();
        VectorField {
            comps,
            solenoidal: false,
        }
    }

    pub(crate) fn assert_grid(&self, other: &ScalarField) -> Result<()> {
        ensure_same(&self.grid, &other.grid)
    }
}

impl Field for ScalarField {
    fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    fn channel_count(&self) -> usize {
        1
    }

    fn channel(&self, _c: usize) -> &[Complex64] {
        &self.coeffs
    }

    fn channel_mut(&mut self, _c: usize) -> &mut [Complex64] {
        &mut self.coeffs
    }

    fn zeros_like(&self) -> Self {
        ScalarField::zeros(&self.grid, self.real)
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        for (y, xv) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += xv * a;
        }
        self.real = self.real && x.real;
    }

    fn axpy_symbol(&mut self, symbol: impl Fn(usize) -> f64, x: &Self) {
        for (i, (y, xv)) in self.coeffs.iter_mut().zip(&x.coeffs).enumerate() {
            *y += xv * symbol(i);
        }
        self.real = self.real && x.real;
    }
}

/// `n` scalar components on one grid.
#[derive(Clone, Debug)]
pub struct VectorField {
    comps: Vec<ScalarField>,
    solenoidal: bool,
}

/// Relative tolerance of the discrete divergence-free invariant.
pub const SOLENOIDAL_TOL: f64 = 1e-12;

impl VectorField {
    pub fn new(comps: Vec<ScalarField>) -> Result<Self> {
        let first = comps
            .first()
            .ok_or_else(|| Error::precondition("vector field needs components"))?;
        if comps.len() != first.grid.dim() {
            return Err(Error::precondition(format!(
                "{} components on a {}-dimensional grid",
                comps.len(),
                first.grid.dim()
            )));
        }
        for c in &comps[1..] {
            first.assert_grid(c)?;
        }
        Ok(VectorField {
            comps,
            solenoidal: false,
        })
    }

    pub fn zeros(grid: &Arc<SpectralGrid>, real: bool) -> Self {
        VectorField {
            comps: (0..grid.dim()).map(|_| ScalarField::zeros(grid, real)).collect(),
            solenoidal: true,
        }
    }

    /// Constant vector `value` (zero-mode velocity).
    pub fn constant(grid: &Arc<SpectralGrid>, value: &[f64]) -> Result<Self> {
        if value.len() != grid.dim() {
            return Err(Error::precondition("constant vector has wrong length"));
        }
        let comps = value
            .iter()
            .map(|&v| {
                let mut f = ScalarField::zeros(grid, true);
                f.coeffs[0] = Complex64::new(v, 0.0);
                f
            })
            .collect();
        Ok(VectorField {
            comps,
            solenoidal: true,
        })
    }

    /// `f e_axis`.
    pub fn along_axis(f: &ScalarField, axis: usize) -> Self {
        let grid = f.grid();
        let comps = (0..grid.dim())
            .map(|a| {
                if a == axis {
                    f.clone()
                } else {
                    ScalarField::zeros(grid, f.is_real())
                }
            })
            .collect();
        VectorField {
            comps,
            solenoidal: false,
        }
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.comps
    }

    pub fn component(&self, j: usize) -> &ScalarField {
        &self.comps[j]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut ScalarField {
        self.solenoidal = false;
        &mut self.comps[j]
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.comps
    }

    pub fn is_solenoidal(&self) -> bool {
        self.solenoidal
    }

    pub fn is_real(&self) -> bool {
        self.comps.iter().all(|c| c.is_real())
    }

    pub(crate) fn set_solenoidal(&mut self, flag: bool) {
        self.solenoidal = flag;
    }

    /// Flags the field solenoidal after checking the divergence invariant.
    pub fn assume_solenoidal(mut self) -> Result<Self> {
        let d = self.divergence_defect();
        if d > SOLENOIDAL_TOL {
            return Err(Error::precondition(format!(
                "relative divergence {d:e} exceeds {SOLENOIDAL_TOL:e}"
            )));
        }
        self.solenoidal = true;
        Ok(self)
    }

    /// `max_k |ξ_k·û_k| / max_k |û_k|`.
    pub fn divergence_defect(&self) -> f64 {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return 0.0;
        }
        let grid = self.grid();
        let mut worst: f64 = 0.0;
        for i in 0..grid.len() {
            let mut d = Complex64::zero();
            for (a, c) in self.comps.iter().enumerate() {
                d += c.coeffs[i] * grid.xi(a)[i];
            }
            worst = worst.max(d.norm());
        }
        worst / scale
    }

    /// `∇·u` as a scalar field.
    pub fn divergence(&self) -> ScalarField {
        let grid = self.grid().clone();
        let mut out = ScalarField::zeros(&grid, self.is_real());
        for (a, c) in self.comps.iter().enumerate() {
            let symbol = grid.derivative_symbol(a);
            for ((o, z), &x) in out.coeffs.iter_mut().zip(&c.coeffs).zip(symbol) {
                *o += z * Complex64::new(0.0, x);
            }
        }
        out
    }

    pub fn dealias(&mut self) {
        for c in &mut self.comps {
            c.dealias();
        }
    }
}

impl Field for VectorField {
    fn grid(&self) -> &Arc<SpectralGrid> {
        self.comps[0].grid()
    }

    fn channel_count(&self) -> usize {
        self.comps.len()
    }

    fn channel(&self, c: usize) -> &[Complex64] {
        &self.comps[c].coeffs
    }

    fn channel_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c].coeffs
    }

    fn zeros_like(&self) -> Self {
        VectorField::zeros(self.grid(), self.is_real())
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        for (y, xc) in self.comps.iter_mut().zip(&x.comps) {
            y.axpy(a, xc);
        }
        self.solenoidal = self.solenoidal && x.solenoidal;
    }

    fn axpy_symbol(&mut self, symbol: impl Fn(usize) -> f64, x: &Self) {
        for (y, xc) in self.comps.iter_mut().zip(&x.comps) {
            y.axpy_symbol(&symbol, xc);
        }
        self.solenoidal = self.solenoidal && x.solenoidal;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_norm() {
        let g = make_grid(3, 8, 2.0 * PI).unwrap();
        let c = Complex64::new(0.3, -0.4);
        let f = ScalarField::single_mode(&g, &[0, 2, 0], c).unwrap();
        let s = 0.7;
        let expected = c.norm() * 2f64.powf(s) * g.volume().sqrt();
        assert!((f.hdot_norm(s) - expected).abs() < 1e-13 * expected);
        assert_eq!(ScalarField::zeros(&g, true).hdot_norm(1.3), 0.0);
    }

    #[test]
    fn physical_round_trip_and_hermitian() {
        let g = make_grid(2, 16, 1.0).unwrap();
        let f = ScalarField::from_fn(&g, |x| (2.0 * PI * x[0]).cos() + (4.0 * PI * x[1]).sin());
        assert!(f.hermitian_defect() < 1e-14);
        let values = f.to_physical_real().unwrap();
        let back = ScalarField::from_physical(&g, &values).unwrap();
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn non_real_field_has_no_real_samples() {
        let g = make_grid(2, 8, 1.0).unwrap();
        let f = ScalarField::single_mode(&g, &[1, 0], Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(f.to_physical_real(), Err(Error::NotReal)));
    }

    #[test]
    fn solenoidal_check_rejects_gradients() {
        let g = make_grid(3, 8, 2.0 * PI).unwrap();
        let phi = ScalarField::real_mode(&g, &[1, 1, 0], Complex64::new(1.0, 0.5)).unwrap();
        assert!(phi.gradient().assume_solenoidal().is_err());
        let u = VectorField::constant(&g, &[1.0, 0.0, 0.0]).unwrap();
        assert!(u.assume_solenoidal().is_ok());
    }
}
