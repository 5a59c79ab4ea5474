use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::num_traits::Zero;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Upper bound on `N^n`; keeps a single vector field below ~100 MB.
pub const MAX_GRID_POINTS: usize = 1 << 21;

/// Periodic box `[0, L)^n` sampled with `N` points per axis.
///
/// Flat mode index `i` is row-major with axis 0 slowest. Along each axis the
/// integer wavenumber follows FFT order `0, 1, .., N/2-1, -N/2, .., -1`, so
/// `k_j ∈ [-N/2, N/2)` and `ξ_j = 2π k_j / L`.
///
/// Nyquist convention: a mode with some `k_j = -N/2` has no stored partner
/// `+N/2`. Real fields are expected to carry zero coefficients there; odd
/// multipliers (derivatives) are zeroed on those planes, even multipliers
/// (`|ξ|^s`, heat flow) use `|ξ|` as stored.
pub struct SpectralGrid {
    dim: usize,
    modes: usize,
    length: f64,
    points: usize,
    wavenumbers: Vec<Vec<i64>>,
    xi: Vec<Vec<f64>>,
    derivative: Vec<Vec<f64>>,
    xi_norm: Vec<f64>,
    log_xi_norm: Vec<f64>,
    dealias: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("dim", &self.dim)
            .field("modes", &self.modes)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.modes == other.modes && self.length == other.length
    }
}

/// Builds a shared grid; see [`SpectralGrid::new`].
pub fn make_grid(dim: usize, modes: usize, length: f64) -> Result<Arc<SpectralGrid>> {
    SpectralGrid::new(dim, modes, length).map(Arc::new)
}

fn fft_frequency(j: usize, modes: usize) -> i64 {
    if j < modes / 2 {
        j as i64
    } else {
        j as i64 - modes as i64
    }
}

impl SpectralGrid {
    pub fn new(dim: usize, modes: usize, length: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidGrid(format!("dimension {dim} < 2")));
        }
        if modes < 4 || !modes.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "modes per axis must be even and >= 4, got {modes}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {length}"
            )));
        }
        let points = (0..dim)
            .try_fold(1usize, |acc, _| acc.checked_mul(modes))
            .filter(|&p| p <= MAX_GRID_POINTS)
            .ok_or_else(|| {
                Error::InvalidGrid(format!(
                    "{modes}^{dim} points exceeds the limit of {MAX_GRID_POINTS}"
                ))
            })?;

        let fundamental = 2.0 * PI / length;
        let mut wavenumbers = vec![vec![0i64; points]; dim];
        for (axis, ks) in wavenumbers.iter_mut().enumerate() {
            let stride = modes.pow((dim - 1 - axis) as u32);
            for (i, k) in ks.iter_mut().enumerate() {
                *k = fft_frequency((i / stride) % modes, modes);
            }
        }
        let nyquist = -(modes as i64) / 2;
        let xi: Vec<Vec<f64>> = wavenumbers
            .iter()
            .map(|ks| ks.iter().map(|&k| fundamental * k as f64).collect())
            .collect();
        let derivative: Vec<Vec<f64>> = wavenumbers
            .iter()
            .zip(&xi)
            .map(|(ks, xs)| {
                ks.iter()
                    .zip(xs)
                    .map(|(&k, &x)| if k == nyquist { 0.0 } else { x })
                    .collect()
            })
            .collect();
        let xi_norm: Vec<f64> = (0..points)
            .map(|i| xi.iter().map(|x| x[i] * x[i]).sum::<f64>().sqrt())
            .collect();
        let log_xi_norm = xi_norm
            .iter()
            .map(|&q| if q > 0.0 { q.ln() } else { f64::NEG_INFINITY })
            .collect();
        let dealias = (0..points)
            .map(|i| {
                wavenumbers
                    .iter()
                    .all(|ks| 3 * ks[i].unsigned_abs() < modes as u64)
            })
            .collect();

        let mut planner = FftPlanner::new();
        Ok(SpectralGrid {
            dim,
            modes,
            length,
            points,
            wavenumbers,
            xi,
            derivative,
            xi_norm,
            log_xi_norm,
            dealias,
            forward: planner.plan_fft_forward(modes),
            inverse: planner.plan_fft_inverse(modes),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis, `N`.
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of lattice points, `N^n`.
    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    /// Box volume `L^n`, the Parseval factor of every norm.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    pub fn cell_volume(&self) -> f64 {
        (self.length / self.modes as f64).powi(self.dim as i32)
    }

    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn wavenumbers(&self, axis: usize) -> &[i64] {
        &self.wavenumbers[axis]
    }

    pub fn wavevector(&self, index: usize) -> Vec<i64> {
        self.wavenumbers.iter().map(|ks| ks[index]).collect()
    }

    pub fn xi(&self, axis: usize) -> &[f64] {
        &self.xi[axis]
    }

    /// `ξ_axis` with the Nyquist plane of that axis zeroed.
    pub fn derivative_symbol(&self, axis: usize) -> &[f64] {
        &self.derivative[axis]
    }

    pub fn xi_norm(&self) -> &[f64] {
        &self.xi_norm
    }

    /// `ln|ξ|`, `-inf` at the zero mode.
    pub fn log_xi_norm(&self) -> &[f64] {
        &self.log_xi_norm
    }

    /// `|ξ_k|^p` per mode, with the zero mode set to 0 for every `p`.
    pub fn xi_power(&self, p: f64) -> Vec<f64> {
        self.log_xi_norm
            .iter()
            .map(|&l| if l == f64::NEG_INFINITY { 0.0 } else { (p * l).exp() })
            .collect()
    }

    /// True where a mode survives the 2/3-rule (`3|k_j| < N` on every axis).
    pub fn dealias_mask(&self) -> &[bool] {
        &self.dealias
    }

    /// Largest retained integer wavenumber per axis after dealiasing.
    pub fn dealias_cutoff(&self) -> i64 {
        ((self.modes - 1) / 3) as i64
    }

    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim {
            return None;
        }
        let half = (self.modes / 2) as i64;
        let mut index = 0usize;
        for &kj in k {
            if kj < -half || kj >= half {
                return None;
            }
            let j = if kj < 0 { kj + self.modes as i64 } else { kj };
            index = index * self.modes + j as usize;
        }
        Some(index)
    }

    /// Flat index of `-k` (wrapping, so Nyquist planes map to themselves).
    pub fn mirror_index(&self, index: usize) -> usize {
        let mut out = 0usize;
        for axis in 0..self.dim {
            let stride = self.modes.pow((self.dim - 1 - axis) as u32);
            let j = (index / stride) % self.modes;
            let mj = (self.modes - j) % self.modes;
            out += mj * stride;
        }
        out
    }

    pub fn is_nyquist(&self, index: usize) -> bool {
        let nyquist = -(self.modes as i64) / 2;
        self.wavenumbers.iter().any(|ks| ks[index] == nyquist)
    }

    /// Physical coordinate `x_j = j L / N` of collocation point `index`.
    pub fn point(&self, index: usize) -> Vec<f64> {
        let h = self.length / self.modes as f64;
        (0..self.dim)
            .map(|axis| {
                let stride = self.modes.pow((self.dim - 1 - axis) as u32);
                ((index / stride) % self.modes) as f64 * h
            })
            .collect()
    }

    /// Coefficients to collocation values: `f(x_j) = Σ_k f̂_k e^{iξ_k·x_j}`.
    pub fn inverse_transform(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    /// Collocation values to coefficients (normalized by `N^n`).
    pub fn forward_transform(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
        let scale = 1.0 / self.points as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.points, "buffer does not match grid");
        let n = self.modes;
        let mut scratch = vec![Complex64::zero(); fft.get_inplace_scratch_len()];
        // last axis is contiguous
        fft.process_with_scratch(data, &mut scratch);
        if self.dim == 1 {
            return;
        }
        let mut lines = vec![Complex64::zero(); self.points];
        for axis in 0..self.dim - 1 {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let block = stride * n;
            let mut w = 0;
            for base in (0..self.points).step_by(block) {
                for j in 0..stride {
                    for i in 0..n {
                        lines[w] = data[base + j + i * stride];
                        w += 1;
                    }
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            let mut r = 0;
            for base in (0..self.points).step_by(block) {
                for j in 0..stride {
                    for i in 0..n {
                        data[base + j + i * stride] = lines[r];
                        r += 1;
                    }
                }
            }
        }
    }

    pub(crate) fn describe(&self) -> String {
        format!("n={} N={} L={}", self.dim, self.modes, self.length)
    }
}

pub(crate) fn ensure_same(a: &Arc<SpectralGrid>, b: &Arc<SpectralGrid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::GridMismatch {
            left: a.describe(),
            right: b.describe(),
        })
    }
}
