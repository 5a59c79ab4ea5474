//! Seeded band-limited random fields.
//!
//! Coefficients are drawn by walking the integer lattice `[-K, K]^n`, where
//! `K` is set by the band edge, in lexicographic order. The walk does not
//! depend on `N`, so a seed produces the same function on every grid that
//! resolves the band.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{Field, ScalarField, VectorField};
use super::grid::SpectralGrid;
use super::norms::NormSpec;
use super::projection::leray_project;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormTarget {
    pub norm: NormSpec,
    pub value: f64,
}

/// Radial amplitude `A(|ξ|) = |ξ|^{-slope}` on `q_min ≤ |ξ| ≤ q_max`,
/// rescaled so that `target.norm` equals `target.value`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub band: [f64; 2],
    pub slope: f64,
    pub target: NormTarget,
}

impl SpectrumSpec {
    pub fn new(q_min: f64, q_max: f64, slope: f64, target: NormTarget) -> Self {
        SpectrumSpec {
            band: [q_min, q_max],
            slope,
            target,
        }
    }

    pub fn with_target(mut self, target: NormTarget) -> Self {
        self.target = target;
        self
    }

    fn validate(&self, grid: &SpectralGrid) -> Result<i64> {
        let [lo, hi] = self.band;
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > 0.0 && lo <= hi) {
            return Err(Error::Spectrum(format!("empty band [{lo}, {hi}]")));
        }
        if !self.slope.is_finite() {
            return Err(Error::Spectrum("non-finite slope".into()));
        }
        self.target.norm.validate()?;
        if !(self.target.value.is_finite() && self.target.value >= 0.0) {
            return Err(Error::Spectrum(format!(
                "target value {} must be finite and nonnegative",
                self.target.value
            )));
        }
        let half_width = (hi / grid.fundamental() * (1.0 + 1e-12)).floor() as i64;
        if half_width > grid.dealias_cutoff() {
            return Err(Error::Spectrum(format!(
                "band edge {hi} needs |k| up to {half_width}, beyond the 2/3 cutoff {}",
                grid.dealias_cutoff()
            )));
        }
        Ok(half_width)
    }

    fn contains(&self, q: f64) -> bool {
        let [lo, hi] = self.band;
        q > 0.0 && q >= lo * (1.0 - 1e-12) && q <= hi * (1.0 + 1e-12)
    }
}

/// First nonzero component positive.
fn positive_half(k: &[i64]) -> bool {
    k.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// Fills `channels` Hermitian coefficient arrays; returns how many band modes were hit.
fn draw(
    grid: &Arc<SpectralGrid>,
    spec: &SpectrumSpec,
    seed: u64,
    channels: usize,
) -> Result<Vec<ScalarField>> {
    let half_width = spec.validate(grid)?;
    let dim = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<ScalarField> = (0..channels).map(|_| ScalarField::zeros(grid, true)).collect();
    let side = (2 * half_width + 1) as usize;
    let total = side.pow(dim as u32);
    let mut hits = 0usize;
    let mut k = vec![0i64; dim];
    for lin in 0..total {
        let mut rem = lin;
        for axis in (0..dim).rev() {
            k[axis] = (rem % side) as i64 - half_width;
            rem /= side;
        }
        if !positive_half(&k) {
            continue;
        }
        let draws: Vec<Complex64> = (0..channels)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            })
            .collect();
        let q = grid.fundamental() * (k.iter().map(|&c| (c * c) as f64).sum::<f64>()).sqrt();
        if !spec.contains(q) {
            continue;
        }
        let idx = grid.index_of(&k).expect("band lies inside the grid");
        let mirror = grid.mirror_index(idx);
        let amp = if spec.slope == 0.0 { 1.0 } else { q.powf(-spec.slope) };
        for (f, z) in out.iter_mut().zip(&draws) {
            f.coeffs_mut()[idx] = z * amp;
            f.coeffs_mut()[mirror] = (z * amp).conj();
        }
        hits += 1;
    }
    if hits == 0 {
        return Err(Error::Spectrum(format!(
            "no lattice mode inside band {:?}",
            spec.band
        )));
    }
    Ok(out)
}

fn rescale<F: Field>(mut f: F, target: &NormTarget) -> Result<F> {
    let current = target.norm.evaluate(&f)?;
    if !(current > 0.0 && current.is_finite()) {
        return Err(Error::Spectrum("target unreachable: profile has zero norm".into()));
    }
    let factor = target.value / current;
    f.apply_symbol(|_| factor);
    Ok(f)
}

/// Real, mean-free, band-limited scalar field with the requested norm.
pub fn random_field(grid: &Arc<SpectralGrid>, spec: &SpectrumSpec, seed: u64) -> Result<ScalarField> {
    let f = draw(grid, spec, seed, 1)?.pop().expect("one channel");
    rescale(f, &spec.target)
}

/// Real, mean-free, divergence-free vector field with the requested norm.
pub fn random_solenoidal(
    grid: &Arc<SpectralGrid>,
    spec: &SpectrumSpec,
    seed: u64,
) -> Result<VectorField> {
    let comps = draw(grid, spec, seed, grid.dim())?;
    let u = leray_project(&VectorField::new(comps)?);
    rescale(u, &spec.target)
}
