//! Seeded random-field corpora shared by the audits.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    make_grid, random_field, random_solenoidal, NormSpec, NormTarget, ScalarField, SpectralGrid,
    SpectrumSpec, VectorField,
};

/// Offset separating the second field of a pair from the first.
pub const SECOND_STREAM: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    pub name: String,
    /// `[q_min, q_max]` in units of `|ξ|`.
    pub range: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub n: usize,
    pub length: f64,
    pub bands: Vec<Band>,
    /// Radial amplitude exponent; 0 gives flat Gaussian spectra.
    pub slope: f64,
    pub seeds: Vec<u64>,
    /// Grid sizes, strictly increasing.
    pub resolutions: Vec<usize>,
}

/// Seeds `1..=100`.
pub fn standard_seeds() -> Vec<u64> {
    (1..=100).collect()
}

impl CorpusSpec {
    /// `n = 3`, `L = 2π`, bands low `[1, 2]`, mid `[2, 2.5]`, wide `[1, 2.5]`,
    /// seeds `1..=100`, `N ∈ {16, 32}`. Every band keeps its integer
    /// wavevectors within `|k_j| ≤ 2`, so quadratic products are resolved
    /// exactly on both grids.
    pub fn standard() -> Self {
        let band = |name: &str, lo: f64, hi: f64| Band {
            name: name.into(),
            range: [lo, hi],
        };
        CorpusSpec {
            n: 3,
            length: 2.0 * std::f64::consts::PI,
            bands: vec![band("low", 1.0, 2.0), band("mid", 2.0, 2.5), band("wide", 1.0, 2.5)],
            slope: 0.0,
            seeds: standard_seeds(),
            resolutions: vec![16, 32],
        }
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn with_resolutions(mut self, resolutions: Vec<usize>) -> Self {
        self.resolutions = resolutions;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolutions.is_empty() {
            return Err(Error::precondition("corpus needs at least one resolution"));
        }
        if self.resolutions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::precondition(format!(
                "resolutions {:?} must be strictly increasing",
                self.resolutions
            )));
        }
        if self.bands.is_empty() {
            return Err(Error::precondition("corpus needs at least one band"));
        }
        for g in self.grids()? {
            for b in &self.bands {
                // fails on empty or unresolved bands
                random_field(&g, &self.spectrum(b), 0)?;
            }
        }
        Ok(())
    }

    pub fn grids(&self) -> Result<Vec<Arc<SpectralGrid>>> {
        self.resolutions
            .iter()
            .map(|&m| make_grid(self.n, m, self.length))
            .collect()
    }

    pub fn spectrum(&self, band: &Band) -> SpectrumSpec {
        SpectrumSpec::new(
            band.range[0],
            band.range[1],
            self.slope,
            NormTarget {
                norm: NormSpec::Hdot { s: 0.0 },
                value: 1.0,
            },
        )
    }

    /// Every `(grid, band, seed)` triple in a fixed order.
    pub fn samples(&self) -> Result<Vec<SamplePoint>> {
        let mut out = Vec::new();
        for g in self.grids()? {
            for (b, band) in self.bands.iter().enumerate() {
                for &seed in &self.seeds {
                    out.push(SamplePoint {
                        grid: g.clone(),
                        band: b,
                        spectrum: self.spectrum(band),
                        seed,
                    });
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct SamplePoint {
    pub grid: Arc<SpectralGrid>,
    pub band: usize,
    pub spectrum: SpectrumSpec,
    pub seed: u64,
}

impl SamplePoint {
    pub fn scalar(&self) -> Result<ScalarField> {
        random_field(&self.grid, &self.spectrum, self.seed)
    }

    pub fn second_scalar(&self) -> Result<ScalarField> {
        random_field(&self.grid, &self.spectrum, self.seed.wrapping_add(SECOND_STREAM))
    }

    pub fn solenoidal(&self) -> Result<VectorField> {
        random_solenoidal(&self.grid, &self.spectrum, self.seed)
    }
}
