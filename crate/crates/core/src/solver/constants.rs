//! Empirical operator norms `k₁, k₂, k₃` of the maps `L`, `Φ`, `Ψ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Constants, Mode, SolverConfig};
use super::maps::{map_l, map_phi, map_psi, xt_norm, yt_norm};
use crate::calculus::{median, RHS_FLOOR, SECOND_STREAM};
use crate::error::{Error, Result};
use crate::semigroup::{free_solution, Trajectory};
use crate::spectral::{
    ensure_same, random_field, random_solenoidal, Field, NormSpec, NormTarget, ScalarField, SpectrumSpec,
    VectorField,
};

/// Corpus of unit random data used to measure the constants. The grid size and
/// time resolution may be coarser than the run they are used for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    /// `[q_min, q_max]` in units of `|ξ|`.
    pub band: [f64; 2],
    pub slope: f64,
    pub seeds: Vec<u64>,
    pub modes: usize,
    pub time_steps: usize,
}

impl ConstantsSpec {
    pub fn standard() -> Self {
        ConstantsSpec {
            band: [1.0, 2.5],
            slope: 0.0,
            seeds: (1..=50).collect(),
            modes: 16,
            time_steps: 32,
        }
    }

    /// `cfg` with this spec's grid and time resolution.
    pub fn measuring_config(&self, cfg: &SolverConfig) -> SolverConfig {
        SolverConfig {
            modes: self.modes,
            time_steps: self.time_steps,
            ..cfg.clone()
        }
    }
}

/// Initial data of one corpus sample; the maps are evaluated on the free
/// solutions they generate.
#[derive(Clone, Debug)]
pub struct ConstantsSample {
    pub seed: u64,
    pub u: VectorField,
    pub v: VectorField,
    pub theta: ScalarField,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantStats {
    pub max: f64,
    pub median: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRatios {
    pub seed: u64,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub k3: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub mode: Mode,
    pub alpha: f64,
    pub horizon: f64,
    pub modes: usize,
    pub time_steps: usize,
    pub k1: ConstantStats,
    pub k2: ConstantStats,
    pub k3: ConstantStats,
    pub samples: Vec<SampleRatios>,
}

impl ConstantsReport {
    pub fn constants(&self) -> Constants {
        Constants {
            k1: self.k1.max,
            k2: self.k2.max,
            k3: self.k3.max,
        }
    }
}

fn ratio(lhs: f64, rhs: f64) -> Option<f64> {
    (rhs > RHS_FLOOR && lhs.is_finite()).then(|| lhs / rhs)
}

fn larger(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

fn evaluate(s: &ConstantsSample, cfg: &SolverConfig) -> Result<SampleRatios> {
    let time = cfg.time()?;
    let x = cfg.x_indices();
    let y = cfg.y_indices();
    let ul = free_solution(&s.u, cfg.alpha, x.rate, time)?;
    let vl = free_solution(&s.v, cfg.alpha, x.rate, time)?;
    let tl = free_solution(&s.theta, cfg.alpha, y.rate, time)?;
    let tc = Trajectory::constant(time, &s.theta, y);

    // ‖L(θ)‖_X / (T^{1/2} sup‖θ‖_{Ḣ^{s₀-α}}), or / ‖θ‖_Y in the scaling mode
    let k1_of = |th: &Trajectory<ScalarField>| -> Result<Option<f64>> {
        let lhs = xt_norm(&map_l(th, cfg)?, cfg)?;
        let rhs = match cfg.mode {
            Mode::FiniteHorizon => cfg.horizon.sqrt() * th.sup_norm(y.sup),
            Mode::GlobalScaling => yt_norm(th, cfg)?,
        };
        Ok(ratio(lhs, rhs))
    };
    let k1 = larger(k1_of(&tc)?, k1_of(&tl)?);
    let uc = Trajectory::constant(time, &s.u, x);
    let vc = Trajectory::constant(time, &s.v, x);
    let k2_of = |u: &Trajectory<VectorField>, v: &Trajectory<VectorField>| -> Result<Option<f64>> {
        let lhs = xt_norm(&map_phi(u, v, cfg)?, cfg)?;
        Ok(ratio(lhs, xt_norm(u, cfg)? * xt_norm(v, cfg)?))
    };
    let k3_of = |u: &Trajectory<VectorField>, th: &Trajectory<ScalarField>| -> Result<Option<f64>> {
        let lhs = yt_norm(&map_psi(u, th, cfg)?, cfg)?;
        Ok(ratio(lhs, xt_norm(u, cfg)? * yt_norm(th, cfg)?))
    };
    let k2 = larger(k2_of(&ul, &vl)?, k2_of(&uc, &vc)?);
    let k3 = larger(k3_of(&ul, &tl)?, k3_of(&uc, &tc)?);
    Ok(SampleRatios { seed: s.seed, k1, k2, k3 })
}

fn stats(values: impl Iterator<Item = Option<f64>>, name: &str) -> Result<ConstantStats> {
    let mut v: Vec<f64> = values.flatten().collect();
    if v.is_empty() {
        return Err(Error::DegenerateCorpus(format!(
            "every sample has a vanishing denominator for {name}"
        )));
    }
    let max = v.iter().copied().fold(0.0, f64::max);
    Ok(ConstantStats {
        max,
        median: median(&mut v),
        count: v.len(),
    })
}

/// Max ratios over explicit data. Samples with a vanishing right-hand side are
/// skipped; a corpus in which every sample is skipped is an error.
pub fn measure_constants(cfg: &SolverConfig, data: &[ConstantsSample]) -> Result<ConstantsReport> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    for s in data {
        ensure_same(&grid, s.u.grid())?;
        ensure_same(&grid, s.v.grid())?;
        ensure_same(&grid, s.theta.grid())?;
    }
    let samples = data
        .par_iter()
        .map(|s| evaluate(s, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantsReport {
        mode: cfg.mode,
        alpha: cfg.alpha,
        horizon: cfg.horizon,
        modes: cfg.modes,
        time_steps: cfg.time_steps,
        k1: stats(samples.iter().map(|s| s.k1), "k1")?,
        k2: stats(samples.iter().map(|s| s.k2), "k2")?,
        k3: stats(samples.iter().map(|s| s.k3), "k3")?,
        samples,
    })
}

/// Draws unit random data for every seed and measures the constants on the
/// grid and time resolution of `spec`.
pub fn estimate_constants(cfg: &SolverConfig, spec: &ConstantsSpec) -> Result<ConstantsReport> {
    if spec.seeds.is_empty() {
        return Err(Error::DegenerateCorpus("no seeds".into()));
    }
    let mcfg = spec.measuring_config(cfg);
    mcfg.validate()?;
    let grid = mcfg.grid()?;
    let unit = |s: f64| {
        SpectrumSpec::new(
            spec.band[0],
            spec.band[1],
            spec.slope,
            NormTarget {
                norm: NormSpec::Hdot { s },
                value: 1.0,
            },
        )
    };
    let (su, st) = (unit(mcfg.s0()), unit(mcfg.theta_data_index()));
    let data = spec
        .seeds
        .iter()
        .map(|&seed| {
            Ok(ConstantsSample {
                seed,
                u: random_solenoidal(&grid, &su, seed)?,
                v: random_solenoidal(&grid, &su, seed.wrapping_add(SECOND_STREAM))?,
                theta: random_field(&grid, &st, seed.wrapping_add(2 * SECOND_STREAM))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    measure_constants(&mcfg, &data)
}
