//! Corpus audits of the semigroup estimates: smoothing, maximal regularity,
//! the norm characterization and the free-solution functional.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::duhamel::max_regularity_ratio;
use super::ops::{char_integral, char_integral_raw, free_functional, free_solution, smoothing_bound};
use super::trajectory::{NormIndices, TimeGrid, Trajectory};
use crate::calculus::{median, CorpusSpec, SamplePoint};
use crate::error::{Error, Result};
use crate::spectral::{Field, ScalarField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupAuditSpec {
    pub corpus: CorpusSpec,
    pub alpha: f64,
    pub s: f64,
    /// Values of `γ/α` for the smoothing estimate.
    pub smoothing_orders: Vec<f64>,
    /// `[t_min, t_max]` of the log-spaced smoothing sweep.
    pub smoothing_window: [f64; 2],
    pub smoothing_points: usize,
    /// Horizons of the maximal-regularity audit.
    pub horizons: Vec<f64>,
    pub time_steps: usize,
}

impl SemigroupAuditSpec {
    pub fn standard() -> Self {
        SemigroupAuditSpec {
            corpus: CorpusSpec::standard(),
            alpha: 1.0,
            s: 0.0,
            smoothing_orders: vec![0.5, 1.0, 2.0],
            smoothing_window: [1e-3, 10.0],
            smoothing_points: 200,
            horizons: vec![0.1, 1.0, 10.0],
            time_steps: 64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.corpus.validate()?;
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::precondition(format!("alpha = {} must be positive", self.alpha)));
        }
        if self.smoothing_orders.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::precondition("smoothing orders must be nonnegative"));
        }
        let [lo, hi] = self.smoothing_window;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) || self.smoothing_points < 2 {
            return Err(Error::precondition(format!(
                "smoothing window [{lo}, {hi}] with {} points is empty",
                self.smoothing_points
            )));
        }
        if self.horizons.is_empty() || self.horizons.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::precondition("horizons must be positive"));
        }
        TimeGrid::new(1.0, self.time_steps)?;
        Ok(())
    }

    /// Log-spaced sample times of the smoothing sweep.
    pub fn smoothing_times(&self) -> Vec<f64> {
        let [lo, hi] = self.smoothing_window;
        let k = self.smoothing_points - 1;
        (0..=k)
            .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / k as f64).exp())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingResult {
    /// `γ/α`.
    pub order: f64,
    /// `(γ/α)^{γ/α} e^{-γ/α}`.
    pub bound: f64,
    pub max_ratio: f64,
    /// Sup over the sweep for the single mode `k = e_1`.
    pub single_mode_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxRegularityResult {
    pub horizon: f64,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub sample_count: usize,
}

/// One per-sample value; `check` names the quantity and `param` its parameter
/// (the order, the horizon, or 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemigroupSample {
    pub check: String,
    pub seed: u64,
    pub band: String,
    pub modes: usize,
    pub param: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemigroupAuditReport {
    pub alpha: f64,
    pub s: f64,
    pub smoothing: Vec<SmoothingResult>,
    pub max_regularity: Vec<MaxRegularityResult>,
    /// `(max - min) / max` of the per-horizon maxima.
    pub max_regularity_spread: f64,
    /// `max |2∫… / ‖a‖²_{Ḣ^{s+α}} - 1|`.
    pub characterization_error: f64,
    /// `‖a‖²_{Ḣ^{s+α}} / (½∫…)` over the corpus as `[min, max]`.
    pub printed_prefactor_gap: [f64; 2],
    /// `max functional / ‖a‖_{Ḣ^{s+α}}`.
    pub free_functional_max: f64,
    #[serde(skip)]
    pub samples: Vec<SemigroupSample>,
}

/// Nonzero modes of `f` as `(|ξ|, |ξ|^{2s}|f̂|²)`; every smoothing ratio of `f`
/// is a function of this list alone.
fn spectrum(f: &ScalarField, s: f64) -> Vec<(f64, f64)> {
    let q = f.grid().xi_norm();
    f.coeffs()
        .iter()
        .enumerate()
        .filter(|(i, c)| *i != 0 && c.norm_sqr() > 0.0)
        .map(|(i, c)| (q[i], q[i].powf(2.0 * s) * c.norm_sqr()))
        .collect()
}

/// `t^r ‖(-Δ)^{rα} S(t) f‖_{Ḣ^s} / ‖f‖_{Ḣ^s}` from a spectrum list.
fn smoothing_from_spectrum(spec: &[(f64, f64)], t: f64, alpha: f64, r: f64) -> f64 {
    let total: f64 = spec.iter().map(|p| p.1).sum();
    let num: f64 = spec
        .iter()
        .map(|&(q, e)| {
            let y = t * q.powf(2.0 * alpha);
            // (t^r |ξ|^{2rα} e^{-y})² = y^{2r} e^{-2y}
            e * (y.powf(2.0 * r) * (-2.0 * y).exp())
        })
        .sum();
    (num / total).sqrt()
}

fn sweep(spec: &[(f64, f64)], times: &[f64], alpha: f64, r: f64) -> f64 {
    times
        .iter()
        .map(|&t| smoothing_from_spectrum(spec, t, alpha, r))
        .fold(0.0, f64::max)
}

struct PointResult {
    smoothing: Vec<f64>,
    max_regularity: Vec<f64>,
    characterization: f64,
    printed_gap: f64,
    functional: f64,
}

/// Cosine terms in the random time profile of a max-regularity forcing.
const PROFILE_TERMS: usize = 8;
const PROFILE_STREAM: u64 = 3 << 32;

/// `Σ_j c_j cos(jπx)` on `x ∈ [0, 1]`.
fn profile(c: &[f64], x: f64) -> f64 {
    c.iter()
        .enumerate()
        .map(|(j, cj)| cj * (j as f64 * std::f64::consts::PI * x).cos())
        .sum()
}

fn evaluate(pt: &SamplePoint, spec: &SemigroupAuditSpec, times: &[f64]) -> Result<PointResult> {
    let (alpha, s) = (spec.alpha, spec.s);
    let a = pt.scalar()?;
    let b = pt.second_scalar()?;
    let sp = spectrum(&a, s);
    let mut rng = ChaCha8Rng::seed_from_u64(pt.seed.wrapping_add(PROFILE_STREAM));
    let mut coeffs = || -> Vec<f64> { (0..PROFILE_TERMS).map(|_| StandardNormal.sample(&mut rng)).collect() };
    let (pa, pb) = (coeffs(), coeffs());
    let smoothing = spec
        .smoothing_orders
        .iter()
        .map(|&r| sweep(&sp, times, alpha, r))
        .collect();
    let max_regularity = spec
        .horizons
        .iter()
        .map(|&horizon| {
            let time = TimeGrid::new(horizon, spec.time_steps)?;
            let f = Trajectory::from_fn(time, NormIndices::uniform(s), |t| {
                let x = t / horizon;
                let mut g = a.scaled(profile(&pa, x));
                g.axpy(profile(&pb, x), &b);
                g
            })?;
            max_regularity_ratio(&f, alpha, s)
        })
        .collect::<Result<Vec<_>>>()?;
    let norm_sq = a.hdot_norm_sq(s + alpha);
    let characterization = (char_integral(&a, alpha, s)? / norm_sq - 1.0).abs();
    let printed_gap = norm_sq / (0.5 * char_integral_raw(&a, alpha, s)?);
    let free = free_solution(&a, alpha, s, TimeGrid::new(1.0, spec.time_steps)?)?;
    let functional = free_functional(&free, alpha)?.total() / norm_sq.sqrt();
    Ok(PointResult {
        smoothing,
        max_regularity,
        characterization,
        printed_gap,
        functional,
    })
}

fn max_of(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, f64::max)
}

pub fn semigroup_audit(spec: &SemigroupAuditSpec) -> Result<SemigroupAuditReport> {
    spec.validate()?;
    let times = spec.smoothing_times();
    let points = spec.corpus.samples()?;
    let results = points
        .par_iter()
        .map(|p| evaluate(p, spec, &times))
        .collect::<Result<Vec<_>>>()?;

    let mut samples = Vec::new();
    for (p, r) in points.iter().zip(&results) {
        let row = |check: &str, param: f64, value: f64| SemigroupSample {
            check: check.into(),
            seed: p.seed,
            band: spec.corpus.bands[p.band].name.clone(),
            modes: p.grid.modes(),
            param,
            value,
        };
        for (o, v) in spec.smoothing_orders.iter().zip(&r.smoothing) {
            samples.push(row("smoothing", *o, *v));
        }
        for (t, v) in spec.horizons.iter().zip(&r.max_regularity) {
            samples.push(row("max_regularity", *t, *v));
        }
        samples.push(row("characterization_error", 0.0, r.characterization));
        samples.push(row("free_functional", 0.0, r.functional));
    }

    let grid = &spec.corpus.grids()?[0];
    let mut e1 = vec![0; grid.dim()];
    e1[0] = 1;
    let single = spectrum(
        &ScalarField::real_mode(grid, &e1, rustfft::num_complex::Complex64::new(1.0, 0.0))?,
        spec.s,
    );
    let smoothing = spec
        .smoothing_orders
        .iter()
        .enumerate()
        .map(|(j, &r)| SmoothingResult {
            order: r,
            bound: smoothing_bound(1.0, r),
            max_ratio: max_of(results.iter().map(|x| x.smoothing[j])),
            single_mode_ratio: sweep(&single, &times, spec.alpha, r),
        })
        .collect();
    let max_regularity: Vec<MaxRegularityResult> = spec
        .horizons
        .iter()
        .enumerate()
        .map(|(j, &horizon)| {
            let mut v: Vec<f64> = results.iter().map(|x| x.max_regularity[j]).collect();
            MaxRegularityResult {
                horizon,
                max_ratio: max_of(v.iter().copied()),
                median_ratio: median(&mut v),
                sample_count: v.len(),
            }
        })
        .collect();
    let maxima: Vec<f64> = max_regularity.iter().map(|m| m.max_ratio).collect();
    let hi = max_of(maxima.iter().copied());
    let lo = maxima.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SemigroupAuditReport {
        alpha: spec.alpha,
        s: spec.s,
        smoothing,
        max_regularity,
        max_regularity_spread: if hi > 0.0 { (hi - lo) / hi } else { 0.0 },
        characterization_error: max_of(results.iter().map(|x| x.characterization)),
        printed_prefactor_gap: [
            results.iter().map(|x| x.printed_gap).fold(f64::INFINITY, f64::min),
            max_of(results.iter().map(|x| x.printed_gap)),
        ],
        free_functional_max: max_of(results.iter().map(|x| x.functional)),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::smoothing_ratio;

    #[test]
    fn spectrum_shortcut_matches_field_computation() {
        let spec = SemigroupAuditSpec::standard();
        let pt = &spec.corpus.with_seeds(vec![5]).samples().unwrap()[0];
        let f = pt.scalar().unwrap();
        let sp = spectrum(&f, 0.3);
        for (t, r) in [(0.01, 0.5), (0.7, 1.0), (3.0, 2.0)] {
            let direct = smoothing_ratio(&f, t, 0.9, r * 0.9, 0.3).unwrap();
            let fast = smoothing_from_spectrum(&sp, t, 0.9, r);
            assert!((direct - fast).abs() < 1e-13 * direct.max(1e-300), "{direct} {fast}");
        }
    }

    #[test]
    fn small_audit_respects_bounds() {
        let mut spec = SemigroupAuditSpec::standard();
        spec.corpus = spec.corpus.with_seeds(vec![1, 2]).with_resolutions(vec![16]);
        spec.time_steps = 16;
        let r = semigroup_audit(&spec).unwrap();
        for s in &r.smoothing {
            assert!(s.max_ratio <= s.bound + 1e-12);
        }
        assert!(r.max_regularity.iter().all(|m| m.max_ratio <= 3.0));
        assert!(r.characterization_error < 1e-12);
        assert_eq!(r.samples.len(), 6 * (3 + 3 + 2));
    }
}
