//! Configuration documents, one per command. Every field is required and
//! unknown fields are rejected.

use std::path::{Path, PathBuf};

use fracboussinesq::calculus::{AuditRequest, CorpusSpec};
use fracboussinesq::semigroup::SemigroupAuditSpec;
use fracboussinesq::solver::{Constants, ConstantsSpec, DataSpec, SolverConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstantsSource {
    /// Estimate `k₁, k₂, k₃` on a random corpus before solving.
    Measure(ConstantsSpec),
    Given(Constants),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Generate(DataSpec),
    /// Field snapshot files, relative to the configuration file.
    Snapshots { velocity: PathBuf, theta: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub solver: SolverConfig,
    pub constants: ConstantsSource,
    pub data: DataSource,
    /// Also march with ETD2 and compare.
    pub etd_check: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub solver: SolverConfig,
    pub constants: ConstantsSource,
    pub data: DataSource,
    /// Powers of two.
    pub lambdas: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub solver: SolverConfig,
    pub constants: ConstantsSource,
    pub data: DataSource,
    pub c_interp: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub solver: SolverConfig,
    pub corpus: ConstantsSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalculusConfig {
    pub corpus: CorpusSpec,
    pub audits: Vec<AuditRequest>,
}

pub type SemigroupConfig = SemigroupAuditSpec;

/// The parts shared by every command that solves the system.
pub struct Problem<'a> {
    pub solver: &'a SolverConfig,
    pub constants: &'a ConstantsSource,
    pub data: &'a DataSource,
}

impl SolveConfig {
    pub fn problem(&self) -> Problem<'_> {
        Problem {
            solver: &self.solver,
            constants: &self.constants,
            data: &self.data,
        }
    }
}

impl ScalingConfig {
    pub fn problem(&self) -> Problem<'_> {
        Problem {
            solver: &self.solver,
            constants: &self.constants,
            data: &self.data,
        }
    }
}

impl ProbeConfig {
    pub fn problem(&self) -> Problem<'_> {
        Problem {
            solver: &self.solver,
            constants: &self.constants,
            data: &self.data,
        }
    }
}

/// Parses `text`; errors name the offending field by its path.
pub fn parse<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        CliError::Config(format!(
            "{}: field `{}`: {}",
            path.display(),
            field,
            e.into_inner()
        ))
    })
}

/// Replaces the data seed; commands that solve take exactly one seed.
pub fn override_data_seed(data: &mut DataSource, seeds: &[u64]) -> Result<(), CliError> {
    match (data, seeds) {
        (DataSource::Generate(spec), [seed]) => {
            spec.seed = *seed;
            Ok(())
        }
        (DataSource::Generate(_), _) => Err(CliError::Config(format!(
            "--seeds takes exactly one seed for this command, got {}",
            seeds.len()
        ))),
        (DataSource::Snapshots { .. }, _) => Err(CliError::Config(
            "--seeds cannot be used with snapshot data".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOLVE: &str = r#"{
        "solver": {"n": 3, "alpha": 1.0, "horizon": 1.0, "modes": 16, "length": 6.283185307179586,
                   "time_steps": 16, "picard_tol": 1e-10, "picard_max_iters": 30, "mode": "finite_horizon"},
        "constants": {"given": {"k1": 1.5, "k2": 0.004, "k3": 0.005}},
        "data": {"generate": {"band": [1.0, 2.5], "slope": 0.0, "seed": 7,
                 "amplitude": {"threshold_fraction": {"fraction": 0.5, "velocity_share": 0.5}}}},
        "etd_check": true
    }"#;

    #[test]
    fn round_trip() {
        let c: SolveConfig = parse(SOLVE, Path::new("c.json")).unwrap();
        let again: SolveConfig = parse(&serde_json::to_string(&c).unwrap(), Path::new("c.json")).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn errors_name_the_field() {
        let bad = SOLVE.replace("\"alpha\": 1.0", "\"alpha\": \"one\"");
        let err = parse::<SolveConfig>(&bad, Path::new("c.json")).unwrap_err().to_string();
        assert!(err.contains("solver.alpha"), "{err}");
        let bad = SOLVE.replace("\"slope\"", "\"tilt\"");
        let err = parse::<SolveConfig>(&bad, Path::new("c.json")).unwrap_err().to_string();
        assert!(err.contains("tilt"), "{err}");
    }

    #[test]
    fn seed_override() {
        let mut c: SolveConfig = parse(SOLVE, Path::new("c.json")).unwrap();
        override_data_seed(&mut c.data, &[11]).unwrap();
        assert!(matches!(&c.data, DataSource::Generate(d) if d.seed == 11));
        assert!(override_data_seed(&mut c.data, &[1, 2]).is_err());
    }

    #[test]
    fn shipped_configs_parse() {
        macro_rules! check {
            ($t:ty, $file:literal) => {
                let text = include_str!(concat!("../../../configs/", $file));
                parse::<$t>(text, Path::new($file)).unwrap();
            };
        }
        check!(SolveConfig, "solve.json");
        check!(ScalingConfig, "scaling.json");
        check!(ProbeConfig, "probe.json");
        check!(ConstantsConfig, "constants.json");
        check!(CalculusConfig, "calculus.json");
        check!(SemigroupConfig, "semigroup.json");
    }
}
