//! Mild solutions of the coupled system by Picard iteration, with an ETD2
//! marching oracle, measured map constants and scaling/uniqueness probes.

mod config;
mod constants;
mod data;
mod etd;
mod maps;
mod picard;
mod probe;
mod scaling;
mod state;

pub use config::{Constants, Mode, SolverConfig};
pub use constants::{
    estimate_constants, measure_constants, ConstantStats, ConstantsReport, ConstantsSample,
    ConstantsSpec, SampleRatios,
};
pub use data::{data_norms, initial_data, Amplitude, DataSpec};
pub use etd::{
    cross_check, etd_march, CrossCheck, EtdErrors, EtdRun, BLOW_UP_FACTOR, CROSS_CHECK_FACTOR,
};
pub use maps::{
    forcing, map_l, map_phi, map_psi, mild_map, xt_norm, yt_norm, Forcing, ScalarTrajectory,
    VelocityTrajectory,
};
pub use picard::{
    lambda1, picard_solve, FinalNorms, FixedPointReport, PicardOutcome, PicardRun,
    ThresholdStatus, DISCRIMINANT_NOISE, DIVERGENCE_FACTOR,
};
pub use probe::{uniqueness_probe, ProbeParams, ProbeReport, SAME_DATA_TOL};
pub use scaling::{rescale, scaling_check, ScalingReport, NONCRITICAL_OFFSET};
pub use state::{recover_pressure, BoussinesqState, SeriesRow};
