//! Sampled-data closed-loop simulation: continuous plant integrated with
//! RK4, discrete controller with zero-order hold, input disturbance and
//! measurement noise.

mod metrics;
mod plant;
mod presets;
mod run;
mod signals;

pub use metrics::{compute_metrics, Metrics};
pub use plant::PlantModel;
pub use presets::{
    benchmark_controller, default_disturbance, scenario_one, scenario_one_gains, scenario_two,
    scenario_two_gains, transient_test, BenchmarkPlant, BuckConverter, DcMotor, ScenarioOneVariant,
    ScenarioTwoVariant, BENCHMARK_FR, DISTURBANCE_NOTE, TRANSIENT_DISTURBANCE,
};
pub use run::{run_closed_loop, ControllerPipeline, SimScenario, SimTrace};
pub use signals::{
    DisturbanceProfile, DisturbanceSegment, DisturbanceShape, NoiseSource, NoiseSpec,
    ReferenceSignal, ReferenceSpec,
};

use thiserror::Error;

use crate::discretize::DiscretizeError;
use crate::synth::SynthError;
use crate::tf::TfError;

/// Second-order low-pass `1/(t s + 1)^2`, the reference shaping filter used
/// throughout.
pub fn double_lag(t: f64) -> crate::tf::RationalTF {
    plant::double_lag(t)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("state diverged at t = {t} s (magnitude {value})")]
    NonFiniteState { t: f64, value: f64 },
    #[error("empty trace")]
    EmptyTrace,
    #[error(transparent)]
    Discretize(#[from] DiscretizeError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Tf(#[from] TfError),
}
