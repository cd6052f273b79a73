//! Ready-made scenarios: the buck converter (Scenario I), the DC motor
//! (Scenario II) and the transient tests on the two benchmark plants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::plant::double_lag;
use super::{
    ControllerPipeline, DisturbanceProfile, DisturbanceSegment, DisturbanceShape, NoiseSpec,
    PlantModel, ReferenceSignal, ReferenceSpec, SimError, SimScenario,
};
use crate::discretize::{ceq2_z, eadrc_fb_z, eadrc_pf_z, pid_z};
use crate::synth::{
    bandwidth_tune, make_controller, pid_from_adrc, AdrcGains, ControllerKind, ControllerParams,
    Dof, FilterSpec, PidParams,
};
use crate::tf::RationalTF;

const DEFAULT_SUBSTEPS: usize = 10;

pub const DISTURBANCE_NOTE: &str =
    "disturbance profile is a reproduction default (step at 1.5 s, 2 Hz sine burst from 3 s to 4 s)";

/// Averaged buck converter, `y'' = -y'/(CR) - y/(CL) + Vin/(CL) (u + w)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuckConverter {
    pub r_ohm: f64,
    pub c_farad: f64,
    pub l_henry: f64,
    pub vin_volt: f64,
}

impl Default for BuckConverter {
    fn default() -> Self {
        Self {
            r_ohm: 50.0,
            c_farad: 0.001,
            l_henry: 0.01,
            vin_volt: 20.0,
        }
    }
}

impl BuckConverter {
    pub fn plant(&self) -> PlantModel {
        let cl = self.c_farad * self.l_henry;
        PlantModel::SecondOrderInputDisturbed {
            a1: 1.0 / (self.c_farad * self.r_ohm),
            a0: 1.0 / cl,
            b: self.vin_volt / cl,
        }
    }

    pub fn b0(&self) -> f64 {
        self.vin_volt / (self.c_farad * self.l_henry)
    }
}

/// Armature-controlled DC motor with speed output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DcMotor {
    pub ra_ohm: f64,
    pub la_henry: f64,
    pub je_kgm2: f64,
    pub fe: f64,
    pub kem: f64,
    pub kme: f64,
}

impl Default for DcMotor {
    fn default() -> Self {
        Self {
            ra_ohm: 8.9,
            la_henry: 4.5e-3,
            je_kgm2: 8e-5,
            fe: 12e-5,
            kem: 0.105,
            kme: 0.105,
        }
    }
}

impl DcMotor {
    pub fn plant(&self) -> PlantModel {
        let lj = self.la_henry * self.je_kgm2;
        PlantModel::SecondOrderInputDisturbed {
            a1: (self.la_henry * self.fe + self.ra_ohm * self.je_kgm2) / lj,
            a0: (self.ra_ohm * self.fe + self.kem * self.kme) / lj,
            b: self.kem / lj,
        }
    }

    pub fn b0(&self) -> f64 {
        self.kem / (self.je_kgm2 * self.la_henry)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum ScenarioOneVariant {
    /// Filtered PID with `F_Y = 1/(Tf s + 1)`.
    Pid {
        tf: f64,
    },
    Eadrc,
    /// The same PID followed by `C_EQ2`.
    PidPlusCeq2 {
        tf: f64,
    },
}

impl fmt::Display for ScenarioOneVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioOneVariant::Pid { tf } => write!(f, "1DOF PID (Tf={tf})"),
            ScenarioOneVariant::Eadrc => write!(f, "1DOF eADRC"),
            ScenarioOneVariant::PidPlusCeq2 { tf } => write!(f, "1DOF PID+CEQ2 (Tf={tf})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum ScenarioTwoVariant {
    Eadrc1Dof,
    /// Reference filter `F_R = 1/(tr s + 1)`.
    Eadrc2Dof {
        tr: f64,
    },
}

impl fmt::Display for ScenarioTwoVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioTwoVariant::Eadrc1Dof => write!(f, "1DOF eADRC"),
            ScenarioTwoVariant::Eadrc2Dof { tr } => write!(f, "2DOF eADRC (Tr={tr})"),
        }
    }
}

/// Step at 1.5 s plus a two-period 2 Hz sine burst between 3 s and 4 s.
pub fn default_disturbance(step: f64, sine_amp: f64) -> DisturbanceProfile {
    DisturbanceProfile {
        segments: vec![
            DisturbanceSegment {
                t_start: 1.5,
                t_end: None,
                shape: DisturbanceShape::Step { level: step },
            },
            DisturbanceSegment {
                t_start: 3.0,
                t_end: Some(4.0),
                shape: DisturbanceShape::Sine {
                    amp: sine_amp,
                    freq_hz: 2.0,
                    phase: 0.0,
                },
            },
        ],
    }
}

pub fn scenario_one_gains() -> AdrcGains {
    bandwidth_tune(2, 45.0, 45.0, BuckConverter::default().b0()).expect("valid tuning")
}

pub fn scenario_two_gains() -> AdrcGains {
    bandwidth_tune(2, 50.0, 12.0, DcMotor::default().b0()).expect("valid tuning")
}

/// Buck-converter voltage tracking at `Ts = 1e-4 s` over 6 s, square
/// reference shaped by `1/(0.1 s + 1)^2`.
pub fn scenario_one(variant: ScenarioOneVariant, seed: u64) -> Result<SimScenario, SimError> {
    let ts = 1e-4;
    let g = scenario_one_gains();
    let pid_with = |tf: f64| -> Result<PidParams, SimError> {
        Ok(pid_from_adrc(&g)?.with_output_filter(FilterSpec::FirstOrder { t: tf }))
    };
    let feedback = match variant {
        ScenarioOneVariant::Pid { tf } => vec![pid_z(&pid_with(tf)?, ts)?.oracle],
        ScenarioOneVariant::Eadrc => vec![eadrc_fb_z(&g, ts)?.oracle],
        ScenarioOneVariant::PidPlusCeq2 { tf } => vec![
            pid_z(&pid_with(tf)?, ts)?.oracle,
            ceq2_z(&g, tf, ts)?.oracle,
        ],
    };
    Ok(SimScenario {
        label: format!("Scenario I, {variant}"),
        plant: BuckConverter::default().plant(),
        controller: ControllerPipeline::new(vec![], feedback)?,
        reference: ReferenceSpec {
            signal: ReferenceSignal::square(1.0),
            shaping: double_lag(0.1),
        },
        disturbance: default_disturbance(0.2, 0.1),
        noise: NoiseSpec {
            power: 1e-7,
            sample_time: ts,
            seed,
            t_on: 0.0,
        },
        ts,
        t_end: 6.0,
        substeps: DEFAULT_SUBSTEPS,
        notes: vec![DISTURBANCE_NOTE.into()],
    })
}

/// DC-motor speed tracking at `Ts = 1e-3 s` over 6 s, square reference
/// shaped by `1/(0.05 s + 1)^2`, `beta = 0.6` in the 2DOF form.
pub fn scenario_two(variant: ScenarioTwoVariant, seed: u64) -> Result<SimScenario, SimError> {
    let ts = 1e-3;
    let g = scenario_two_gains();
    let feedback = vec![eadrc_fb_z(&g, ts)?.oracle];
    let prefilter = match variant {
        ScenarioTwoVariant::Eadrc1Dof => vec![],
        ScenarioTwoVariant::Eadrc2Dof { tr } => {
            let pid = pid_from_adrc(&g)?.with_output_filter(FilterSpec::Unity);
            vec![eadrc_pf_z(&g, &pid, 0.6, tr, ts)?.oracle]
        }
    };
    Ok(SimScenario {
        label: format!("Scenario II, {variant}"),
        plant: DcMotor::default().plant(),
        controller: ControllerPipeline::new(prefilter, feedback)?,
        reference: ReferenceSpec {
            signal: ReferenceSignal::square(1.0),
            shaping: double_lag(0.05),
        },
        disturbance: default_disturbance(0.2, 0.1),
        noise: NoiseSpec {
            power: 1e-5,
            sample_time: ts,
            seed,
            t_on: 0.0,
        },
        ts,
        t_end: 6.0,
        substeps: DEFAULT_SUBSTEPS,
        notes: vec![DISTURBANCE_NOTE.into()],
    })
}

/// Benchmark plant order for the transient tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BenchmarkPlant {
    /// `e^{-0.2 s}/(s + 1)`
    FirstOrder,
    /// `1/(s + 1)^2`
    SecondOrder,
}

impl BenchmarkPlant {
    pub fn tf(&self) -> RationalTF {
        match self {
            BenchmarkPlant::FirstOrder => RationalTF::s(&[1.0], &[1.0, 1.0])
                .with_delay(0.2)
                .expect("non-negative delay"),
            BenchmarkPlant::SecondOrder => double_lag(1.0),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            BenchmarkPlant::FirstOrder => 1,
            BenchmarkPlant::SecondOrder => 2,
        }
    }

    /// PI (`Kp = 1, Ki = 2.5`) or filtered PID (`30, 27, 5, Tf = 0.05`).
    pub fn pid(&self) -> PidParams {
        match self {
            BenchmarkPlant::FirstOrder => PidParams::pi(1.0, 2.5),
            BenchmarkPlant::SecondOrder => {
                PidParams::pid(30.0, 27.0, 5.0, FilterSpec::FirstOrder { t: 0.05 })
            }
        }
    }

    pub fn pid_kind(&self) -> ControllerKind {
        match self {
            BenchmarkPlant::FirstOrder => ControllerKind::Pi,
            BenchmarkPlant::SecondOrder => ControllerKind::Pid,
        }
    }

    /// `(2.7, 15, 1)` or `(4, 7, 1)` as `(omega_cl, k_eso, b0)`.
    pub fn eadrc_gains(&self) -> AdrcGains {
        let (w, k) = match self {
            BenchmarkPlant::FirstOrder => (2.7, 15.0),
            BenchmarkPlant::SecondOrder => (4.0, 7.0),
        };
        bandwidth_tune(self.order(), w, k, 1.0).expect("valid tuning")
    }

    /// Reference weights compared for this plant.
    pub fn betas(&self) -> [f64; 2] {
        match self {
            BenchmarkPlant::FirstOrder => [0.7, 0.3],
            BenchmarkPlant::SecondOrder => [0.75, 0.65],
        }
    }
}

impl FromStr for BenchmarkPlant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "1" | "n1" | "first-order" => Ok(BenchmarkPlant::FirstOrder),
            "2" | "n2" | "second-order" => Ok(BenchmarkPlant::SecondOrder),
            other => Err(format!("unknown benchmark plant {other:?}")),
        }
    }
}

/// Reference filter used by every 2DOF benchmark structure.
pub const BENCHMARK_FR: FilterSpec = FilterSpec::FirstOrder { t: 0.001 };

/// Continuous controller for a benchmark plant. `beta` is ignored for 1DOF.
pub fn benchmark_controller(
    plant: BenchmarkPlant,
    kind: ControllerKind,
    dof: Dof,
    beta: f64,
) -> Result<crate::synth::TwoDofController, SimError> {
    let (b, fr) = match dof {
        Dof::One => (1.0, FilterSpec::Unity),
        Dof::Two => (beta, BENCHMARK_FR),
    };
    let params = match kind {
        ControllerKind::Eadrc => ControllerParams::Eadrc {
            gains: plant.eadrc_gains(),
            beta: b,
            fr,
        },
        _ => ControllerParams::Pid(plant.pid().with_beta(b).with_reference_filter(fr)),
    };
    let kind = match kind {
        ControllerKind::Eadrc => ControllerKind::Eadrc,
        _ => plant.pid_kind(),
    };
    Ok(make_controller(kind, dof, &params)?)
}

/// Transient test on a benchmark plant: unit step reference shaped by
/// `1/(0.01 s + 1)^2`, input step of `disturbance_level` from 10 s, noise
/// (`Pn = 1e-7`, `Tn = 1 ms`) from 15 s, controller Euler-discretized at
/// `Ts = 1e-4 s`, 20 s run.
pub fn transient_test(
    plant: BenchmarkPlant,
    kind: ControllerKind,
    dof: Dof,
    beta: f64,
    seed: u64,
) -> Result<SimScenario, SimError> {
    let ts = 1e-4;
    let c = benchmark_controller(plant, kind, dof, beta)?;
    Ok(SimScenario {
        label: format!("transient test n={}, {}", plant.order(), c.label),
        plant: PlantModel::LinearTf { tf: plant.tf() },
        controller: ControllerPipeline::from_continuous(&c, ts)?,
        reference: ReferenceSpec {
            signal: ReferenceSignal::Step {
                amplitude: 1.0,
                t_step: 0.0,
            },
            shaping: double_lag(0.01),
        },
        disturbance: DisturbanceProfile {
            segments: vec![DisturbanceSegment {
                t_start: 10.0,
                t_end: None,
                shape: DisturbanceShape::Step {
                    level: TRANSIENT_DISTURBANCE,
                },
            }],
        },
        noise: NoiseSpec {
            power: 1e-7,
            sample_time: 1e-3,
            seed,
            t_on: 15.0,
        },
        ts,
        t_end: 20.0,
        substeps: DEFAULT_SUBSTEPS,
        notes: vec![format!(
            "step disturbance level {TRANSIENT_DISTURBANCE} is a reproduction default"
        )],
    })
}

/// Input step applied at 10 s in the transient tests.
pub const TRANSIENT_DISTURBANCE: f64 = 0.5;
