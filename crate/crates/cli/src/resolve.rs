//! Turns presets, config sections and flags into core objects.

use eqadrc::discretize::QFormat;
use eqadrc::sim::{
    scenario_one, scenario_two, transient_test, BenchmarkPlant, BuckConverter, DcMotor,
    ScenarioOneVariant, ScenarioTwoVariant, SimScenario, BENCHMARK_FR,
};
use eqadrc::synth::{
    bandwidth_tune, make_controller, pid_from_adrc, AdrcGains, ControllerKind, ControllerParams,
    Dof, FilterSpec, PidParams, TwoDofController,
};
use eqadrc::tf::RationalTF;

use crate::config::RunConfig;
use crate::{CliError, GainArgs, LoopArgs, SimArgs};

pub const PRESET_NAMES: [&str; 8] = [
    "paper-n1",
    "paper-n1-pi",
    "paper-n1-eadrc",
    "paper-n2",
    "paper-n2-pid",
    "paper-n2-eadrc",
    "scenario-1",
    "scenario-2",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Base {
    Paper(BenchmarkPlant),
    ScenarioOne,
    ScenarioTwo,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub base: Base,
    /// Controller named by the preset suffix, if any.
    pub kind: Option<ControllerKind>,
}

impl Preset {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        let Some(&name) = PRESET_NAMES.iter().find(|&&p| p == name) else {
            return Err(CliError::Usage(format!(
                "unknown preset {name:?} (available: {})",
                PRESET_NAMES.join(", ")
            )));
        };
        let (base, kind) = match name {
            "paper-n1" => (Base::Paper(BenchmarkPlant::FirstOrder), None),
            "paper-n1-pi" => (
                Base::Paper(BenchmarkPlant::FirstOrder),
                Some(ControllerKind::Pi),
            ),
            "paper-n1-eadrc" => (
                Base::Paper(BenchmarkPlant::FirstOrder),
                Some(ControllerKind::Eadrc),
            ),
            "paper-n2" => (Base::Paper(BenchmarkPlant::SecondOrder), None),
            "paper-n2-pid" => (
                Base::Paper(BenchmarkPlant::SecondOrder),
                Some(ControllerKind::Pid),
            ),
            "paper-n2-eadrc" => (
                Base::Paper(BenchmarkPlant::SecondOrder),
                Some(ControllerKind::Eadrc),
            ),
            "scenario-1" => (Base::ScenarioOne, None),
            _ => (Base::ScenarioTwo, None),
        };
        Ok(Self { name, base, kind })
    }

    /// `(n, omega_cl, k_eso, b0)`.
    pub fn tuning(&self) -> (usize, f64, f64, f64) {
        match self.base {
            Base::Paper(BenchmarkPlant::FirstOrder) => (1, 2.7, 15.0, 1.0),
            Base::Paper(BenchmarkPlant::SecondOrder) => (2, 4.0, 7.0, 1.0),
            Base::ScenarioOne => (2, 45.0, 45.0, BuckConverter::default().b0()),
            Base::ScenarioTwo => (2, 50.0, 12.0, DcMotor::default().b0()),
        }
    }

    pub fn plant(&self) -> RationalTF {
        match self.base {
            Base::Paper(p) => p.tf(),
            Base::ScenarioOne => BuckConverter::default().plant().tf(),
            Base::ScenarioTwo => DcMotor::default().plant().tf(),
        }
    }

    fn default_beta(&self) -> f64 {
        match self.base {
            Base::Paper(p) => p.betas()[0],
            _ => 0.6,
        }
    }
}

pub fn preset(flag: &Option<String>, cfg: &RunConfig) -> Result<Option<Preset>, CliError> {
    flag.as_ref()
        .or(cfg.preset.as_ref())
        .map(|n| Preset::parse(n))
        .transpose()
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn gains(
    preset: Option<&Preset>,
    cfg: &RunConfig,
    flags: &GainArgs,
) -> Result<AdrcGains, CliError> {
    let file = cfg.gains.clone().unwrap_or_default();
    let base = preset.map(|p| p.tuning());
    let missing = |what: &str, flag: &str, key: &str| {
        CliError::Usage(format!(
            "missing {what}: pass --{flag}, set [gains] {key}, or name a preset"
        ))
    };
    let n = flags
        .n
        .or(file.n)
        .or(base.map(|b| b.0))
        .ok_or_else(|| missing("plant order", "n", "n"))?;
    let w = flags
        .omega_cl
        .or(file.omega_cl_rad_s)
        .or(base.map(|b| b.1))
        .ok_or_else(|| missing("closed-loop bandwidth", "omega-cl", "omega_cl_rad_s"))?;
    let k = flags
        .k_eso
        .or(file.k_eso)
        .or(base.map(|b| b.2))
        .ok_or_else(|| missing("observer bandwidth factor", "k-eso", "k_eso"))?;
    let b0 = flags
        .b0
        .or(file.b0)
        .or(base.map(|b| b.3))
        .ok_or_else(|| missing("b0", "b0", "b0"))?;
    bandwidth_tune(n, w, k, b0).map_err(usage)
}

fn gains_given(cfg: &RunConfig, flags: &GainArgs) -> bool {
    cfg.gains.is_some()
        || flags.n.is_some()
        || flags.omega_cl.is_some()
        || flags.k_eso.is_some()
        || flags.b0.is_some()
}

fn first_order(t: f64, what: &str) -> Result<FilterSpec, CliError> {
    let f = FilterSpec::FirstOrder { t };
    f.validate()
        .map_err(|_| CliError::Usage(format!("{what} time constant must be positive, got {t}")))?;
    Ok(f)
}

/// PI/PID parameters: the `[pid]` section, else the benchmark controller of
/// a paper-n* preset, else the equivalent PI/PID of the eADRC tuning.
fn pid(
    preset: Option<&Preset>,
    cfg: &RunConfig,
    g: Option<&AdrcGains>,
) -> Result<PidParams, CliError> {
    if let Some(p) = &cfg.pid {
        let fy = match p.fy_time_constant_s {
            Some(t) => first_order(t, "F_Y")?,
            None => FilterSpec::Unity,
        };
        return Ok(PidParams::pid(p.kp, p.ki_per_s, p.kd_s, fy));
    }
    if let Some(Preset {
        base: Base::Paper(b),
        ..
    }) = preset
    {
        return Ok(b.pid());
    }
    match g {
        Some(g) => pid_from_adrc(g).map_err(usage),
        None => Err(CliError::Usage(
            "no PI/PID parameters: give a [pid] section, gains, or a preset".into(),
        )),
    }
}

pub fn parse_kind(s: &str) -> Result<ControllerKind, CliError> {
    match s {
        "pi" => Ok(ControllerKind::Pi),
        "pid" => Ok(ControllerKind::Pid),
        "eadrc" => Ok(ControllerKind::Eadrc),
        other => Err(CliError::Usage(format!(
            "unknown controller kind {other:?} (pi, pid, eadrc)"
        ))),
    }
}

pub fn parse_dof(s: &str) -> Result<Dof, CliError> {
    match s {
        "1dof" | "one" => Ok(Dof::One),
        "2dof" | "two" => Ok(Dof::Two),
        other => Err(CliError::Usage(format!(
            "unknown DOF {other:?} (1dof, 2dof)"
        ))),
    }
}

struct Structure {
    kind: ControllerKind,
    dof: Dof,
    beta: f64,
    fr: FilterSpec,
}

fn structure(
    preset: Option<&Preset>,
    cfg: &RunConfig,
    kind: Option<&str>,
    dof: Option<&str>,
    beta: Option<f64>,
) -> Result<Structure, CliError> {
    let file = cfg.controller.clone().unwrap_or_default();
    let kind = match kind.or(file.kind.as_deref()) {
        Some(k) => parse_kind(k)?,
        None => match (preset.and_then(|p| p.kind), &cfg.pid) {
            (Some(k), _) => k,
            (None, Some(p)) if p.kd_s == 0.0 && p.fy_time_constant_s.is_none() => {
                ControllerKind::Pi
            }
            (None, Some(_)) => ControllerKind::Pid,
            (None, None) => ControllerKind::Eadrc,
        },
    };
    let dof = match dof.or(file.dof.as_deref()) {
        Some(d) => parse_dof(d)?,
        None => Dof::One,
    };
    let beta = beta.or(file.beta);
    let (beta, fr) = match dof {
        Dof::One => (beta.unwrap_or(1.0), FilterSpec::Unity),
        Dof::Two => (
            beta.unwrap_or_else(|| preset.map_or(1.0, |p| p.default_beta())),
            match file.fr_time_constant_s {
                Some(t) => first_order(t, "F_R")?,
                None => BENCHMARK_FR,
            },
        ),
    };
    Ok(Structure {
        kind,
        dof,
        beta,
        fr,
    })
}

/// Plant and continuous controller for frequency-domain commands.
pub fn control_loop(
    preset: Option<&Preset>,
    cfg: &RunConfig,
    args: &LoopArgs,
) -> Result<(RationalTF, TwoDofController), CliError> {
    let plant = match (&cfg.plant, preset) {
        (Some(p), _) => RationalTF::new(
            eqadrc::tf::Polynomial::new(p.num_ascending.clone()),
            eqadrc::tf::Polynomial::new(p.den_ascending.clone()),
            eqadrc::tf::Domain::S,
        )
        .and_then(|tf| tf.with_delay(p.delay_s))
        .map_err(usage)?,
        (None, Some(p)) => p.plant(),
        (None, None) => {
            return Err(CliError::Usage(
                "no plant: name a preset or give a [plant] section".into(),
            ))
        }
    };
    let s = structure(
        preset,
        cfg,
        args.kind.as_deref(),
        args.dof.as_deref(),
        args.beta,
    )?;
    let params = match s.kind {
        ControllerKind::Eadrc => {
            let g = gains(preset, cfg, &args.gains)?;
            ControllerParams::Eadrc {
                gains: g,
                beta: s.beta,
                fr: s.fr,
            }
        }
        _ => {
            let g = if gains_given(cfg, &args.gains) || preset.is_some() {
                Some(gains(preset, cfg, &args.gains)?)
            } else {
                None
            };
            let p = pid(preset, cfg, g.as_ref())?;
            ControllerParams::Pid(p.with_beta(s.beta).with_reference_filter(s.fr))
        }
    };
    let c = make_controller(s.kind, s.dof, &params).map_err(usage)?;
    Ok((plant, c))
}

/// Simulation scenario plus the metrics window for its reference response.
pub fn scenario(
    preset: Option<&Preset>,
    cfg: &RunConfig,
    args: &SimArgs,
    seed: u64,
) -> Result<(SimScenario, (f64, f64)), CliError> {
    let Some(preset) = preset else {
        return Err(CliError::Usage(format!(
            "simulate needs a preset ({})",
            PRESET_NAMES.join(", ")
        )));
    };
    let file = cfg.simulate.clone().unwrap_or_default();
    let variant = args.variant.as_deref().or(file.variant.as_deref());
    let tf = args.tf.or(file.tf_s);
    let tr = args.tr.or(file.tr_s);
    let sim_err = |e: eqadrc::sim::SimError| CliError::from_sim(e);

    let (mut sc, window) = match preset.base {
        Base::ScenarioOne => {
            let tf = tf.unwrap_or(0.005);
            let v = match variant.unwrap_or("eadrc") {
                "pid" => ScenarioOneVariant::Pid { tf },
                "eadrc" => ScenarioOneVariant::Eadrc,
                "pid-plus-ceq2" => ScenarioOneVariant::PidPlusCeq2 { tf },
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown scenario-1 variant {other:?} (pid, eadrc, pid-plus-ceq2)"
                    )))
                }
            };
            (scenario_one(v, seed).map_err(sim_err)?, (0.0, 1.5))
        }
        Base::ScenarioTwo => {
            let v = match variant.unwrap_or("eadrc-2dof") {
                "eadrc-1dof" => ScenarioTwoVariant::Eadrc1Dof,
                "eadrc-2dof" => ScenarioTwoVariant::Eadrc2Dof {
                    tr: tr.unwrap_or(0.03),
                },
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown scenario-2 variant {other:?} (eadrc-1dof, eadrc-2dof)"
                    )))
                }
            };
            (scenario_two(v, seed).map_err(sim_err)?, (0.0, 1.5))
        }
        Base::Paper(plant) => {
            if variant.is_some() {
                return Err(CliError::Usage(
                    "paper-n* presets take --kind/--dof/--beta, not --variant".into(),
                ));
            }
            let s = structure(
                Some(preset),
                cfg,
                args.kind.as_deref(),
                args.dof.as_deref(),
                args.beta,
            )?;
            let sc = transient_test(plant, s.kind, s.dof, s.beta, seed).map_err(sim_err)?;
            (sc, (0.0, 10.0))
        }
    };

    if let Some(t) = args.t_end.or(file.t_end_s) {
        sc.t_end = t;
    }
    if let Some(n) = args.substeps.or(file.substeps) {
        sc.substeps = n;
    }
    if args.no_noise || file.noise == Some(false) {
        sc = sc.without_noise();
    }
    if args.no_disturbance || file.disturbance == Some(false) {
        sc = sc.without_disturbance();
    }
    if let Some(f) = args.frac_bits.or(file.frac_bits) {
        let q = QFormat::new(f).map_err(usage)?;
        sc.controller = sc.controller.quantized(q).map_err(sim_err)?;
        sc.notes.push(format!(
            "controller arithmetic in 64-bit fixed point, {f} fractional bits"
        ));
    }
    sc.validate().map_err(sim_err)?;
    let window: (f64, f64) = (window.0, f64::min(window.1, sc.t_end));
    Ok((sc, window))
}

/// Crib-sheet PI/PID: the equivalent PI/PID of `g` with the 2DOF knobs set.
pub fn crib_pid(
    g: &AdrcGains,
    beta: f64,
    fr: Option<f64>,
    fy: Option<f64>,
) -> Result<PidParams, CliError> {
    let mut p = pid_from_adrc(g).map_err(usage)?.with_beta(beta);
    p = p.with_reference_filter(match fr {
        Some(t) => first_order(t, "F_R")?,
        None => BENCHMARK_FR,
    });
    if let Some(t) = fy {
        p = p.with_output_filter(first_order(t, "F_Y")?);
    }
    Ok(p)
}
