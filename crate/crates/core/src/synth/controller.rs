use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    build_ceq, build_eadrc_fb, build_pid_fb, build_pid_pf, pid_from_adrc, AdrcGains, FilterSpec,
    PidParams, SynthError,
};
use crate::tf::{tf_inverse, tf_series, Domain, RationalTF};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    Pi,
    Pid,
    Eadrc,
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ControllerKind::Pi => "PI",
            ControllerKind::Pid => "PID",
            ControllerKind::Eadrc => "eADRC",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dof {
    One,
    Two,
}

impl fmt::Display for Dof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dof::One => "1DOF",
            Dof::Two => "2DOF",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ControllerParams {
    Pid(PidParams),
    /// `beta` and `fr` only matter for the 2DOF form; the equivalence fixes
    /// the PI/PID gains but leaves these free.
    Eadrc {
        gains: AdrcGains,
        beta: f64,
        fr: FilterSpec,
    },
}

impl ControllerParams {
    pub fn eadrc(gains: AdrcGains) -> Self {
        ControllerParams::Eadrc {
            gains,
            beta: 1.0,
            fr: FilterSpec::Unity,
        }
    }
}

/// Control law `u = C_FB (C_PF r - y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoDofController {
    pub prefilter: RationalTF,
    pub feedback: RationalTF,
    pub kind: ControllerKind,
    pub dof: Dof,
    pub label: String,
}

impl TwoDofController {
    pub fn is_proper(&self) -> bool {
        self.prefilter.is_proper() && self.feedback.is_proper()
    }
}

/// Assembles prefilter and feedback for one controller structure.
///
/// The 2DOF eADRC prefilter is `C_PF^{PI/PID} C_EQ^{-1}`. With `F_R = 1` it is
/// improper; that is allowed for frequency analysis but cannot be simulated.
pub fn make_controller(
    kind: ControllerKind,
    dof: Dof,
    params: &ControllerParams,
) -> Result<TwoDofController, SynthError> {
    let (prefilter, feedback, label) = match (kind, params) {
        (ControllerKind::Pi | ControllerKind::Pid, ControllerParams::Pid(p)) => {
            if kind == ControllerKind::Pi && !p.is_pi() {
                return Err(SynthError::Inconsistent(
                    "PI controller with nonzero Kd or an output filter".into(),
                ));
            }
            if dof == Dof::One && (p.beta != 1.0 || !p.fr.is_unity()) {
                return Err(SynthError::Inconsistent(
                    "1DOF controller cannot use beta or a reference filter".into(),
                ));
            }
            let fb = build_pid_fb(p)?;
            let pf = match dof {
                Dof::One => RationalTF::gain(1.0, Domain::S),
                Dof::Two => build_pid_pf(p)?,
            };
            (pf, fb, format!("{dof} {kind}"))
        }
        (ControllerKind::Eadrc, ControllerParams::Eadrc { gains, beta, fr }) => {
            let fb = build_eadrc_fb(gains)?;
            let pf = match dof {
                Dof::One => {
                    if *beta != 1.0 || !fr.is_unity() {
                        return Err(SynthError::Inconsistent(
                            "1DOF controller cannot use beta or a reference filter".into(),
                        ));
                    }
                    RationalTF::gain(1.0, Domain::S)
                }
                Dof::Two => {
                    let pid = pid_from_adrc(gains)?
                        .with_beta(*beta)
                        .with_reference_filter(*fr);
                    eadrc_prefilter(gains, &pid)?
                }
            };
            (pf, fb, format!("{dof} {kind} n={}", gains.n))
        }
        _ => {
            return Err(SynthError::Inconsistent(format!(
                "{kind} requested with mismatched parameter family"
            )))
        }
    };
    Ok(TwoDofController {
        prefilter,
        feedback,
        kind,
        dof,
        label,
    })
}

/// `C_PF^{PI/PID}(pid) * C_EQ(gains, pid.fy)^{-1}`.
pub(crate) fn eadrc_prefilter(
    gains: &AdrcGains,
    pid: &PidParams,
) -> Result<RationalTF, SynthError> {
    // build_pid_pf checks properness of its own factor only
    let pid_pf = pid_prefilter_unchecked(pid)?;
    let ceq = build_ceq(gains, &pid.fy)?;
    Ok(tf_series(&pid_pf, &tf_inverse(&ceq)?)?)
}

fn pid_prefilter_unchecked(pid: &PidParams) -> Result<RationalTF, SynthError> {
    match build_pid_pf(pid) {
        Err(SynthError::ImproperResult { .. }) => {
            let num = &crate::tf::Polynomial::new(vec![pid.ki, pid.kp * pid.beta]) * &pid.fy.den();
            let den = &crate::tf::Polynomial::new(vec![pid.ki, pid.kp, pid.kd]) * &pid.fr.den();
            Ok(RationalTF::new(num, den, Domain::S)?)
        }
        other => other,
    }
}
