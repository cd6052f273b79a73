use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::tf::{Domain, Polynomial, RationalTF};

/// Unit-DC-gain low-pass used on the reference or output channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterSpec {
    /// `1`
    #[default]
    Unity,
    /// `1 / (t s + 1)`
    FirstOrder { t: f64 },
    /// `1 / (a2 s^2 + a1 s + 1)`
    SecondOrder { a2: f64, a1: f64 },
}

impl FilterSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        match *self {
            FilterSpec::Unity => Ok(()),
            FilterSpec::FirstOrder { t } if t > 0.0 && t.is_finite() => Ok(()),
            FilterSpec::SecondOrder { a2, a1 }
                if a2 > 0.0 && a1 > 0.0 && a2.is_finite() && a1.is_finite() =>
            {
                Ok(())
            }
            other => Err(SynthError::InvalidFilter(format!("{other:?}"))),
        }
    }

    /// Denominator of the filter; the numerator is always 1.
    pub fn den(&self) -> Polynomial {
        match *self {
            FilterSpec::Unity => Polynomial::one(),
            FilterSpec::FirstOrder { t } => Polynomial::new(vec![1.0, t]),
            FilterSpec::SecondOrder { a2, a1 } => Polynomial::new(vec![1.0, a1, a2]),
        }
    }

    pub fn tf(&self) -> RationalTF {
        RationalTF::new(Polynomial::one(), self.den(), Domain::S).expect("filter denominator")
    }

    pub fn is_unity(&self) -> bool {
        matches!(self, FilterSpec::Unity)
    }
}

/// Parameters of a (possibly 2DOF, filtered) PID controller.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PidParams {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Reference weight on the proportional path.
    pub beta: f64,
    /// Output-channel filter `F_Y`.
    pub fy: FilterSpec,
    /// Reference-channel filter `F_R`.
    pub fr: FilterSpec,
}

impl PidParams {
    pub fn pi(kp: f64, ki: f64) -> Self {
        Self {
            kp,
            ki,
            kd: 0.0,
            beta: 1.0,
            fy: FilterSpec::Unity,
            fr: FilterSpec::Unity,
        }
    }

    pub fn pid(kp: f64, ki: f64, kd: f64, fy: FilterSpec) -> Self {
        Self {
            kp,
            ki,
            kd,
            beta: 1.0,
            fy,
            fr: FilterSpec::Unity,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_reference_filter(mut self, fr: FilterSpec) -> Self {
        self.fr = fr;
        self
    }

    pub fn with_output_filter(mut self, fy: FilterSpec) -> Self {
        self.fy = fy;
        self
    }

    pub fn is_pi(&self) -> bool {
        self.kd == 0.0 && self.fy.is_unity()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if ![self.kp, self.ki, self.kd, self.beta]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(SynthError::InvalidParams("non-finite gain".into()));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(SynthError::InvalidParams(format!(
                "beta = {} not in [0, 1]",
                self.beta
            )));
        }
        if self.kp == 0.0 && self.ki == 0.0 && self.kd == 0.0 {
            return Err(SynthError::InvalidParams("all gains are zero".into()));
        }
        self.fy.validate()?;
        self.fr.validate()
    }
}

/// `C_FB = (Kd s^2 + Kp s + Ki) / s * F_Y(s)`.
pub fn build_pid_fb(p: &PidParams) -> Result<RationalTF, SynthError> {
    p.validate()?;
    let num = Polynomial::new(vec![p.ki, p.kp, p.kd]);
    let den = &Polynomial::x() * &p.fy.den();
    Ok(RationalTF::new(num, den, Domain::S)?)
}

/// `C_PF = (Kp β s + Ki) / (Kd s^2 + Kp s + Ki) * F_R(s) / F_Y(s)`.
pub fn build_pid_pf(p: &PidParams) -> Result<RationalTF, SynthError> {
    p.validate()?;
    let num = &Polynomial::new(vec![p.ki, p.kp * p.beta]) * &p.fy.den();
    let den = &Polynomial::new(vec![p.ki, p.kp, p.kd]) * &p.fr.den();
    if den.is_zero() {
        return Err(SynthError::InvalidParams(
            "Kd s^2 + Kp s + Ki is zero".into(),
        ));
    }
    if !num.is_zero() && num.degree() > den.degree() {
        return Err(SynthError::ImproperResult {
            num: num.degree(),
            den: den.degree(),
        });
    }
    Ok(RationalTF::new(num, den, Domain::S)?)
}
