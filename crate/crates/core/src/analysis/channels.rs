use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::synth::TwoDofController;
use crate::tf::{Domain, FrequencyEval, Polynomial, RationalTF, TfError};

/// Plant (possibly with input delay) closed by a 2DOF controller.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopAssembly {
    pub plant: RationalTF,
    pub controller: TwoDofController,
}

impl LoopAssembly {
    pub fn new(plant: RationalTF, controller: TwoDofController) -> Result<Self, AnalysisError> {
        let ok = plant.domain().is_continuous()
            && controller.feedback.domain() == Domain::S
            && controller.prefilter.domain() == Domain::S;
        if !ok {
            return Err(AnalysisError::NotContinuous);
        }
        Ok(Self { plant, controller })
    }

    /// `C_FB(jw) G_P(jw)`, delay included.
    pub fn loop_gain(&self, omega: f64) -> Result<Complex64, TfError> {
        Ok(self.controller.feedback.response_at(omega)? * self.plant.response_at(omega)?)
    }

    fn char_poly(&self) -> Polynomial {
        let (g, c) = (&self.plant, &self.controller.feedback);
        &(g.den() * c.den()) + &(g.num() * c.num())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    /// disturbance to output, `G_P / (1 + C_FB G_P)`
    Yd,
    /// measurement noise to control, `-C_FB / (1 + C_FB G_P)`
    Un,
    /// reference to tracking error, `1 - C_PF C_FB G_P / (1 + C_FB G_P)`
    Er,
}

/// Closed-loop channel evaluated pointwise from the loop factors, so
/// transport delay is handled exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub kind: ChannelKind,
    asm: LoopAssembly,
}

impl Channel {
    /// Rational form, available only for a delay-free plant.
    pub fn as_rational(&self) -> Option<RationalTF> {
        if self.asm.plant.has_delay() {
            return None;
        }
        let (g, c, p) = (
            &self.asm.plant,
            &self.asm.controller.feedback,
            &self.asm.controller.prefilter,
        );
        let cl = self.asm.char_poly();
        let (num, den) = match self.kind {
            ChannelKind::Yd => (g.num() * c.den(), cl),
            ChannelKind::Un => (-&(c.num() * g.den()), cl),
            ChannelKind::Er => {
                let tracked = &(p.num() * c.num()) * g.num();
                (&(p.den() * &cl) - &tracked, p.den() * &cl)
            }
        };
        RationalTF::new(num, den, Domain::S).ok()
    }
}

impl FrequencyEval for Channel {
    fn response_at(&self, omega: f64) -> Result<Complex64, TfError> {
        let g = self.asm.plant.response_at(omega)?;
        let c = self.asm.controller.feedback.response_at(omega)?;
        let one_plus = 1.0 + c * g;
        Ok(match self.kind {
            ChannelKind::Yd => g / one_plus,
            ChannelKind::Un => -c / one_plus,
            ChannelKind::Er => {
                let p = self.asm.controller.prefilter.response_at(omega)?;
                1.0 - p * c * g / one_plus
            }
        })
    }
}

pub fn channel_yd(asm: &LoopAssembly) -> Channel {
    Channel {
        kind: ChannelKind::Yd,
        asm: asm.clone(),
    }
}

pub fn channel_un(asm: &LoopAssembly) -> Channel {
    Channel {
        kind: ChannelKind::Un,
        asm: asm.clone(),
    }
}

pub fn channel_er(asm: &LoopAssembly) -> Channel {
    Channel {
        kind: ChannelKind::Er,
        asm: asm.clone(),
    }
}
