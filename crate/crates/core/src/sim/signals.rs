use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::tf::{Domain, RationalTF};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DisturbanceShape {
    Step {
        level: f64,
    },
    /// Zero at `t_start`, then rising at `rate` per second.
    Ramp {
        rate: f64,
    },
    /// `amp sin(2 pi freq_hz (t - t_start) + phase)`
    Sine {
        amp: f64,
        freq_hz: f64,
        phase: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceSegment {
    pub t_start: f64,
    /// Segment switches off at `t_end` when set.
    #[serde(default)]
    pub t_end: Option<f64>,
    pub shape: DisturbanceShape,
}

impl DisturbanceSegment {
    fn active(&self, t: f64) -> bool {
        t >= self.t_start && self.t_end.is_none_or(|e| t < e)
    }

    fn shape_value(&self, t: f64) -> f64 {
        let tau = t - self.t_start;
        match self.shape {
            DisturbanceShape::Step { level } => level,
            DisturbanceShape::Ramp { rate } => rate * tau,
            DisturbanceShape::Sine {
                amp,
                freq_hz,
                phase,
            } => amp * (TAU * freq_hz * tau + phase).sin(),
        }
    }
}

/// Input disturbance as a sum of piecewise segments. Zero for `t < 0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceProfile {
    pub segments: Vec<DisturbanceSegment>,
}

impl DisturbanceProfile {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let mut prev = f64::NEG_INFINITY;
        for s in &self.segments {
            if !(s.t_start.is_finite() && s.t_start >= 0.0) || s.t_start < prev {
                return Err(SimError::InvalidScenario(
                    "disturbance segments need finite, non-decreasing t_start >= 0".into(),
                ));
            }
            if s.t_end.is_some_and(|e| e.is_nan() || e <= s.t_start) {
                return Err(SimError::InvalidScenario(format!(
                    "disturbance segment ends at or before its start ({})",
                    s.t_start
                )));
            }
            prev = s.t_start;
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_switched(t, t)
    }

    /// Segment on/off decided at `t_switch`, waveform evaluated at `t`.
    /// Lets an integrator step treat switching instants on its grid as
    /// belonging wholly to one step.
    pub(crate) fn eval_switched(&self, t: f64, t_switch: f64) -> f64 {
        self.segments
            .iter()
            .filter(|s| s.active(t_switch))
            .map(|s| s.shape_value(t))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.segments.is_empty()
    }
}

/// Band-limited white noise: zero-mean Gaussian samples of variance
/// `power / sample_time`, held for `sample_time`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub power: f64,
    pub sample_time: f64,
    pub seed: u64,
    /// Noise is zero before this time.
    pub t_on: f64,
}

impl NoiseSpec {
    pub fn off() -> Self {
        Self {
            power: 0.0,
            sample_time: 1.0,
            seed: 0,
            t_on: 0.0,
        }
    }

    pub fn variance(&self) -> f64 {
        self.power / self.sample_time
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.power >= 0.0 && self.power.is_finite())
            || !(self.sample_time > 0.0 && self.sample_time.is_finite())
            || !self.t_on.is_finite()
        {
            return Err(SimError::InvalidScenario(format!(
                "invalid noise spec {self:?}"
            )));
        }
        Ok(())
    }
}

/// Sequential generator for a [`NoiseSpec`]. Sample `k` is the same
/// regardless of `t_on` or of which times are queried.
#[derive(Clone, Debug)]
pub struct NoiseSource {
    spec: NoiseSpec,
    rng: ChaCha8Rng,
    std: f64,
    next_index: u64,
    current: f64,
}

impl NoiseSource {
    pub fn new(spec: NoiseSpec) -> Self {
        Self {
            spec,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            std: spec.variance().sqrt(),
            next_index: 0,
            current: 0.0,
        }
    }

    /// Held sample at time `t`. Times must be non-decreasing.
    pub fn sample(&mut self, t: f64) -> f64 {
        if self.spec.power == 0.0 {
            return 0.0;
        }
        // guard against k * Ts / Tn landing just below an integer
        let idx = (t / self.spec.sample_time + 1e-9).floor().max(0.0) as u64;
        while self.next_index <= idx {
            let z: f64 = StandardNormal.sample(&mut self.rng);
            self.current = self.std * z;
            self.next_index += 1;
        }
        if t < self.spec.t_on {
            0.0
        } else {
            self.current
        }
    }
}

/// Raw reference before shaping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceSignal {
    Step {
        amplitude: f64,
        t_step: f64,
    },
    /// `amplitude` for the first `duty` fraction of each period, else 0.
    Square {
        amplitude: f64,
        period: f64,
        duty: f64,
        t_start: f64,
    },
}

impl ReferenceSignal {
    pub fn square(amplitude: f64) -> Self {
        ReferenceSignal::Square {
            amplitude,
            period: 10.0,
            duty: 0.5,
            t_start: 0.0,
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            ReferenceSignal::Step { amplitude, .. } | ReferenceSignal::Square { amplitude, .. } => {
                amplitude
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ReferenceSignal::Step { amplitude, t_step } => {
                if t >= t_step {
                    amplitude
                } else {
                    0.0
                }
            }
            ReferenceSignal::Square {
                amplitude,
                period,
                duty,
                t_start,
            } => {
                if t < t_start {
                    return 0.0;
                }
                let phase = ((t - t_start) / period).fract();
                if phase < duty {
                    amplitude
                } else {
                    0.0
                }
            }
        }
    }

    /// Instants in `[0, t_end)` where the raw signal jumps.
    pub fn edges(&self, t_end: f64) -> Vec<f64> {
        match *self {
            ReferenceSignal::Step { t_step, amplitude } => {
                if t_step < t_end && amplitude != 0.0 {
                    vec![t_step]
                } else {
                    vec![]
                }
            }
            ReferenceSignal::Square {
                period,
                duty,
                t_start,
                ..
            } => {
                let mut out = Vec::new();
                let mut k = 0.0;
                loop {
                    let up = t_start + k * period;
                    if up >= t_end {
                        break;
                    }
                    out.push(up);
                    let down = up + duty * period;
                    if down < t_end {
                        out.push(down);
                    }
                    k += 1.0;
                }
                out
            }
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let ok = match *self {
            ReferenceSignal::Step { amplitude, t_step } => {
                amplitude.is_finite() && t_step.is_finite() && t_step >= 0.0
            }
            ReferenceSignal::Square {
                amplitude,
                period,
                duty,
                t_start,
            } => {
                amplitude.is_finite()
                    && period > 0.0
                    && period.is_finite()
                    && duty > 0.0
                    && duty < 1.0
                    && t_start >= 0.0
                    && t_start.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidScenario(format!(
                "invalid reference {self:?}"
            )))
        }
    }
}

/// Raw reference passed through a continuous shaping filter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSpec {
    pub signal: ReferenceSignal,
    pub shaping: RationalTF,
}

impl ReferenceSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        self.signal.validate()?;
        if !matches!(self.shaping.domain(), Domain::Continuous { delay } if delay == 0.0) {
            return Err(SimError::InvalidScenario(
                "reference shaping filter must be continuous and delay-free".into(),
            ));
        }
        if !self.shaping.is_proper() {
            return Err(SimError::InvalidScenario(
                "reference shaping filter is improper".into(),
            ));
        }
        Ok(())
    }
}
