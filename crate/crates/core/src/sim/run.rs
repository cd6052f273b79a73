use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::plant::StateSpace;
use super::{DisturbanceProfile, NoiseSource, NoiseSpec, PlantModel, ReferenceSpec, SimError};
use crate::discretize::{euler_discretize, quantize_controller, DiscreteController, QFormat};
use crate::synth::TwoDofController;
use crate::tf::RationalTF;

/// States larger than this are treated as divergence.
const DIVERGENCE_LIMIT: f64 = 1e12;
/// Largest factor by which the substep count may grow to fit a delay.
const MAX_SUBSTEP_GROWTH: usize = 1000;

/// Discrete control law `u = FB(PF r - y)`, each side a series of blocks.
/// An empty prefilter is unity.
#[derive(Clone, Debug, PartialEq)]
pub struct ControllerPipeline {
    pub prefilter: Vec<DiscreteController>,
    pub feedback: Vec<DiscreteController>,
}

impl ControllerPipeline {
    pub fn new(
        prefilter: Vec<DiscreteController>,
        feedback: Vec<DiscreteController>,
    ) -> Result<Self, SimError> {
        let p = Self {
            prefilter,
            feedback,
        };
        if p.feedback.is_empty() {
            return Err(SimError::InvalidScenario(
                "feedback path has no blocks".into(),
            ));
        }
        let ts = p.ts();
        if p.blocks().any(|b| b.ts() != ts) {
            return Err(SimError::InvalidScenario(
                "controller blocks use different sample times".into(),
            ));
        }
        Ok(p)
    }

    /// Euler-discretized copy of a continuous two-degree-of-freedom
    /// controller. A unit-gain prefilter is dropped.
    pub fn from_continuous(c: &TwoDofController, ts: f64) -> Result<Self, SimError> {
        let prefilter = if is_unity(&c.prefilter) {
            vec![]
        } else {
            vec![DiscreteController::new(&euler_discretize(
                &c.prefilter,
                ts,
            )?)?]
        };
        let feedback = vec![DiscreteController::new(&euler_discretize(
            &c.feedback,
            ts,
        )?)?];
        Self::new(prefilter, feedback)
    }

    pub fn ts(&self) -> f64 {
        self.feedback[0].ts()
    }

    fn blocks(&self) -> impl Iterator<Item = &DiscreteController> {
        self.prefilter.iter().chain(&self.feedback)
    }

    /// Fixed-point copy of every block.
    pub fn quantized(&self, q: QFormat) -> Result<Self, SimError> {
        let conv = |v: &[DiscreteController]| -> Result<Vec<DiscreteController>, SimError> {
            v.iter()
                .map(|b| quantize_controller(b, q).map_err(SimError::from))
                .collect()
        };
        Ok(Self {
            prefilter: conv(&self.prefilter)?,
            feedback: conv(&self.feedback)?,
        })
    }

    pub fn reset(&mut self) {
        self.prefilter
            .iter_mut()
            .for_each(DiscreteController::reset);
        self.feedback.iter_mut().for_each(DiscreteController::reset);
    }

    /// One controller period; returns `(prefiltered reference, error, u)`.
    pub fn step(&mut self, r: f64, y_meas: f64) -> (f64, f64, f64) {
        let rp = self.prefilter.iter_mut().fold(r, |v, b| b.step(v));
        let e = rp - y_meas;
        let u = self.feedback.iter_mut().fold(e, |v, b| b.step(v));
        (rp, e, u)
    }
}

fn is_unity(tf: &RationalTF) -> bool {
    tf.num().degree() == 0 && tf.den().degree() == 0 && tf.num().coeff(0) == tf.den().coeff(0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimScenario {
    pub label: String,
    pub plant: PlantModel,
    pub controller: ControllerPipeline,
    pub reference: ReferenceSpec,
    pub disturbance: DisturbanceProfile,
    pub noise: NoiseSpec,
    pub ts: f64,
    pub t_end: f64,
    /// RK4 steps per controller period.
    pub substeps: usize,
    /// Free-form remarks carried into the trace (e.g. reproduction choices).
    pub notes: Vec<String>,
}

impl SimScenario {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.ts > 0.0 && self.ts.is_finite()) {
            return Err(SimError::InvalidScenario(format!("Ts = {}", self.ts)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(SimError::InvalidScenario(format!("t_end = {}", self.t_end)));
        }
        if self.substeps == 0 {
            return Err(SimError::InvalidScenario(
                "substeps must be at least 1".into(),
            ));
        }
        if (self.controller.ts() - self.ts).abs() > 1e-12 * self.ts {
            return Err(SimError::InvalidScenario(format!(
                "controller sample time {} differs from scenario Ts {}",
                self.controller.ts(),
                self.ts
            )));
        }
        self.plant.validate()?;
        self.reference.validate()?;
        self.disturbance.validate()?;
        self.noise.validate()
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.ts).round() as usize
    }

    /// Copy with the noise switched off.
    pub fn without_noise(&self) -> Self {
        Self {
            noise: NoiseSpec {
                power: 0.0,
                ..self.noise
            },
            ..self.clone()
        }
    }

    pub fn without_disturbance(&self) -> Self {
        Self {
            disturbance: DisturbanceProfile::none(),
            ..self.clone()
        }
    }
}

/// Samples taken once per controller period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub label: String,
    pub ts: f64,
    pub substeps: usize,
    pub t: Vec<f64>,
    /// Shaped reference.
    pub r: Vec<f64>,
    pub y: Vec<f64>,
    pub y_meas: Vec<f64>,
    pub u: Vec<f64>,
    /// Prefiltered reference minus measured output.
    pub e: Vec<f64>,
    /// Input disturbance at the plant input (before any plant delay).
    pub d: Vec<f64>,
    pub notes: Vec<String>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Index of the first sample at or after `t`.
    pub fn index_at(&self, t: f64) -> usize {
        ((t / self.ts) - 1e-9)
            .ceil()
            .max(0.0)
            .min(self.len() as f64) as usize
    }

    /// CSV with header `t,r,y,y_meas,u,e,d` and 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 120 + 32);
        out.push_str("t,r,y,y_meas,u,e,d\n");
        for i in 0..self.len() {
            // adding +0.0 turns -0.0 into 0.0
            let row = [
                self.t[i],
                self.r[i],
                self.y[i],
                self.y_meas[i],
                self.u[i],
                self.e[i],
                self.d[i],
            ]
            .map(|v| v + 0.0);
            let _ = writeln!(
                out,
                "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                row[0], row[1], row[2], row[3], row[4], row[5], row[6]
            );
        }
        out
    }
}

/// Smallest substep count `>= requested` that puts the delay on the
/// integration grid.
fn fit_substeps(delay: f64, ts: f64, requested: usize) -> Result<usize, SimError> {
    if delay == 0.0 {
        return Ok(requested);
    }
    for m in requested..=requested * MAX_SUBSTEP_GROWTH {
        let ratio = delay * m as f64 / ts;
        if (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0) {
            return Ok(m);
        }
    }
    Err(SimError::InvalidScenario(format!(
        "delay {delay} s is not a multiple of any substep size near Ts/{requested}"
    )))
}

/// Sampled-data closed loop: continuous plant integrated with RK4 between
/// controller samples, control held over each period.
///
/// Each period: sample `y`, add measurement noise, step the controller on
/// the shaped reference, then integrate the plant with
/// `v = u(t - delay) + w(t - delay)` over `substeps` RK4 steps.
pub fn run_closed_loop(sc: &SimScenario) -> Result<SimTrace, SimError> {
    sc.validate()?;
    let delay = sc.plant.delay();
    let substeps = fit_substeps(delay, sc.ts, sc.substeps)?;
    let mut notes = sc.notes.clone();
    if substeps != sc.substeps {
        notes.push(format!(
            "substeps raised from {} to {} so the {} s delay is a whole number of integration steps",
            sc.substeps, substeps, delay
        ));
    }
    let h = sc.ts / substeps as f64;
    let n_delay = (delay / h).round() as usize;

    let mut plant = StateSpace::new(&sc.plant.tf())?;
    let mut shaping = StateSpace::new(&sc.reference.shaping)?;
    let mut ctrl = sc.controller.clone();
    ctrl.reset();
    let mut noise = NoiseSource::new(sc.noise);
    let mut fifo: VecDeque<f64> = std::iter::repeat_n(0.0, n_delay).collect();

    let n = sc.steps();
    let mut tr = SimTrace {
        label: sc.label.clone(),
        ts: sc.ts,
        substeps,
        t: Vec::with_capacity(n),
        r: Vec::with_capacity(n),
        y: Vec::with_capacity(n),
        y_meas: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        e: Vec::with_capacity(n),
        d: Vec::with_capacity(n),
        notes,
    };
    let raw = |t: f64| sc.reference.signal.eval(t);

    for k in 0..n {
        let t = k as f64 * sc.ts;
        // strictly proper plant: no feedthrough from the current input
        let y = plant.output(0.0);
        let y_meas = y + noise.sample(t);
        let r = shaping.output(raw(t));
        let (_, e, u) = ctrl.step(r, y_meas);
        if !u.is_finite() || u.abs() > DIVERGENCE_LIMIT {
            return Err(SimError::NonFiniteState { t, value: u });
        }
        tr.t.push(t);
        tr.r.push(r);
        tr.y.push(y);
        tr.y_meas.push(y_meas);
        tr.u.push(u);
        tr.e.push(e);
        tr.d.push(sc.disturbance.eval(t));

        for j in 0..substeps {
            let t0 = t + j as f64 * h;
            let u_applied = if n_delay > 0 {
                fifo.push_back(u);
                fifo.pop_front().expect("fifo holds n_delay entries")
            } else {
                u
            };
            let td = t0 - delay;
            let mid = td + 0.5 * h;
            let w = |s: f64| sc.disturbance.eval_switched(s, mid);
            plant.rk4(
                h,
                [u_applied + w(td), u_applied + w(mid), u_applied + w(td + h)],
            );
            // raw reference is piecewise constant; its edges sit on the grid
            let rv = raw(t0 + 0.5 * h);
            shaping.rk4(h, [rv; 3]);
        }
        let worst = plant.max_abs_state().max(shaping.max_abs_state());
        if worst.is_nan() || worst > DIVERGENCE_LIMIT {
            return Err(SimError::NonFiniteState {
                t: t + sc.ts,
                value: worst,
            });
        }
    }
    Ok(tr)
}
