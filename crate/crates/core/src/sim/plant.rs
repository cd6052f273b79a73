use serde::{Deserialize, Serialize};

use super::SimError;
use crate::tf::{Domain, Polynomial, RationalTF};

/// Continuous plant driven by `v = u + w` (control plus input disturbance).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlantModel {
    /// Strictly proper transfer function, optionally with input delay.
    LinearTf { tf: RationalTF },
    /// `y'' = -a1 y' - a0 y + b (u + w)`
    SecondOrderInputDisturbed { a1: f64, a0: f64, b: f64 },
}

impl PlantModel {
    pub fn tf(&self) -> RationalTF {
        match self {
            PlantModel::LinearTf { tf } => tf.clone(),
            &PlantModel::SecondOrderInputDisturbed { a1, a0, b } => {
                RationalTF::s(&[b], &[a0, a1, 1.0])
            }
        }
    }

    pub fn delay(&self) -> f64 {
        match self {
            PlantModel::LinearTf { tf } => tf.delay(),
            PlantModel::SecondOrderInputDisturbed { .. } => 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        match self {
            PlantModel::LinearTf { tf } => {
                if !matches!(tf.domain(), Domain::Continuous { .. }) {
                    return Err(SimError::InvalidScenario("plant must be continuous".into()));
                }
                if tf.num().degree() >= tf.den().degree() && !tf.num().is_zero() {
                    return Err(SimError::InvalidScenario(
                        "plant must be strictly proper".into(),
                    ));
                }
                Ok(())
            }
            &PlantModel::SecondOrderInputDisturbed { a1, a0, b } => {
                if b == 0.0 || ![a1, a0, b].iter().all(|v| v.is_finite()) {
                    return Err(SimError::InvalidScenario(format!(
                        "second-order plant needs finite a1, a0 and b != 0 (a1={a1}, a0={a0}, b={b})"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Controllable canonical realization `x' = A x + B v`, `y = C x + D v` of a
/// proper transfer function.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct StateSpace {
    /// Monic denominator without its leading 1, ascending.
    a: Vec<f64>,
    c: Vec<f64>,
    d: f64,
    pub(crate) x: Vec<f64>,
    /// RK4 stage buffers, kept to avoid allocating per step.
    scratch: [Vec<f64>; 5],
}

impl StateSpace {
    pub(crate) fn new(tf: &RationalTF) -> Result<Self, SimError> {
        let t = tf.normalized();
        let m = t.den().degree();
        if t.num().degree() > m && !t.num().is_zero() {
            return Err(SimError::InvalidScenario(
                "improper transfer function".into(),
            ));
        }
        let a: Vec<f64> = (0..m).map(|i| t.den().coeff(i)).collect();
        let d = t.num().coeff(m);
        // strip the feedthrough: b - d * den
        let c: Vec<f64> = (0..m)
            .map(|i| t.num().coeff(i) - d * t.den().coeff(i))
            .collect();
        Ok(Self {
            a,
            c,
            d,
            x: vec![0.0; m],
            scratch: std::array::from_fn(|_| vec![0.0; m]),
        })
    }

    pub(crate) fn output(&self, v: f64) -> f64 {
        self.c.iter().zip(&self.x).map(|(c, x)| c * x).sum::<f64>() + self.d * v
    }

    fn deriv(a: &[f64], x: &[f64], v: f64, out: &mut [f64]) {
        let m = x.len();
        out[..m - 1].copy_from_slice(&x[1..]);
        out[m - 1] = v - a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>();
    }

    /// One RK4 step of length `h` with inputs at the start, midpoint and end.
    pub(crate) fn rk4(&mut self, h: f64, v: [f64; 3]) {
        let m = self.x.len();
        if m == 0 {
            return;
        }
        let [k1, k2, k3, k4, tmp] = &mut self.scratch;
        let (a, x) = (&self.a, &mut self.x);
        Self::deriv(a, x, v[0], k1);
        for i in 0..m {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        Self::deriv(a, tmp, v[1], k2);
        for i in 0..m {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        Self::deriv(a, tmp, v[1], k3);
        for i in 0..m {
            tmp[i] = x[i] + h * k3[i];
        }
        Self::deriv(a, tmp, v[2], k4);
        for i in 0..m {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    pub(crate) fn max_abs_state(&self) -> f64 {
        self.x.iter().fold(
            0.0,
            |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) },
        )
    }
}

/// Denominator helper for `(t s + 1)^2`.
pub(crate) fn double_lag(t: f64) -> RationalTF {
    let p = Polynomial::new(vec![1.0, t]);
    RationalTF::new(Polynomial::one(), &p * &p, Domain::S).expect("nonzero denominator")
}
