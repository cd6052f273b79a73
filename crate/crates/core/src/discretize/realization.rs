use num_complex::Complex64;

use super::{DiscretizeError, QFormat};
use crate::tf::{tf_series, Domain, FrequencyEval, RationalTF, TfError};

/// One normalized section `(b0 + b1 z^-1 + ...)/(1 + a1 z^-1 + ...)` in
/// transposed direct form II.
#[derive(Clone, Debug, PartialEq)]
struct Section {
    tf: RationalTF,
    b: Vec<f64>,
    a: Vec<f64>,
    state: Vec<f64>,
    fixed: Option<FixedSection>,
}

#[derive(Clone, Debug, PartialEq)]
struct FixedSection {
    b: Vec<i64>,
    a: Vec<i64>,
    state: Vec<i64>,
}

impl Section {
    fn new(tf: &RationalTF) -> Result<Self, DiscretizeError> {
        if tf.domain().is_continuous() {
            return Err(DiscretizeError::NotDiscrete);
        }
        if !tf.is_proper() {
            return Err(DiscretizeError::Improper {
                num: tf.num().degree(),
                den: tf.den().degree(),
            });
        }
        let order = tf.den().degree();
        let lead = tf.den().leading();
        // coefficient of z^-k is the coefficient of z^(order - k)
        let b = (0..=order)
            .map(|k| tf.num().coeff(order - k) / lead)
            .collect();
        let a: Vec<f64> = (0..=order)
            .map(|k| tf.den().coeff(order - k) / lead)
            .collect();
        Ok(Self {
            tf: tf.clone(),
            b,
            a,
            state: vec![0.0; order],
            fixed: None,
        })
    }

    fn order(&self) -> usize {
        self.state.len()
    }

    fn step(&mut self, x: f64) -> f64 {
        let n = self.order();
        if n == 0 {
            return self.b[0] * x;
        }
        let y = self.b[0] * x + self.state[0];
        for k in 1..n {
            self.state[k - 1] = self.b[k] * x - self.a[k] * y + self.state[k];
        }
        self.state[n - 1] = self.b[n] * x - self.a[n] * y;
        y
    }

    fn step_fixed(&mut self, x: i64, q: &QFormat) -> i64 {
        let fx = self.fixed.as_mut().expect("quantized section");
        let n = fx.state.len();
        if n == 0 {
            return q.mul(fx.b[0], x);
        }
        let y = q.add(q.mul(fx.b[0], x), fx.state[0]);
        for k in 1..n {
            let v = q.sub(q.mul(fx.b[k], x), q.mul(fx.a[k], y));
            fx.state[k - 1] = q.add(v, fx.state[k]);
        }
        fx.state[n - 1] = q.sub(q.mul(fx.b[n], x), q.mul(fx.a[n], y));
        y
    }
}

/// Cascade of discrete sections stepped one sample at a time.
///
/// Keeping factors as separate sections (for instance an exact `1/(z - 1)`
/// integrator) preserves their roots under quantization.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteController {
    ts: f64,
    sections: Vec<Section>,
    q: Option<QFormat>,
}

impl DiscreteController {
    pub fn new(tf: &RationalTF) -> Result<Self, DiscretizeError> {
        Self::cascade(std::slice::from_ref(tf))
    }

    pub fn cascade(tfs: &[RationalTF]) -> Result<Self, DiscretizeError> {
        let mut ts = None;
        let mut sections = Vec::with_capacity(tfs.len());
        for tf in tfs {
            let t = match tf.domain() {
                Domain::Discrete { ts } => ts,
                Domain::Continuous { .. } => return Err(DiscretizeError::NotDiscrete),
            };
            if ts.is_some_and(|prev| prev != t) {
                return Err(DiscretizeError::SampleTimeMismatch);
            }
            ts = Some(t);
            sections.push(Section::new(tf)?);
        }
        let ts = ts.ok_or_else(|| DiscretizeError::InvalidParam("no sections".into()))?;
        Ok(Self {
            ts,
            sections,
            q: None,
        })
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    pub fn quantization(&self) -> Option<QFormat> {
        self.q
    }

    pub fn sections(&self) -> Vec<RationalTF> {
        self.sections.iter().map(|s| s.tf.clone()).collect()
    }

    /// Product of all sections as one transfer function.
    pub fn tf(&self) -> RationalTF {
        let mut it = self.sections.iter().map(|s| s.tf.clone());
        let first = it.next().expect("at least one section");
        it.fold(first, |acc, t| {
            tf_series(&acc, &t).expect("same sample time")
        })
    }

    /// Realized coefficients `(b, a)` of each section, normalized so
    /// `a[0] = 1`, in powers of `z^-1`.
    pub fn coefficients(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        self.sections
            .iter()
            .map(|s| (s.b.clone(), s.a.clone()))
            .collect()
    }

    pub fn reset(&mut self) {
        for s in &mut self.sections {
            s.state.iter_mut().for_each(|v| *v = 0.0);
            if let Some(f) = s.fixed.as_mut() {
                f.state.iter_mut().for_each(|v| *v = 0);
            }
        }
    }

    pub fn step(&mut self, x: f64) -> f64 {
        match self.q {
            None => self.sections.iter_mut().fold(x, |v, s| s.step(v)),
            Some(q) => {
                let raw = self
                    .sections
                    .iter_mut()
                    .fold(q.to_raw(x), |v, s| s.step_fixed(v, &q));
                q.from_raw(raw)
            }
        }
    }
}

impl FrequencyEval for DiscreteController {
    /// Product of the section responses, which stays accurate near `z = 1`
    /// where the multiplied-out polynomial loses digits.
    fn response_at(&self, omega: f64) -> Result<Complex64, TfError> {
        self.sections
            .iter()
            .try_fold(Complex64::new(1.0, 0.0), |acc, s| {
                Ok(acc * s.tf.response_at(omega)?)
            })
    }
}

pub fn step_discrete(c: &mut DiscreteController, input: f64) -> f64 {
    c.step(input)
}

/// Fixed-point copy of `c`: coefficients rounded once, then every product
/// and sum in the stepper is rounded and saturated in `q`. State is reset.
pub fn quantize_controller(
    c: &DiscreteController,
    q: QFormat,
) -> Result<DiscreteController, DiscretizeError> {
    let mut out = c.clone();
    out.q = Some(q);
    for s in &mut out.sections {
        let raw = |v: &[f64]| -> Result<Vec<i64>, DiscretizeError> {
            v.iter()
                .map(|&x| {
                    q.try_to_raw(x).ok_or(DiscretizeError::Overflow {
                        value: x,
                        int_bits: q.int_bits(),
                        frac_bits: q.frac_bits(),
                    })
                })
                .collect()
        };
        let (b, a) = (raw(&s.b)?, raw(&s.a)?);
        s.b = b.iter().map(|&r| q.from_raw(r)).collect();
        s.a = a.iter().map(|&r| q.from_raw(r)).collect();
        let order = s.state.len();
        // descending z powers back to an ascending-coefficient TF
        let num: Vec<f64> = (0..=order).map(|i| s.b[order - i]).collect();
        let den: Vec<f64> = (0..=order).map(|i| s.a[order - i]).collect();
        s.tf = RationalTF::z(&num, &den, c.ts)?;
        s.fixed = Some(FixedSection {
            b,
            a,
            state: vec![0; order],
        });
    }
    out.reset();
    Ok(out)
}
