use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Domain, RationalTF, TfError};

/// Anything that has a complex frequency response.
pub trait FrequencyEval {
    fn response_at(&self, omega: f64) -> Result<Complex64, TfError>;
}

impl FrequencyEval for RationalTF {
    fn response_at(&self, omega: f64) -> Result<Complex64, TfError> {
        RationalTF::response_at(self, omega)
    }
}

/// Sampled frequency response.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyResponse {
    pub omegas: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl FrequencyResponse {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Largest `|a - b| / |b|` over the common grid.
    pub fn max_rel_deviation(&self, reference: &FrequencyResponse) -> f64 {
        self.values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).norm() / b.norm())
            .fold(0.0, f64::max)
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

/// Evaluates `g` on a strictly increasing grid of angular frequencies.
pub fn freq_eval<G: FrequencyEval + ?Sized>(
    g: &G,
    omegas: &[f64],
) -> Result<FrequencyResponse, TfError> {
    let ok =
        omegas.iter().all(|w| w.is_finite() && *w >= 0.0) && omegas.windows(2).all(|p| p[1] > p[0]);
    if !ok {
        return Err(TfError::InvalidGrid);
    }
    let values = omegas
        .iter()
        .map(|&w| g.response_at(w))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FrequencyResponse {
        omegas: omegas.to_vec(),
        values,
    })
}

/// Steady-state gain: the value at `s = 0` or `z = 1`.
///
/// Returns `f64::INFINITY` when only the denominator vanishes there and
/// [`TfError::Indeterminate`] when both do; common factors are never
/// cancelled.
pub fn dc_gain(g: &RationalTF) -> Result<f64, TfError> {
    let (n, d, n_scale, d_scale) = match g.domain() {
        Domain::Continuous { .. } => (
            g.num().coeff(0),
            g.den().coeff(0),
            g.num().max_abs(),
            g.den().max_abs(),
        ),
        Domain::Discrete { .. } => {
            let sum = |c: &[f64]| c.iter().sum::<f64>();
            let abs_sum = |c: &[f64]| c.iter().map(|v| v.abs()).sum::<f64>();
            (
                sum(g.num().coeffs()),
                sum(g.den().coeffs()),
                abs_sum(g.num().coeffs()),
                abs_sum(g.den().coeffs()),
            )
        }
    };
    // exact for s = 0, roundoff-aware for z = 1
    let tol = if g.domain().is_continuous() {
        0.0
    } else {
        1e-12
    };
    let num_vanishes = n.abs() <= tol * n_scale;
    let den_vanishes = d.abs() <= tol * d_scale;
    match (num_vanishes, den_vanishes) {
        (true, true) => Err(TfError::Indeterminate),
        (false, true) => Ok(f64::INFINITY),
        (true, false) => Ok(0.0),
        (false, false) => Ok(n / d),
    }
}
