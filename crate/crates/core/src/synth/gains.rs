use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::tf::Polynomial;

/// Controller gains `k_1..k_n`, observer gains `l_1..l_{n+1}` and the
/// input-gain estimate `b0` of an error-based ADRC.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdrcGains {
    pub n: usize,
    pub k: Vec<f64>,
    pub l: Vec<f64>,
    pub b0: f64,
}

impl AdrcGains {
    pub fn new(k: Vec<f64>, l: Vec<f64>, b0: f64) -> Result<Self, SynthError> {
        let g = Self {
            n: k.len(),
            k,
            l,
            b0,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n == 0 || self.k.is_empty() {
            return Err(SynthError::InvalidGains("no controller gains".into()));
        }
        if self.k.len() != self.n {
            return Err(SynthError::InvalidGains(format!(
                "expected {} controller gains, got {}",
                self.n,
                self.k.len()
            )));
        }
        if self.l.len() != self.n + 1 {
            return Err(SynthError::InvalidGains(format!(
                "expected {} observer gains, got {}",
                self.n + 1,
                self.l.len()
            )));
        }
        if self.b0 == 0.0 || !self.b0.is_finite() {
            return Err(SynthError::InvalidGains(format!("b0 = {}", self.b0)));
        }
        if self.k.iter().chain(&self.l).any(|v| !v.is_finite()) {
            return Err(SynthError::InvalidGains("non-finite gain".into()));
        }
        Ok(())
    }

    /// `k_i`, 1-based as in the usual notation.
    pub fn k(&self, i: usize) -> f64 {
        self.k[i - 1]
    }

    /// `l_i`, 1-based.
    pub fn l(&self, i: usize) -> f64 {
        self.l[i - 1]
    }
}

/// Places all controller poles at `-omega_cl` and all observer poles at
/// `-k_eso * omega_cl`.
///
/// `(λ + ω)^n = λ^n + k_n λ^{n-1} + … + k_1`, so `k_i` is the coefficient of
/// `λ^{i-1}`; `(λ + k_eso ω)^{n+1} = λ^{n+1} + l_1 λ^n + … + l_{n+1}`, so `l_i`
/// is the coefficient of `λ^{n+1-i}`.
pub fn bandwidth_tune(
    n: usize,
    omega_cl: f64,
    k_eso: f64,
    b0: f64,
) -> Result<AdrcGains, SynthError> {
    if !(1..=2).contains(&n) {
        return Err(SynthError::UnsupportedOrder(n));
    }
    bandwidth_gains(n, omega_cl, k_eso, b0)
}

/// Same placement rule for any order, used by the general resolvent builder.
pub(crate) fn bandwidth_gains(
    n: usize,
    omega_cl: f64,
    k_eso: f64,
    b0: f64,
) -> Result<AdrcGains, SynthError> {
    if !(omega_cl > 0.0 && omega_cl.is_finite()) {
        return Err(SynthError::InvalidGains(format!("omega_cl = {omega_cl}")));
    }
    if !(k_eso > 0.0 && k_eso.is_finite()) {
        return Err(SynthError::InvalidGains(format!("k_eso = {k_eso}")));
    }
    let ctrl = Polynomial::linear(omega_cl).pow(n as u32);
    let obs = Polynomial::linear(k_eso * omega_cl).pow(n as u32 + 1);
    let k = (1..=n).map(|i| ctrl.coeff(i - 1)).collect();
    let l = (1..=n + 1).map(|i| obs.coeff(n + 1 - i)).collect();
    AdrcGains::new(k, l, b0)
}
