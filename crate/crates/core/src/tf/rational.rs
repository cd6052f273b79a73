use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Polynomial, TfError};

/// Continuous (`s`, optional input transport delay) or sampled (`z`) domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Continuous { delay: f64 },
    Discrete { ts: f64 },
}

impl Domain {
    pub const S: Domain = Domain::Continuous { delay: 0.0 };

    pub fn is_continuous(&self) -> bool {
        matches!(self, Domain::Continuous { .. })
    }

    /// Whether two domains may be combined by interconnection.
    pub fn compatible(&self, other: &Domain) -> bool {
        match (self, other) {
            (Domain::Continuous { .. }, Domain::Continuous { .. }) => true,
            (Domain::Discrete { ts: a }, Domain::Discrete { ts: b }) => a == b,
            _ => false,
        }
    }

    pub(crate) fn mismatch(&self, other: &Domain) -> TfError {
        TfError::DomainMismatch(self.to_string(), other.to_string())
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Continuous { delay } if *delay == 0.0 => write!(f, "s"),
            Domain::Continuous { delay } => write!(f, "s (delay {delay} s)"),
            Domain::Discrete { ts } => write!(f, "z (Ts {ts} s)"),
        }
    }
}

/// Rational SISO transfer function `num/den` in a given domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalTF {
    num: Polynomial,
    den: Polynomial,
    domain: Domain,
}

impl RationalTF {
    pub fn new(num: Polynomial, den: Polynomial, domain: Domain) -> Result<Self, TfError> {
        if den.is_zero() {
            return Err(TfError::ZeroDenominator);
        }
        match domain {
            Domain::Continuous { delay } if !(delay >= 0.0 && delay.is_finite()) => {
                return Err(TfError::InvalidDelay(delay))
            }
            Domain::Discrete { ts } if !(ts > 0.0 && ts.is_finite()) => {
                return Err(TfError::InvalidSampleTime(ts))
            }
            _ => {}
        }
        Ok(Self { num, den, domain })
    }

    /// Continuous, delay-free TF from ascending coefficient lists.
    ///
    /// Panics if `den` is the zero polynomial; intended for literals.
    pub fn s(num: &[f64], den: &[f64]) -> Self {
        Self::new(
            Polynomial::new(num.to_vec()),
            Polynomial::new(den.to_vec()),
            Domain::S,
        )
        .expect("literal transfer function with zero denominator")
    }

    /// Discrete TF from ascending coefficient lists in `z`.
    pub fn z(num: &[f64], den: &[f64], ts: f64) -> Result<Self, TfError> {
        Self::new(
            Polynomial::new(num.to_vec()),
            Polynomial::new(den.to_vec()),
            Domain::Discrete { ts },
        )
    }

    pub fn gain(k: f64, domain: Domain) -> Self {
        Self {
            num: Polynomial::constant(k),
            den: Polynomial::one(),
            domain,
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn delay(&self) -> f64 {
        match self.domain {
            Domain::Continuous { delay } => delay,
            Domain::Discrete { .. } => 0.0,
        }
    }

    pub fn has_delay(&self) -> bool {
        self.delay() > 0.0
    }

    /// Same rational part with a new transport delay.
    pub fn with_delay(&self, delay: f64) -> Result<Self, TfError> {
        match self.domain {
            Domain::Continuous { .. } => Self::new(
                self.num.clone(),
                self.den.clone(),
                Domain::Continuous { delay },
            ),
            Domain::Discrete { .. } => Err(TfError::HasDelay),
        }
    }

    pub fn is_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() <= self.den.degree()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            num: self.num.scale(k),
            den: self.den.clone(),
            domain: self.domain,
        }
    }

    /// Divides numerator and denominator by the leading denominator
    /// coefficient.
    pub fn normalized(&self) -> Self {
        let lead = self.den.leading();
        Self {
            num: self.num.scale(1.0 / lead),
            den: self.den.scale(1.0 / lead),
            domain: self.domain,
        }
    }

    /// Rational part evaluated at a complex point, delay excluded.
    pub fn eval_rational(&self, x: Complex64) -> Complex64 {
        self.num.eval_complex(x) / self.den.eval_complex(x)
    }

    /// Frequency response at one angular frequency, including the exact
    /// `exp(-j w delay)` factor for continuous TFs.
    pub fn response_at(&self, omega: f64) -> Result<Complex64, TfError> {
        match self.domain {
            Domain::Continuous { delay } => {
                let s = Complex64::new(0.0, omega);
                let v = self.eval_rational(s);
                if delay > 0.0 {
                    Ok(v * Complex64::from_polar(1.0, -omega * delay))
                } else {
                    Ok(v)
                }
            }
            Domain::Discrete { ts } => {
                let limit = std::f64::consts::PI / ts;
                if omega > limit * (1.0 + 1e-12) {
                    return Err(TfError::NyquistExceeded { omega, limit });
                }
                Ok(self.eval_rational(Complex64::from_polar(1.0, omega * ts)))
            }
        }
    }

    /// Removes common roots that agree within `tol` (relative). Finds roots of
    /// the smaller polynomial by companion-matrix eigenvalues. Never used
    /// implicitly by any builder.
    pub fn simplify(&self, tol: f64) -> Self {
        let (num_roots, den_roots) = (roots(&self.num), roots(&self.den));
        let mut keep_den = den_roots.clone();
        let mut keep_num = Vec::new();
        for r in num_roots {
            if let Some(pos) = keep_den
                .iter()
                .position(|d| (d - r).norm() <= tol * r.norm().max(1.0))
            {
                keep_den.remove(pos);
            } else {
                keep_num.push(r);
            }
        }
        let num = from_roots(&keep_num, self.num.leading());
        let den = from_roots(&keep_den, self.den.leading());
        Self {
            num,
            den,
            domain: self.domain,
        }
    }
}

fn roots(p: &Polynomial) -> Vec<Complex64> {
    let n = p.degree();
    if n == 0 || p.is_zero() {
        return Vec::new();
    }
    let lead = p.leading();
    let companion = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -p.coeff(n - 1 - j) / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion.complex_eigenvalues().iter().copied().collect()
}

fn from_roots(roots: &[Complex64], lead: f64) -> Polynomial {
    let mut c = vec![Complex64::new(lead, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * r;
        }
        c = next;
    }
    Polynomial::new(c.iter().map(|v| v.re).collect())
}

impl fmt::Display for RationalTF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = if self.domain.is_continuous() {
            "s"
        } else {
            "z"
        };
        let n = self.num.to_string().replace('x', var);
        let d = self.den.to_string().replace('x', var);
        write!(f, "({n}) / ({d})")?;
        if self.has_delay() {
            write!(f, " * exp(-{}*s)", self.delay())?;
        }
        Ok(())
    }
}
