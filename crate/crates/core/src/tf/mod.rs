//! Polynomial and rational transfer-function algebra in the `s` and `z`
//! domains.
//!
//! All coefficient lists are ascending in degree. Values are immutable after
//! construction and every operation returns a new value.

mod freq;
mod interconnect;
mod poly;
mod rational;

pub use freq::{dc_gain, freq_eval, log_grid, FrequencyEval, FrequencyResponse};
pub use interconnect::{tf_feedback, tf_inverse, tf_series, LoopTf};
pub use poly::{poly_mul, Polynomial};
pub use rational::{Domain, RationalTF};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TfError {
    #[error("transfer functions live in different domains ({0} vs {1})")]
    DomainMismatch(String, String),
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("numerator is the zero polynomial")]
    ZeroNumerator,
    #[error("operation not defined for a transfer function with transport delay")]
    HasDelay,
    #[error("1 + g*h vanishes identically (algebraic loop)")]
    AlgebraicLoop,
    #[error("frequency {omega} rad/s exceeds the Nyquist limit {limit} rad/s")]
    NyquistExceeded { omega: f64, limit: f64 },
    #[error("numerator and denominator both vanish at the evaluation point")]
    Indeterminate,
    #[error("invalid transport delay {0} s")]
    InvalidDelay(f64),
    #[error("invalid sample time {0} s")]
    InvalidSampleTime(f64),
    #[error("frequency grid must be finite, positive and strictly increasing")]
    InvalidGrid,
}
