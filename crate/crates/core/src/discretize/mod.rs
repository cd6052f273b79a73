//! Euler discretization, closed-form discrete controller coefficients with
//! an oracle audit, fixed-point emulation and a sample-by-sample stepper.

mod appendix;
mod euler;
mod fixed;
mod realization;

pub use appendix::{
    append_audit_log, ceq2_z, eadrc_fb_z, eadrc_pf_z, pid_z, AuditRecord, DiscreteBuild,
};
pub use euler::euler_discretize;
pub use fixed::QFormat;
pub use realization::{quantize_controller, step_discrete, DiscreteController};

use thiserror::Error;

use crate::synth::SynthError;
use crate::tf::TfError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscretizeError {
    #[error("expected a continuous-time transfer function")]
    NotContinuous,
    #[error("expected a discrete-time transfer function")]
    NotDiscrete,
    #[error("improper transfer function (numerator degree {num} > denominator degree {den})")]
    Improper { num: usize, den: usize },
    #[error("cascaded sections use different sample times")]
    SampleTimeMismatch,
    #[error("invalid sample time {0} s")]
    InvalidSampleTime(f64),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("output filter must be first order, got {0}")]
    WrongFilterKind(String),
    #[error("frac_bits = {0} outside [8, 56]")]
    InvalidFracBits(u32),
    #[error("coefficient {value} does not fit Q{int_bits}.{frac_bits}")]
    Overflow {
        value: f64,
        int_bits: u32,
        frac_bits: u32,
    },
    #[error("audit log: {0}")]
    Io(String),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Tf(#[from] TfError),
}
