//! Controller synthesis: PI/PID and error-based ADRC in 1DOF and 2DOF form,
//! the equivalence transfer functions linking them, and bandwidth tuning.

mod controller;
mod crib;
mod eadrc;
mod gains;
mod pid;

pub(crate) use controller::eadrc_prefilter;
pub use controller::{make_controller, ControllerKind, ControllerParams, Dof, TwoDofController};
pub use crib::{crib_sheet, CribRow, CribSheet, TfReport};
pub use eadrc::{
    build_ceq, build_ceq_simplified, build_eadrc_fb, build_eadrc_fb_general, eadrc_resolvent,
    equivalence_filter, pid_from_adrc, GeneralFeedback,
};
pub use gains::{bandwidth_tune, AdrcGains};
pub use pid::{build_pid_fb, build_pid_pf, FilterSpec, PidParams};

use thiserror::Error;

use crate::tf::TfError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("plant order {0} is not supported (closed forms exist for n = 1 and n = 2)")]
    UnsupportedOrder(usize),
    #[error("invalid gains: {0}")]
    InvalidGains(String),
    #[error("invalid PID parameters: {0}")]
    InvalidParams(String),
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("resulting transfer function is improper (numerator degree {num} > denominator degree {den})")]
    ImproperResult { num: usize, den: usize },
    #[error("inconsistent controller request: {0}")]
    Inconsistent(String),
    #[error("characteristic polynomial recursion residual {0:e} exceeds tolerance")]
    ResolventResidual(f64),
    #[error(transparent)]
    Tf(#[from] TfError),
}
