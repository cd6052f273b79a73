//! Loop robustness (`Ms`), the disturbance, noise and reference channels of a
//! closed loop, and Bode-data export.

mod bode;
mod channels;
mod ms;

pub use bode::{bode_export, BodeColumn, BodeData};
pub use channels::{channel_er, channel_un, channel_yd, Channel, ChannelKind, LoopAssembly};
pub use ms::{ms_index, MsGrid, MsResult, DEFAULT_MS_RANGE};

use thiserror::Error;

use crate::tf::TfError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("|1 + L(jw)| = {value:e} at w = {omega} rad/s: loop is on the stability boundary")]
    UnstableEvaluation { omega: f64, value: f64 },
    #[error("invalid frequency range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("need at least 2 grid points, got {0}")]
    TooFewPoints(usize),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("label {0:?} is empty or contains a comma or line break")]
    InvalidLabel(String),
    #[error("plant and controller must both be continuous-time")]
    NotContinuous,
    #[error(transparent)]
    Tf(#[from] TfError),
}
