//! Error-based ADRC and its PI/PID equivalents: transfer-function algebra,
//! controller synthesis, frequency-domain analysis, discretization and
//! closed-loop simulation.

pub mod analysis;
pub mod discretize;
pub mod sim;
pub mod synth;
pub mod tf;
