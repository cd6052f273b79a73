//! TOML run configuration. Every section is optional; flags override the file,
//! the file overrides the preset.

use std::path::Path;

use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub gains: Option<GainsConfig>,
    pub pid: Option<PidConfig>,
    pub plant: Option<PlantConfig>,
    pub controller: Option<ControllerConfig>,
    pub simulate: Option<SimulateConfig>,
}

/// Bandwidth tuning of an eADRC.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsConfig {
    pub n: Option<usize>,
    pub omega_cl_rad_s: Option<f64>,
    pub k_eso: Option<f64>,
    pub b0: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidConfig {
    pub kp: f64,
    pub ki_per_s: f64,
    #[serde(default)]
    pub kd_s: f64,
    /// `F_Y = 1/(T s + 1)`; unity when absent.
    pub fy_time_constant_s: Option<f64>,
}

/// Continuous plant, coefficients in ascending powers of `s`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantConfig {
    pub num_ascending: Vec<f64>,
    pub den_ascending: Vec<f64>,
    #[serde(default)]
    pub delay_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    /// `pi`, `pid` or `eadrc`.
    pub kind: Option<String>,
    /// `1dof` or `2dof`.
    pub dof: Option<String>,
    pub beta: Option<f64>,
    /// `F_R = 1/(T s + 1)` for 2DOF structures.
    pub fr_time_constant_s: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub variant: Option<String>,
    pub tf_s: Option<f64>,
    pub tr_s: Option<f64>,
    pub t_end_s: Option<f64>,
    pub substeps: Option<usize>,
    pub noise: Option<bool>,
    pub disturbance: Option<bool>,
    /// Fixed-point controller arithmetic with this many fractional bits.
    pub frac_bits: Option<u32>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}
