use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::tf::{freq_eval, log_grid, FrequencyEval};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodeColumn {
    pub label: String,
    pub mag_db: Vec<f64>,
    /// Unwrapped along the grid.
    pub phase_deg: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodeData {
    pub omegas: Vec<f64>,
    pub columns: Vec<BodeColumn>,
}

impl BodeData {
    /// CSV with header `omega_rad_s,<label>_mag_db,<label>_phase_deg,...` and
    /// 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega_rad_s");
        for c in &self.columns {
            let _ = write!(out, ",{0}_mag_db,{0}_phase_deg", c.label);
        }
        out.push('\n');
        if self.columns.is_empty() {
            return out;
        }
        for (i, w) in self.omegas.iter().enumerate() {
            let _ = write!(out, "{w:.11e}");
            for c in &self.columns {
                let _ = write!(out, ",{:.11e},{:.11e}", c.mag_db[i], c.phase_deg[i]);
            }
            out.push('\n');
        }
        out
    }
}

/// Magnitude and phase of labelled responses on a shared log grid.
pub fn bode_export(
    tfs: &[(&str, &dyn FrequencyEval)],
    omega_range: (f64, f64),
    n_points: usize,
) -> Result<BodeData, AnalysisError> {
    if n_points < 2 {
        return Err(AnalysisError::TooFewPoints(n_points));
    }
    let (lo, hi) = omega_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(AnalysisError::InvalidRange { lo, hi });
    }
    let mut seen = HashSet::new();
    for (label, _) in tfs {
        if label.is_empty() || label.contains([',', '\n', '\r']) {
            return Err(AnalysisError::InvalidLabel(label.to_string()));
        }
        if !seen.insert(*label) {
            return Err(AnalysisError::DuplicateLabel(label.to_string()));
        }
    }
    let omegas = log_grid(lo, hi, n_points);
    let mut columns = Vec::with_capacity(tfs.len());
    for (label, tf) in tfs {
        let r = freq_eval(*tf, &omegas)?;
        let mag_db = r.values.iter().map(|v| 20.0 * v.norm().log10()).collect();
        let raw: Vec<f64> = r.values.iter().map(|v| v.arg().to_degrees()).collect();
        columns.push(BodeColumn {
            label: label.to_string(),
            mag_db,
            phase_deg: unwrap_deg(&raw),
        });
    }
    Ok(BodeData { omegas, columns })
}

fn unwrap_deg(p: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.len());
    let mut offset = 0.0;
    for (i, &v) in p.iter().enumerate() {
        if i > 0 {
            let jump = v - p[i - 1];
            offset -= 360.0 * (jump / 360.0).round();
        }
        out.push(v + offset);
    }
    out
}
