use std::fmt;

use serde::{Deserialize, Serialize};

use super::controller::eadrc_prefilter;
use super::{
    build_eadrc_fb, build_pid_fb, build_pid_pf, pid_from_adrc, AdrcGains, ControllerKind, Dof,
    PidParams, SynthError,
};
use crate::tf::{Domain, RationalTF};

/// Coefficients of one transfer function, ascending powers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfReport {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    pub domain: String,
}

impl From<&RationalTF> for TfReport {
    fn from(tf: &RationalTF) -> Self {
        Self {
            num: tf.num().coeffs().to_vec(),
            den: tf.den().coeffs().to_vec(),
            domain: tf.domain().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CribRow {
    pub kind: ControllerKind,
    pub dof: Dof,
    pub n: usize,
    pub label: String,
    pub prefilter: TfReport,
    pub feedback: TfReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CribSheet {
    pub gains: AdrcGains,
    pub pid: PidParams,
    pub rows: Vec<CribRow>,
}

/// Prefilter and feedback of the PI/PID and eADRC structures, 1DOF and 2DOF,
/// for one plant order. `pid` supplies the PI/PID rows and the 2DOF knobs
/// (`beta`, `F_R`) shared by both 2DOF rows.
pub fn crib_sheet(gains: &AdrcGains, pid: &PidParams) -> Result<CribSheet, SynthError> {
    gains.validate()?;
    pid.validate()?;
    let n = gains.n;
    let pid_kind = match n {
        1 if pid.is_pi() => ControllerKind::Pi,
        1 => {
            return Err(SynthError::Inconsistent(
                "first-order crib sheet needs PI parameters".into(),
            ))
        }
        2 => ControllerKind::Pid,
        other => return Err(SynthError::UnsupportedOrder(other)),
    };
    let unit = RationalTF::gain(1.0, Domain::S);
    let pid_fb = build_pid_fb(pid)?;
    let pid_pf = build_pid_pf(pid)?;
    let ad_fb = build_eadrc_fb(gains)?;
    let ad_pid = pid_from_adrc(gains)?
        .with_beta(pid.beta)
        .with_reference_filter(pid.fr)
        .with_output_filter(pid.fy);
    let ad_pf = eadrc_prefilter(gains, &ad_pid)?;

    let row = |kind: ControllerKind, dof: Dof, pf: &RationalTF, fb: &RationalTF| CribRow {
        kind,
        dof,
        n,
        label: match kind {
            ControllerKind::Eadrc => format!("{dof} {kind} n={n}"),
            _ => format!("{dof} {kind}"),
        },
        prefilter: pf.into(),
        feedback: fb.into(),
    };
    let rows = vec![
        row(pid_kind, Dof::One, &unit, &pid_fb),
        row(pid_kind, Dof::Two, &pid_pf, &pid_fb),
        row(ControllerKind::Eadrc, Dof::One, &unit, &ad_fb),
        row(ControllerKind::Eadrc, Dof::Two, &ad_pf, &ad_fb),
    ];
    Ok(CribSheet {
        gains: gains.clone(),
        pid: *pid,
        rows,
    })
}

fn coeff_list(c: &[f64]) -> String {
    let parts: Vec<String> = c.iter().map(|v| format!("{v:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}

impl fmt::Display for CribSheet {
    /// Column-aligned table; coefficient lists in ascending powers of `s`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header = ["structure", "C_PF num", "C_PF den", "C_FB num", "C_FB den"];
        let cells: Vec<[String; 5]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.label.clone(),
                    coeff_list(&r.prefilter.num),
                    coeff_list(&r.prefilter.den),
                    coeff_list(&r.feedback.num),
                    coeff_list(&r.feedback.den),
                ]
            })
            .collect();
        let mut width = header.map(str::len);
        for row in &cells {
            for (w, c) in width.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let line = |f: &mut fmt::Formatter<'_>, row: [&str; 5]| -> fmt::Result {
            let padded: Vec<String> = row
                .iter()
                .zip(&width)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            writeln!(f, "{}", padded.join("  ").trim_end())
        };
        line(f, header)?;
        let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
        writeln!(f, "{}", rule.join("  "))?;
        for row in &cells {
            line(f, [&row[0], &row[1], &row[2], &row[3], &row[4]])?;
        }
        Ok(())
    }
}
