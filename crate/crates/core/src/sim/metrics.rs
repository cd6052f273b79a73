use std::fmt;

use serde::{Deserialize, Serialize};

use super::{SimError, SimTrace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Integral of `|e|` over the whole run.
    pub iae: f64,
    /// Peak excursion of `y` past its settled value in the reference window,
    /// as a percentage of the step.
    pub overshoot_pct: f64,
    /// Largest `|u|` in the reference window.
    pub u_peak: f64,
    /// Mean `|e|` over the final 5% of the run.
    pub steady_state_error: f64,
    /// 10% to 90% rise time in the reference window, when both levels are
    /// crossed.
    pub rise_time: Option<f64>,
    pub window: (f64, f64),
}

impl fmt::Display for Metrics {
    /// Flat `key = value` report.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "iae = {:.11e}", self.iae)?;
        writeln!(f, "overshoot_pct = {:.11e}", self.overshoot_pct)?;
        writeln!(f, "u_peak = {:.11e}", self.u_peak)?;
        writeln!(f, "steady_state_error = {:.11e}", self.steady_state_error)?;
        match self.rise_time {
            Some(t) => writeln!(f, "rise_time_s = {t:.11e}")?,
            None => writeln!(f, "rise_time_s = none")?,
        }
        writeln!(f, "window_start_s = {:.11e}", self.window.0)?;
        write!(f, "window_end_s = {:.11e}", self.window.1)
    }
}

/// Performance figures of a trace. `window` bounds the reference response
/// used for overshoot, rise time and `u_peak`; `None` means the whole run.
pub fn compute_metrics(trace: &SimTrace, window: Option<(f64, f64)>) -> Result<Metrics, SimError> {
    if trace.is_empty() {
        return Err(SimError::EmptyTrace);
    }
    let n = trace.len();
    let iae = trace.e.iter().map(|e| e.abs()).sum::<f64>() * trace.ts;
    let tail = tail_len(n);
    let steady_state_error = trace.e[n - tail..].iter().map(|e| e.abs()).sum::<f64>() / tail as f64;

    let (t0, t1) = window.unwrap_or((0.0, n as f64 * trace.ts));
    let (i0, i1) = (
        trace.index_at(t0),
        trace.index_at(t1).max(trace.index_at(t0) + 1).min(n),
    );
    if i0 >= n {
        return Err(SimError::EmptyTrace);
    }
    let y = &trace.y[i0..i1];
    let u_peak = trace.u[i0..i1].iter().fold(0f64, |m, v| m.max(v.abs()));

    let y_start = y[0];
    let k = tail_len(y.len());
    let y_final = y[y.len() - k..].iter().sum::<f64>() / k as f64;
    let span = y_final - y_start;
    let (overshoot_pct, rise_time) = if span.abs() <= f64::EPSILON * y_final.abs().max(1.0) {
        (0.0, None)
    } else {
        let dir = span.signum();
        let peak = y.iter().fold(f64::NEG_INFINITY, |m, v| m.max(dir * v));
        let os = ((peak - dir * y_final) / span.abs()).max(0.0) * 100.0;
        let cross = |frac: f64| {
            let level = y_start + frac * span;
            y.iter().position(|&v| dir * (v - level) >= 0.0)
        };
        let rise = match (cross(0.1), cross(0.9)) {
            (Some(a), Some(b)) => Some((b - a) as f64 * trace.ts),
            _ => None,
        };
        (os, rise)
    };
    Ok(Metrics {
        iae,
        overshoot_pct,
        u_peak,
        steady_state_error,
        rise_time,
        window: (t0, t1),
    })
}

fn tail_len(n: usize) -> usize {
    (n / 20).max(1)
}
