use serde::{Deserialize, Serialize};

use super::{AnalysisError, LoopAssembly};
use crate::tf::log_grid;

pub const DEFAULT_MS_RANGE: (f64, f64) = (1e-3, 1e3);

const GRID_POINTS: usize = 2000;
const REFINE_TOL: f64 = 1e-4;
const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MsGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    /// Relative frequency tolerance of the golden-section refinement.
    pub refine_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MsResult {
    pub ms: f64,
    pub omega_peak: f64,
    pub grid: MsGrid,
}

/// Peak sensitivity `max |1 / (1 + C_FB(jw) G_P(jw))|` over `range`.
///
/// Log-spaced sweep, then golden-section search on `log w` between the
/// neighbours of the best sample.
pub fn ms_index(asm: &LoopAssembly, range: (f64, f64)) -> Result<MsResult, AnalysisError> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(AnalysisError::InvalidRange { lo, hi });
    }
    let sens = |w: f64| -> Result<f64, AnalysisError> {
        let d = (1.0 + asm.loop_gain(w)?).norm();
        if d < BOUNDARY_TOL {
            return Err(AnalysisError::UnstableEvaluation { omega: w, value: d });
        }
        Ok(1.0 / d)
    };

    let grid = log_grid(lo, hi, GRID_POINTS);
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &w) in grid.iter().enumerate() {
        let v = sens(w)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let (i, grid_peak) = best;
    let a = grid[i.saturating_sub(1)].ln();
    let b = grid[(i + 1).min(grid.len() - 1)].ln();
    let (w_ref, v_ref) = golden_max(|x| sens(x.exp()), a, b)?;

    let (ms, omega_peak) = if v_ref > grid_peak {
        (v_ref, w_ref)
    } else {
        (grid_peak, grid[i])
    };
    Ok(MsResult {
        ms,
        omega_peak,
        grid: MsGrid {
            lo,
            hi,
            points: GRID_POINTS,
            refine_tol: REFINE_TOL,
        },
    })
}

/// Maximizes `f` on `[a, b]` in log-frequency; stops when the bracket is
/// narrower than `REFINE_TOL` (a relative width in `w`).
fn golden_max<F>(f: F, mut a: f64, mut b: f64) -> Result<(f64, f64), AnalysisError>
where
    F: Fn(f64) -> Result<f64, AnalysisError>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > REFINE_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    Ok([(c, fc), (d, fd), (x, fx)]
        .into_iter()
        .fold((x.exp(), f64::NEG_INFINITY), |acc, (x, v)| {
            if v > acc.1 {
                (x.exp(), v)
            } else {
                acc
            }
        }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{make_controller, ControllerKind, ControllerParams, Dof, PidParams};
    use crate::tf::RationalTF;
    use approx::assert_relative_eq;

    fn pi_loop(kp: f64, ki: f64, plant: RationalTF) -> LoopAssembly {
        let c = make_controller(
            ControllerKind::Pi,
            Dof::One,
            &ControllerParams::Pid(PidParams::pi(kp, ki)),
        )
        .unwrap();
        LoopAssembly::new(plant, c).unwrap()
    }

    #[test]
    fn zero_controller_gives_unity() {
        let mut a = pi_loop(1.0, 1.0, RationalTF::s(&[1.0], &[1.0, 1.0]));
        a.controller.feedback = a.controller.feedback.scale(0.0);
        let r = ms_index(&a, DEFAULT_MS_RANGE).unwrap();
        assert_eq!(r.ms, 1.0);
    }

    #[test]
    fn known_peak_of_integrator_loop() {
        // L = 1/(s (s + 1)):|S|^2 = w^2 (1 + w^2) / ((1 - w^2)^2 + w^2)
        let c = make_controller(
            ControllerKind::Pi,
            Dof::One,
            &ControllerParams::Pid(PidParams::pi(0.0, 1.0)),
        )
        .unwrap();
        let a = LoopAssembly::new(RationalTF::s(&[1.0], &[1.0, 1.0]), c).unwrap();
        let r = ms_index(&a, DEFAULT_MS_RANGE).unwrap();
        let s2 = |w: f64| w * w * (1.0 + w * w) / ((1.0 - w * w).powi(2) + w * w);
        // dense brute-force oracle
        let brute = (0..200_000)
            .map(|i| 0.5 + 2.5 * i as f64 / 200_000.0)
            .map(|w| s2(w).sqrt())
            .fold(0.0, f64::max);
        assert_relative_eq!(r.ms, brute, max_relative = 1e-7);
        assert_relative_eq!(s2(r.omega_peak).sqrt(), r.ms, max_relative = 1e-12);
    }

    #[test]
    fn refinement_not_below_grid() {
        let a = pi_loop(
            1.0,
            2.5,
            RationalTF::s(&[1.0], &[1.0, 1.0]).with_delay(0.2).unwrap(),
        );
        let r = ms_index(&a, DEFAULT_MS_RANGE).unwrap();
        let grid_best = log_grid(1e-3, 1e3, 2000)
            .into_iter()
            .map(|w| 1.0 / (1.0 + a.loop_gain(w).unwrap()).norm())
            .fold(0.0, f64::max);
        assert!(r.ms >= grid_best);
    }

    #[test]
    fn boundary_loop_detected() {
        // L = -1 for a static loop gain
        let mut a = pi_loop(1.0, 1.0, RationalTF::s(&[-1.0], &[1.0]));
        a.controller.feedback = RationalTF::s(&[1.0], &[1.0]);
        assert!(matches!(
            ms_index(&a, (0.1, 10.0)),
            Err(AnalysisError::UnstableEvaluation { .. })
        ));
    }

    #[test]
    fn invalid_range() {
        let a = pi_loop(1.0, 1.0, RationalTF::s(&[1.0], &[1.0, 1.0]));
        assert!(ms_index(&a, (0.0, 1.0)).is_err());
        assert!(ms_index(&a, (2.0, 1.0)).is_err());
    }
}
