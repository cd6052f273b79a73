//! Closed-form discrete coefficients of the PID, eADRC feedback, `C_EQ2` and
//! 2DOF eADRC prefilter, each paired with an independent Euler-substitution
//! realization and an audit of the difference.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{euler_discretize, DiscreteController, DiscretizeError};
use crate::synth::{
    build_ceq, build_eadrc_fb, build_pid_fb, eadrc_prefilter, AdrcGains, FilterSpec, PidParams,
    SynthError,
};
use crate::tf::{dc_gain, freq_eval, log_grid, Domain, Polynomial, RationalTF};

/// Relative frequency-response tolerance for calling the two realizations
/// equal.
const AGREE_TOL: f64 = 1e-9;
const AUDIT_POINTS: usize = 200;

/// Coefficient-level and frequency-level comparison of a closed-form
/// coefficient set against the Euler-substitution oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub builder: String,
    pub ts: f64,
    /// Ascending powers of `z`, denominator made monic.
    pub formula_num: Vec<f64>,
    pub formula_den: Vec<f64>,
    pub oracle_num: Vec<f64>,
    pub oracle_den: Vec<f64>,
    pub coeff_max_rel_dev: f64,
    pub freq_max_rel_dev: f64,
    pub omega_range: (f64, f64),
    /// Coefficient deviation of the oracle realization from a single Euler
    /// substitution of the whole continuous transfer function.
    pub oracle_self_dev: f64,
    pub dc_formula: Option<f64>,
    pub dc_oracle: Option<f64>,
    pub agrees: bool,
}

impl AuditRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("audit record serializes")
    }
}

/// Formula-coefficient realization, oracle realization, and their audit.
/// Simulation uses `oracle`.
#[derive(Clone, Debug)]
pub struct DiscreteBuild {
    pub verbatim: DiscreteController,
    pub oracle: DiscreteController,
    pub audit: AuditRecord,
}

/// Appends records as JSON lines.
pub fn append_audit_log(path: &Path, records: &[AuditRecord]) -> Result<(), DiscretizeError> {
    let io = |e: std::io::Error| DiscretizeError::Io(e.to_string());
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(io)?;
    for r in records {
        writeln!(f, "{}", r.to_json_line()).map_err(io)?;
    }
    Ok(())
}

fn check_ts(ts: f64) -> Result<(), DiscretizeError> {
    if ts > 0.0 && ts.is_finite() {
        Ok(())
    } else {
        Err(DiscretizeError::InvalidSampleTime(ts))
    }
}

fn second_order(g: &AdrcGains) -> Result<(), DiscretizeError> {
    g.validate()?;
    if g.n != 2 {
        return Err(SynthError::UnsupportedOrder(g.n).into());
    }
    Ok(())
}

fn ztf(num_desc: &[f64], den_desc: &[f64], ts: f64) -> Result<RationalTF, DiscretizeError> {
    Ok(RationalTF::new(
        Polynomial::from_descending(num_desc),
        Polynomial::from_descending(den_desc),
        Domain::Discrete { ts },
    )?)
}

fn monic(tf: &RationalTF) -> (Vec<f64>, Vec<f64>) {
    let n = tf.normalized();
    (n.num().coeffs().to_vec(), n.den().coeffs().to_vec())
}

fn coeff_dev(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    let scale = b
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    (0..len)
        .map(|i| {
            let (x, y) = (
                a.get(i).copied().unwrap_or(0.0),
                b.get(i).copied().unwrap_or(0.0),
            );
            let d = (x - y).abs();
            if y.abs() > 1e-12 * scale {
                d / y.abs()
            } else {
                d / scale
            }
        })
        .fold(0.0, f64::max)
}

fn audit(
    builder: &str,
    formula: &DiscreteController,
    oracle: &DiscreteController,
    continuous: &RationalTF,
) -> Result<AuditRecord, DiscretizeError> {
    let ts = oracle.ts();
    let (ft, ot) = (formula.tf(), oracle.tf());
    let (fnum, fden) = monic(&ft);
    let (onum, oden) = monic(&ot);
    let coeff_max_rel_dev = coeff_dev(&fnum, &onum).max(coeff_dev(&fden, &oden));
    let omega_range = (1e-2, 0.9 * std::f64::consts::PI / ts);
    let grid = log_grid(omega_range.0, omega_range.1, AUDIT_POINTS);
    let fo = freq_eval(oracle, &grid)?;
    let freq_max_rel_dev = freq_eval(formula, &grid)?.max_rel_deviation(&fo);
    let (wnum, wden) = monic(&euler_discretize(continuous, ts)?);
    let oracle_self_dev = coeff_dev(&onum, &wnum).max(coeff_dev(&oden, &wden));
    Ok(AuditRecord {
        builder: builder.to_string(),
        ts,
        formula_num: fnum,
        formula_den: fden,
        oracle_num: onum,
        oracle_den: oden,
        coeff_max_rel_dev,
        freq_max_rel_dev,
        omega_range,
        oracle_self_dev,
        dc_formula: dc_gain(&ft).ok(),
        dc_oracle: dc_gain(&ot).ok(),
        agrees: freq_max_rel_dev <= AGREE_TOL,
    })
}

/// Filtered PID feedback `(Kd s^2 + Kp s + Ki)/(s (Tf s + 1))` in `z`.
///
/// The closed-form constant numerator term is `Kd - Kp Ts + Kp Ts^2`; Euler
/// substitution gives `Kd - Kp Ts + Ki Ts^2`.
pub fn pid_z(p: &PidParams, ts: f64) -> Result<DiscreteBuild, DiscretizeError> {
    check_ts(ts)?;
    p.validate()?;
    let tf = match p.fy {
        FilterSpec::FirstOrder { t } => t,
        other => return Err(DiscretizeError::WrongFilterKind(format!("{other:?}"))),
    };
    let (kp, kd) = (p.kp, p.kd);
    let verbatim = DiscreteController::new(&ztf(
        &[kd, kp * ts - 2.0 * kd, kd - kp * ts + kp * ts * ts],
        &[tf, ts - 2.0 * tf, tf - ts],
        ts,
    )?)?;
    let continuous = build_pid_fb(p)?;
    let oracle = DiscreteController::new(&euler_discretize(&continuous, ts)?)?;
    let audit = audit("pid_z", &verbatim, &oracle, &continuous)?;
    Ok(DiscreteBuild {
        verbatim,
        oracle,
        audit,
    })
}

/// Second-order eADRC feedback `(Ts/b0) M(z) / ((z^2 + N1 z + N0)(z - 1))`,
/// realized as a quadratic section followed by an exact `1/(z - 1)`.
pub fn eadrc_fb_z(g: &AdrcGains, ts: f64) -> Result<DiscreteBuild, DiscretizeError> {
    check_ts(ts)?;
    second_order(g)?;
    let (k1, k2) = (g.k(1), g.k(2));
    let (l1, l2, l3) = (g.l(1), g.l(2), g.l(3));
    let m2 = k1 * l1 + k2 * l2 + l3;
    let m1 = -2.0 * m2 + ts * (k1 * l2 + k2 * l3);
    let m0 = m2 - ts * (k1 * l2 + k2 * l3) + ts * ts * k1 * l3;
    let n1 = ts * (k2 + l1) - 2.0;
    let n0 = -n1 + ts * ts * (l2 + k1 + l1 * k2) - 1.0;
    let gain = ts / g.b0;
    let integrator = ztf(&[1.0], &[1.0, -1.0], ts)?;
    let verbatim = DiscreteController::cascade(&[
        ztf(&[gain * m2, gain * m1, gain * m0], &[1.0, n1, n0], ts)?,
        integrator.clone(),
    ])?;

    // 1/s split off so the oracle keeps the same exact integrator
    let continuous = build_eadrc_fb(g)?;
    let quad = RationalTF::new(
        continuous.num().clone(),
        Polynomial::new(continuous.den().coeffs()[1..].to_vec()),
        Domain::S,
    )?;
    let oracle =
        DiscreteController::cascade(&[euler_discretize(&quad, ts)?.scale(ts), integrator])?;
    let audit = audit("eadrc_fb_z", &verbatim, &oracle, &continuous)?;
    Ok(DiscreteBuild {
        verbatim,
        oracle,
        audit,
    })
}

/// `C_EQ2` with a first-order output filter, `(L1 z + L0)/(P2 z^2 + P1 z + P0)`.
///
/// Closed-form `P1 = P2 (Ts k2 l1 - 2)`, `P0 = P2 (Ts k2 l1 + 1) + Ts^2`; Euler
/// substitution gives `P1 = P2 (Ts (k2 + l1) - 2)`,
/// `P0 = P2 (1 - Ts (k2 + l1)) + Ts^2`.
pub fn ceq2_z(g: &AdrcGains, tf: f64, ts: f64) -> Result<DiscreteBuild, DiscretizeError> {
    check_ts(ts)?;
    second_order(g)?;
    let fy = FilterSpec::FirstOrder { t: tf };
    fy.validate()?;
    let (k1, k2) = (g.k(1), g.k(2));
    let (l1, l2) = (g.l(1), g.l(2));
    let lc1 = ts * tf;
    let lc0 = -lc1 + ts * ts;
    let p2 = 1.0 / (k2 * l1 + l2 + k1);
    let p1 = p2 * (ts * k2 * l1 - 2.0);
    let p0 = p2 * (ts * k2 * l1 + 1.0) + ts * ts;
    let verbatim = DiscreteController::new(&ztf(&[lc1, lc0], &[p2, p1, p0], ts)?)?;
    let continuous = build_ceq(g, &fy)?;
    let oracle = DiscreteController::new(&euler_discretize(&continuous, ts)?)?;
    let audit = audit("ceq2_z", &verbatim, &oracle, &continuous)?;
    Ok(DiscreteBuild {
        verbatim,
        oracle,
        audit,
    })
}

/// 2DOF second-order eADRC prefilter with `F_R = 1/(Tr s + 1)`, cubic over
/// cubic in `z`. `pid` supplies `Kp`, `Ki`, `Kd`; its output filter must be
/// unity.
///
/// Closed-form numerator terms use `Kp beta + Ki (k2 + l1)` over
/// `k2 l1 + l2 + k1` and `-Ts^3 Ki` in `H0`; Euler substitution gives
/// `Kp beta (k2 + l1) + Ki` and `+Ts^3 Ki`.
pub fn eadrc_pf_z(
    g: &AdrcGains,
    pid: &PidParams,
    beta: f64,
    tr: f64,
    ts: f64,
) -> Result<DiscreteBuild, DiscretizeError> {
    check_ts(ts)?;
    second_order(g)?;
    if !(tr > 0.0 && tr.is_finite()) {
        return Err(DiscretizeError::InvalidParam(format!("Tr = {tr}")));
    }
    if !pid.fy.is_unity() {
        return Err(DiscretizeError::InvalidParam(
            "prefilter coefficients assume a unity output filter".into(),
        ));
    }
    let p = pid
        .with_beta(beta)
        .with_reference_filter(FilterSpec::FirstOrder { t: tr });
    p.validate()?;
    let (k1, k2) = (g.k(1), g.k(2));
    let (l1, l2) = (g.l(1), g.l(2));
    let c = k2 * l1 + l2 + k1;
    let (kp, ki, kd) = (p.kp, p.ki, p.kd);
    let kpb = kp * beta;
    let x = (kpb + ki * (k2 + l1)) / c;
    // the printed subterm reads "k2 + l + 1"; taken as k2 + l1
    let y = ki * (k2 + l1) / c;
    let (t1, t2, t3) = (ts, ts * ts, ts * ts * ts);
    let h3 = kpb / c;
    let h2 = -3.0 * h3 + t1 * x;
    let h1 = 3.0 * h3 - 2.0 * t1 * x + t2 * kpb + t2 * y;
    let h0 = -h3 + t1 * x - t2 * kpb - t2 * y - t3 * ki;
    let q3 = kd * tr;
    let q2 = -3.0 * q3 + t1 * (kd + kp * tr);
    let q1 = 3.0 * q3 - 2.0 * t1 * (kd + kp * tr) + t2 * (kp + ki * tr);
    let q0 = -q3 + t1 * (kd + kp * tr) - t2 * (kp + ki * tr) + t3 * ki;
    let verbatim = DiscreteController::new(&ztf(&[h3, h2, h1, h0], &[q3, q2, q1, q0], ts)?)?;

    let continuous = eadrc_prefilter(g, &p)?;
    let oracle = DiscreteController::new(&euler_discretize(&continuous, ts)?)?;
    let audit = audit("eadrc_pf_z", &verbatim, &oracle, &continuous)?;
    Ok(DiscreteBuild {
        verbatim,
        oracle,
        audit,
    })
}
