use eqadrc::discretize::{
    append_audit_log, ceq2_z, eadrc_fb_z, eadrc_pf_z, euler_discretize, pid_z, quantize_controller,
    AuditRecord, DiscreteBuild, DiscreteController, QFormat,
};
use eqadrc::sim::{scenario_one_gains, scenario_two_gains};
use eqadrc::synth::{
    build_ceq, build_eadrc_fb, build_pid_fb, make_controller, pid_from_adrc, ControllerKind,
    ControllerParams, Dof, FilterSpec,
};
use eqadrc::tf::{dc_gain, freq_eval, log_grid, RationalTF};
use proptest::prelude::*;

fn all_builds() -> Vec<(DiscreteBuild, RationalTF)> {
    let g1 = scenario_one_gains();
    let g2 = scenario_two_gains();
    let ts1 = 1e-4;
    let pid = pid_from_adrc(&g1)
        .unwrap()
        .with_output_filter(FilterSpec::FirstOrder { t: 0.005 });
    let pid2 = pid_from_adrc(&g2).unwrap();
    let pf = make_controller(
        ControllerKind::Eadrc,
        Dof::Two,
        &ControllerParams::Eadrc {
            gains: g2.clone(),
            beta: 0.6,
            fr: FilterSpec::FirstOrder { t: 0.03 },
        },
    )
    .unwrap()
    .prefilter;
    vec![
        (pid_z(&pid, ts1).unwrap(), build_pid_fb(&pid).unwrap()),
        (eadrc_fb_z(&g1, ts1).unwrap(), build_eadrc_fb(&g1).unwrap()),
        (
            ceq2_z(&g1, 0.005, ts1).unwrap(),
            build_ceq(&g1, &FilterSpec::FirstOrder { t: 0.005 }).unwrap(),
        ),
        (eadrc_pf_z(&g2, &pid2, 0.6, 0.03, 1e-3).unwrap(), pf),
    ]
}

#[test]
fn oracle_realizations_equal_whole_euler_substitution() {
    for (b, continuous) in all_builds() {
        let ts = b.oracle.ts();
        let whole = euler_discretize(&continuous, ts).unwrap();
        // stay below Nyquist and away from z = 1 where the whole polynomial loses digits
        let w = log_grid(1.0, 0.9 * std::f64::consts::PI / ts, 200);
        let dev = freq_eval(&b.oracle, &w)
            .unwrap()
            .max_rel_deviation(&freq_eval(&whole, &w).unwrap());
        assert!(dev < 1e-7, "{}: {dev}", b.audit.builder);
        assert!(b.audit.oracle_self_dev < 1e-9, "{}", b.audit.builder);
    }
}

#[test]
fn audit_verdicts() {
    let verdicts: Vec<(String, bool)> = all_builds()
        .into_iter()
        .map(|(b, _)| (b.audit.builder.clone(), b.audit.agrees))
        .collect();
    assert_eq!(
        verdicts,
        vec![
            ("pid_z".to_string(), false),
            ("eadrc_fb_z".to_string(), true),
            ("ceq2_z".to_string(), false),
            ("eadrc_pf_z".to_string(), false),
        ]
    );
}

#[test]
fn prefilter_oracle_keeps_unit_dc_gain() {
    let (b, _) = all_builds().pop().unwrap();
    assert!((b.audit.dc_oracle.unwrap() - 1.0).abs() < 1e-9);
    assert!((dc_gain(&b.oracle.tf()).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn audit_log_is_json_lines() {
    let path = std::env::temp_dir().join(format!("eqadrc-audit-{}.jsonl", std::process::id()));
    let _ = std::fs::remove_file(&path);
    let records: Vec<AuditRecord> = all_builds().into_iter().map(|(b, _)| b.audit).collect();
    append_audit_log(&path, &records).unwrap();
    append_audit_log(&path, &records[..1]).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    let parsed: Vec<AuditRecord> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(parsed.len(), 5);
    // an infinite DC gain has no JSON number and reads back as null
    assert_eq!(parsed[0].formula_num, records[0].formula_num);
    assert_eq!(parsed[0].oracle_den, records[0].oracle_den);
    assert_eq!(parsed[0].freq_max_rel_dev, records[0].freq_max_rel_dev);
    assert_eq!(parsed[1].dc_oracle, None);
    assert_eq!(parsed[4].builder, "pid_z");
}

fn step_all(c: &mut DiscreteController, xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| c.step(x)).collect()
}

#[test]
fn fixed_point_tracks_double_precision() {
    let b = eadrc_fb_z(&scenario_one_gains(), 1e-4).unwrap();
    let mut d = b.oracle.clone();
    let mut q = quantize_controller(&b.oracle, QFormat::default()).unwrap();
    let xs: Vec<f64> = (0..5000).map(|k| (k as f64 * 0.01).sin()).collect();
    let yd = step_all(&mut d, &xs);
    let yq = step_all(&mut q, &xs);
    let peak = yd.iter().fold(0f64, |m, v| m.max(v.abs()));
    let worst = yd
        .iter()
        .zip(&yq)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-6 * peak, "{worst} vs {peak}");
    assert!(worst > 0.0);
}

proptest! {
    #[test]
    fn stepping_is_linear(a in -10.0f64..10.0, b in -10.0f64..10.0) {
        let base = eadrc_fb_z(&scenario_two_gains(), 1e-3).unwrap().oracle;
        let xs: Vec<f64> = (0..200).map(|k| (k as f64 * 0.1).cos()).collect();
        let ys: Vec<f64> = (0..200).map(|k| (k as f64 * 0.37).sin()).collect();
        let mix: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| a * x + b * y).collect();
        let (mut c1, mut c2, mut c3) = (base.clone(), base.clone(), base);
        let ox = step_all(&mut c1, &xs);
        let oy = step_all(&mut c2, &ys);
        let om = step_all(&mut c3, &mix);
        for i in 0..200 {
            let want = a * ox[i] + b * oy[i];
            prop_assert!((om[i] - want).abs() <= 1e-9 * (1.0 + want.abs()));
        }
    }
}
