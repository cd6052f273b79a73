use eqadrc::discretize::QFormat;
use eqadrc::sim::{
    compute_metrics, run_closed_loop, scenario_one, scenario_two, transient_test, BenchmarkPlant,
    ScenarioOneVariant, ScenarioTwoVariant, SimScenario, SimTrace,
};
use eqadrc::synth::{ControllerKind, Dof};

fn rel_rms(a: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(reference).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = reference.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn run(sc: &SimScenario) -> SimTrace {
    run_closed_loop(sc).unwrap()
}

/// Runs independent scenarios on scoped threads, preserving order.
fn run_all(scs: &[SimScenario]) -> Vec<SimTrace> {
    std::thread::scope(|s| {
        let handles: Vec<_> = scs.iter().map(|sc| s.spawn(move || run(sc))).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

fn transient_cases() -> Vec<SimScenario> {
    let mut out = vec![];
    for p in [BenchmarkPlant::FirstOrder, BenchmarkPlant::SecondOrder] {
        for kind in [p.pid_kind(), ControllerKind::Eadrc] {
            out.push(transient_test(p, kind, Dof::One, 1.0, 5).unwrap());
            for beta in p.betas() {
                out.push(transient_test(p, kind, Dof::Two, beta, 5).unwrap());
            }
        }
    }
    out
}

#[test]
fn pid_plus_ceq2_reproduces_eadrc() {
    let eadrc = run(&scenario_one(ScenarioOneVariant::Eadrc, 7).unwrap());
    for tf in [0.005, 0.0003] {
        let pair = run(&scenario_one(ScenarioOneVariant::PidPlusCeq2 { tf }, 7).unwrap());
        assert_eq!(pair.len(), 60_000);
        assert!(rel_rms(&pair.y, &eadrc.y) < 1e-6);
        assert!(rel_rms(&pair.u, &eadrc.u) < 1e-4);
    }
    // a plain PID is visibly different
    let pid = run(&scenario_one(ScenarioOneVariant::Pid { tf: 0.005 }, 7).unwrap());
    assert!(rel_rms(&pid.u, &eadrc.u) > 1e-3);
}

#[test]
fn fixed_point_pipelines_stay_close() {
    for sc in [
        scenario_one(ScenarioOneVariant::PidPlusCeq2 { tf: 0.005 }, 3).unwrap(),
        scenario_two(ScenarioTwoVariant::Eadrc2Dof { tr: 0.03 }, 3).unwrap(),
    ] {
        let double = run(&sc);
        let mut q = sc.clone();
        q.controller = sc.controller.quantized(QFormat::default()).unwrap();
        let fixed = run(&q);
        let dev = rel_rms(&fixed.y, &double.y);
        assert!(dev > 0.0 && dev < 1e-6, "{}: {dev}", sc.label);
    }
}

#[test]
fn identical_scenarios_give_identical_traces() {
    let sc = scenario_two(ScenarioTwoVariant::Eadrc2Dof { tr: 0.08 }, 42).unwrap();
    let (a, b) = (run(&sc), run(&sc));
    assert_eq!(a.to_csv(), b.to_csv());
    let other = run(&scenario_two(ScenarioTwoVariant::Eadrc2Dof { tr: 0.08 }, 43).unwrap());
    assert_ne!(a.y_meas, other.y_meas);
}

#[test]
fn halving_the_integration_step_barely_moves_the_output() {
    let mut cases = vec![
        scenario_one(ScenarioOneVariant::Eadrc, 1).unwrap(),
        scenario_one(ScenarioOneVariant::Pid { tf: 0.0003 }, 1).unwrap(),
        scenario_one(ScenarioOneVariant::PidPlusCeq2 { tf: 0.005 }, 1).unwrap(),
        scenario_two(ScenarioTwoVariant::Eadrc1Dof, 1).unwrap(),
        scenario_two(ScenarioTwoVariant::Eadrc2Dof { tr: 0.03 }, 1).unwrap(),
    ];
    cases.extend(transient_cases().into_iter().step_by(3));
    let fine: Vec<SimScenario> = cases
        .iter()
        .map(|sc| SimScenario {
            substeps: 2 * sc.substeps,
            ..sc.clone()
        })
        .collect();
    let (coarse, fine) = (run_all(&cases), run_all(&fine));
    for ((sc, c), f) in cases.iter().zip(&coarse).zip(&fine) {
        let dev = rel_rms(&c.y, &f.y);
        assert!(dev < 1e-6, "{}: {dev}", sc.label);
    }
}

/// Error at the last sample before `t`.
fn error_before(tr: &SimTrace, t: f64) -> f64 {
    tr.e[tr.index_at(t) - 1].abs()
}

#[test]
fn integral_action_in_transient_tests() {
    let cases: Vec<SimScenario> = transient_cases()
        .iter()
        .map(|s| s.without_noise())
        .collect();
    for (sc, tr) in cases.iter().zip(run_all(&cases)) {
        for t in [10.0, 20.0] {
            let e = if t == 20.0 {
                tr.e.last().unwrap().abs()
            } else {
                error_before(&tr, t)
            };
            assert!(e < 1e-3, "{} at {t}: {e}", sc.label);
        }
    }
}

#[test]
fn integral_action_in_scenarios() {
    let mut cases: Vec<SimScenario> = [
        ScenarioOneVariant::Pid { tf: 0.005 },
        ScenarioOneVariant::Pid { tf: 0.0003 },
        ScenarioOneVariant::Eadrc,
        ScenarioOneVariant::PidPlusCeq2 { tf: 0.005 },
    ]
    .into_iter()
    .map(|v| scenario_one(v, 0).unwrap())
    .collect();
    for v in [
        ScenarioTwoVariant::Eadrc1Dof,
        ScenarioTwoVariant::Eadrc2Dof { tr: 0.03 },
        ScenarioTwoVariant::Eadrc2Dof { tr: 0.08 },
    ] {
        cases.push(scenario_two(v, 0).unwrap());
    }
    // one full square-wave period
    let cases: Vec<SimScenario> = cases
        .iter()
        .map(|sc| SimScenario {
            t_end: 10.0,
            ..sc.without_noise()
        })
        .collect();
    for (sc, tr) in cases.iter().zip(run_all(&cases)) {
        for t in [1.5, 3.0, 5.0] {
            assert!(error_before(&tr, t) < 1e-3, "{} at {t}", sc.label);
        }
        assert!(tr.e.last().unwrap().abs() < 1e-3, "{} at end", sc.label);
    }
}

#[test]
fn reference_shaping_leaves_disturbance_response_alone() {
    let p = BenchmarkPlant::SecondOrder;
    let one = transient_test(p, ControllerKind::Eadrc, Dof::One, 1.0, 9).unwrap();
    let two = transient_test(p, ControllerKind::Eadrc, Dof::Two, 0.65, 9).unwrap();
    let quiet = |sc: &SimScenario| sc.without_noise().without_disturbance();
    let tr = run_all(&[one.clone(), quiet(&one), two.clone(), quiet(&two)]);
    let component = |full: &SimTrace, quiet: &SimTrace| -> Vec<f64> {
        full.y.iter().zip(&quiet.y).map(|(a, b)| a - b).collect()
    };
    let (c1, c2) = (component(&tr[0], &tr[1]), component(&tr[2], &tr[3]));
    let peak = c1.iter().fold(0f64, |m, v| m.max(v.abs()));
    assert!(peak > 1e-3, "{peak}");
    // rounding in the y ~ 1 traces sets the floor, not the component size
    let y_max = tr[0].y.iter().fold(0f64, |m, v| m.max(v.abs()));
    let worst = c1
        .iter()
        .zip(&c2)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-9 * y_max, "{worst}");
    // after the reference transient the raw traces coincide as well
    let late = tr[0].index_at(15.0);
    let raw = tr[0].y[late..]
        .iter()
        .zip(&tr[2].y[late..])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(raw <= 1e-6, "{raw}");
}

#[test]
fn longer_reference_filter_softens_the_step() {
    let window = Some((0.0, 1.5));
    let metrics = |tr: f64| {
        let sc = scenario_two(ScenarioTwoVariant::Eadrc2Dof { tr }, 0).unwrap();
        compute_metrics(&run(&sc.without_noise()), window).unwrap()
    };
    let (fast, slow) = (metrics(0.03), metrics(0.08));
    assert!(slow.overshoot_pct < fast.overshoot_pct);
    assert!(slow.u_peak < fast.u_peak);
    assert!(slow.rise_time.unwrap() > fast.rise_time.unwrap());
}
