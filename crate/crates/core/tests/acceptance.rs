//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status
//! if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use eqadrc::analysis::{
    channel_er, channel_un, channel_yd, ms_index, LoopAssembly, DEFAULT_MS_RANGE,
};
use eqadrc::discretize::{
    append_audit_log, ceq2_z, eadrc_fb_z, eadrc_pf_z, pid_z, DiscreteBuild, DiscreteController,
};
use eqadrc::sim::{
    benchmark_controller, compute_metrics, run_closed_loop, scenario_one, scenario_one_gains,
    scenario_two, scenario_two_gains, transient_test, BenchmarkPlant, ScenarioOneVariant,
    ScenarioTwoVariant, SimScenario, SimTrace,
};
use eqadrc::synth::{
    bandwidth_tune, build_ceq, build_eadrc_fb, build_eadrc_fb_general, build_pid_fb, crib_sheet,
    pid_from_adrc, AdrcGains, ControllerKind, Dof, FilterSpec,
};
use eqadrc::tf::{dc_gain, freq_eval, log_grid, tf_series, FrequencyEval, RationalTF};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.3} s", d.as_secs_f64())
}

fn rel_rms(a: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(reference).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = reference.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn run(sc: &SimScenario) -> SimTrace {
    run_closed_loop(sc).expect("scenario runs")
}

fn assembly(p: BenchmarkPlant, kind: ControllerKind, dof: Dof, beta: f64) -> LoopAssembly {
    LoopAssembly::new(p.tf(), benchmark_controller(p, kind, dof, beta).unwrap()).unwrap()
}

/// Uniform `omega_cl`, `k_eso`; log-uniform `b0`.
fn random_gains(rng: &mut ChaCha8Rng, n: usize) -> AdrcGains {
    let w = rng.random_range(0.5..=100.0);
    let k = rng.random_range(2.0..=50.0);
    let b0 = 10f64.powf(rng.random_range(-1.0..=7.0));
    bandwidth_tune(n, w, k, b0).unwrap()
}

fn ms_reproduction() -> Outcome {
    let cases = [
        (
            "PI on G_P1",
            BenchmarkPlant::FirstOrder,
            ControllerKind::Pi,
            1.55,
        ),
        (
            "eADRC on G_P1",
            BenchmarkPlant::FirstOrder,
            ControllerKind::Eadrc,
            1.55,
        ),
        (
            "PID on G_P2",
            BenchmarkPlant::SecondOrder,
            ControllerKind::Pid,
            1.45,
        ),
        (
            "eADRC on G_P2",
            BenchmarkPlant::SecondOrder,
            ControllerKind::Eadrc,
            1.45,
        ),
    ];
    let mut pass = true;
    let mut parts = vec![];
    for (name, p, kind, target) in cases {
        let t = Instant::now();
        let r = ms_index(&assembly(p, kind, Dof::One, 1.0), DEFAULT_MS_RANGE).unwrap();
        let el = t.elapsed();
        let ok = (r.ms - target).abs() <= 0.02 && el < Duration::from_secs(1);
        pass &= ok;
        parts.push(format!(
            "{name}: Ms={:.4} (target {target}±0.02, {}) {}",
            r.ms,
            secs(el),
            if ok { "ok" } else { "out" }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn equivalence_identity() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let w = log_grid(1e-3, 1e5, 200);
    let mut worst = [0f64; 2];
    for n in [1, 2] {
        for _ in 0..100 {
            let g = random_gains(&mut rng, n);
            let pid = pid_from_adrc(&g).unwrap();
            let composed = tf_series(
                &build_pid_fb(&pid).unwrap(),
                &build_ceq(&g, &pid.fy).unwrap(),
            )
            .unwrap();
            let dev = freq_eval(&composed, &w)
                .unwrap()
                .max_rel_deviation(&freq_eval(&build_eadrc_fb(&g).unwrap(), &w).unwrap());
            worst[n - 1] = worst[n - 1].max(dev);
        }
    }
    let el = t.elapsed();
    let pass = worst.iter().all(|&d| d < 1e-9) && el < Duration::from_secs(5);
    outcome(
        pass,
        format!(
            "100 gain sets per order; max deviation n=1 {:.2e}, n=2 {:.2e} (tol 1e-9); {}",
            worst[0],
            worst[1],
            secs(el)
        ),
    )
}

/// Largest coefficient deviation relative to the largest coefficient of the
/// same polynomial.
fn coeff_dev(a: &RationalTF, b: &RationalTF) -> f64 {
    let (a, b) = (a.normalized(), b.normalized());
    let mut worst = 0f64;
    for (p, q) in [(a.num(), b.num()), (a.den(), b.den())] {
        let deg = p.degree().max(q.degree());
        let scale = p.max_abs().max(q.max_abs());
        for i in 0..=deg {
            worst = worst.max((p.coeff(i) - q.coeff(i)).abs() / scale);
        }
    }
    worst
}

fn general_form_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut parts = vec![];
    let mut pass = true;
    for n in [1, 2] {
        let mut ok = 0;
        let mut worst = 0f64;
        for _ in 0..100 {
            let g = random_gains(&mut rng, n);
            let dev = coeff_dev(
                &build_eadrc_fb_general(&g).unwrap(),
                &build_eadrc_fb(&g).unwrap(),
            );
            worst = worst.max(dev);
            if dev <= 1e-9 {
                ok += 1;
            }
        }
        pass &= ok == 100;
        parts.push(format!(
            "n={n}: {ok}/100 within 1e-9 (max deviation {worst:.2e})"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn builds() -> Vec<DiscreteBuild> {
    let (g1, g2) = (scenario_one_gains(), scenario_two_gains());
    let mut out = vec![];
    for tf in [0.005, 0.0003] {
        let pid = pid_from_adrc(&g1)
            .unwrap()
            .with_output_filter(FilterSpec::FirstOrder { t: tf });
        out.push(pid_z(&pid, 1e-4).unwrap());
        out.push(ceq2_z(&g1, tf, 1e-4).unwrap());
    }
    out.push(eadrc_fb_z(&g1, 1e-4).unwrap());
    out.push(eadrc_fb_z(&g2, 1e-3).unwrap());
    let pid2 = pid_from_adrc(&g2).unwrap();
    for tr in [0.03, 0.08] {
        out.push(eadrc_pf_z(&g2, &pid2, 0.6, tr, 1e-3).unwrap());
    }
    out
}

fn same_blocks(a: &[DiscreteController], b: &[&DiscreteController]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.coefficients() == y.coefficients())
}

fn discretization_oracle() -> Outcome {
    let all = builds();
    let log = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-audit.jsonl");
    let _ = std::fs::remove_file(&log);
    let records: Vec<_> = all.iter().map(|b| b.audit.clone()).collect();
    let logged = append_audit_log(&log, &records).is_ok()
        && std::fs::read_to_string(&log).is_ok_and(|s| s.lines().count() == records.len());

    let agreeing = all.iter().filter(|b| b.audit.agrees).count();
    let self_consistent = all.iter().all(|b| b.audit.oracle_self_dev < 1e-9);

    // the simulator pipelines are built from the oracle realizations
    let (g1, g2) = (scenario_one_gains(), scenario_two_gains());
    let pid = pid_from_adrc(&g1)
        .unwrap()
        .with_output_filter(FilterSpec::FirstOrder { t: 0.005 });
    let s1 = scenario_one(ScenarioOneVariant::PidPlusCeq2 { tf: 0.005 }, 0).unwrap();
    let s1e = scenario_one(ScenarioOneVariant::Eadrc, 0).unwrap();
    let s2 = scenario_two(ScenarioTwoVariant::Eadrc2Dof { tr: 0.03 }, 0).unwrap();
    let pid_b = pid_z(&pid, 1e-4).unwrap();
    let ceq_b = ceq2_z(&g1, 0.005, 1e-4).unwrap();
    let fb1 = eadrc_fb_z(&g1, 1e-4).unwrap();
    let fb2 = eadrc_fb_z(&g2, 1e-3).unwrap();
    let pf2 = eadrc_pf_z(&g2, &pid_from_adrc(&g2).unwrap(), 0.6, 0.03, 1e-3).unwrap();
    let uses_oracle = same_blocks(&s1.controller.feedback, &[&pid_b.oracle, &ceq_b.oracle])
        && same_blocks(&s1e.controller.feedback, &[&fb1.oracle])
        && same_blocks(&s2.controller.feedback, &[&fb2.oracle])
        && same_blocks(&s2.controller.prefilter, &[&pf2.oracle]);

    let disagreeing: Vec<String> = all
        .iter()
        .filter(|b| !b.audit.agrees)
        .map(|b| {
            format!(
                "{} (coeff dev {:.2e})",
                b.audit.builder, b.audit.coeff_max_rel_dev
            )
        })
        .collect();
    outcome(
        logged && self_consistent && uses_oracle,
        format!(
            "{} builds, {agreeing} agree with the Euler oracle to 1e-9, audit records logged for the rest: [{}]; \
             log written: {logged}; oracle self-consistent: {self_consistent}; simulator uses oracle: {uses_oracle}",
            all.len(),
            disagreeing.join(", ")
        ),
    )
}

fn scenario_one_equivalence() -> Outcome {
    let mut pass = true;
    let mut parts = vec![];
    for tf in [0.005, 0.0003] {
        let t = Instant::now();
        let a = run(&scenario_one(ScenarioOneVariant::PidPlusCeq2 { tf }, 7).unwrap());
        let b = run(&scenario_one(ScenarioOneVariant::Eadrc, 7).unwrap());
        let el = t.elapsed();
        let dev = rel_rms(&a.y, &b.y);
        let ok = dev < 1e-6 && a.len() == 60_000 && el < Duration::from_secs(10);
        pass &= ok;
        parts.push(format!(
            "Tf={tf}: {} steps, relative RMS y {dev:.2e}, u {:.2e} ({} for both runs)",
            a.len(),
            rel_rms(&a.u, &b.u),
            secs(el)
        ));
    }
    outcome(pass, parts.join("; "))
}

fn dof_separation() -> Outcome {
    let w = log_grid(1e-3, 1e3, 500);
    let mut freq_worst = 0f64;
    let mut sim_worst = 0f64;
    for p in [BenchmarkPlant::FirstOrder, BenchmarkPlant::SecondOrder] {
        for kind in [p.pid_kind(), ControllerKind::Eadrc] {
            let one = assembly(p, kind, Dof::One, 1.0);
            for beta in p.betas() {
                let two = assembly(p, kind, Dof::Two, beta);
                for (a, b) in [
                    (channel_yd(&one), channel_yd(&two)),
                    (channel_un(&one), channel_un(&two)),
                ] {
                    let dev = freq_eval(&a, &w)
                        .unwrap()
                        .max_rel_deviation(&freq_eval(&b, &w).unwrap());
                    freq_worst = freq_worst.max(dev);
                }
            }

            // disturbance- and noise-driven part of y, 1DOF vs 2DOF, same seed
            let beta = p.betas()[1];
            let component = |dof: Dof, beta: f64| -> (Vec<f64>, f64) {
                let sc = transient_test(p, kind, dof, beta, 11).unwrap();
                let full = run(&sc);
                let quiet = run(&sc.without_noise().without_disturbance());
                let y_max = full.y.iter().fold(0f64, |m, v| m.max(v.abs()));
                let c = full.y.iter().zip(&quiet.y).map(|(a, b)| a - b).collect();
                (c, y_max)
            };
            let (c1, y_max) = component(Dof::One, 1.0);
            let (c2, _) = component(Dof::Two, beta);
            let diff = c1
                .iter()
                .zip(&c2)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            sim_worst = sim_worst.max(diff / y_max);
        }
    }
    outcome(
        freq_worst <= 1e-12 && sim_worst <= 1e-9,
        format!(
            "G_YD/G_UN max relative deviation {freq_worst:.2e} (tol 1e-12); \
             simulated disturbance/noise response max deviation {sim_worst:.2e} of output scale (tol 1e-9, rounding floor)"
        ),
    )
}

fn steady_state() -> Outcome {
    let mut worst_phase = (0f64, String::new());
    let mut check = |tr: &SimTrace, t: f64| {
        let i = tr.index_at(t).min(tr.len()) - 1;
        let e = tr.e[i].abs();
        if e >= worst_phase.0 {
            worst_phase = (e, format!("{} at {t} s", tr.label));
        }
    };
    for p in [BenchmarkPlant::FirstOrder, BenchmarkPlant::SecondOrder] {
        for kind in [p.pid_kind(), ControllerKind::Eadrc] {
            let mut cases = vec![transient_test(p, kind, Dof::One, 1.0, 0).unwrap()];
            for beta in p.betas() {
                cases.push(transient_test(p, kind, Dof::Two, beta, 0).unwrap());
            }
            for sc in cases {
                let tr = run(&sc.without_noise());
                check(&tr, 10.0);
                check(&tr, 20.0);
            }
        }
    }
    let mut scenarios: Vec<SimScenario> = [
        ScenarioOneVariant::Pid { tf: 0.005 },
        ScenarioOneVariant::Pid { tf: 0.0003 },
        ScenarioOneVariant::Eadrc,
        ScenarioOneVariant::PidPlusCeq2 { tf: 0.005 },
        ScenarioOneVariant::PidPlusCeq2 { tf: 0.0003 },
    ]
    .into_iter()
    .map(|v| scenario_one(v, 0).unwrap())
    .collect();
    for v in [
        ScenarioTwoVariant::Eadrc1Dof,
        ScenarioTwoVariant::Eadrc2Dof { tr: 0.03 },
        ScenarioTwoVariant::Eadrc2Dof { tr: 0.08 },
    ] {
        scenarios.push(scenario_two(v, 0).unwrap());
    }
    for sc in scenarios {
        // a full square-wave period: step phases end at 1.5, 3, 5 and 10 s
        let tr = run(&SimScenario {
            t_end: 10.0,
            ..sc.without_noise()
        });
        for t in [1.5, 3.0, 5.0, 10.0] {
            check(&tr, t);
        }
    }

    let mut dc_worst = 0f64;
    let mut dc_count = 0;
    let mut note_dc = |tf: &RationalTF| {
        dc_worst = dc_worst.max((dc_gain(tf).unwrap() - 1.0).abs());
        dc_count += 1;
    };
    for p in [BenchmarkPlant::FirstOrder, BenchmarkPlant::SecondOrder] {
        for kind in [p.pid_kind(), ControllerKind::Eadrc] {
            note_dc(
                &benchmark_controller(p, kind, Dof::One, 1.0)
                    .unwrap()
                    .prefilter,
            );
            for beta in p.betas() {
                note_dc(
                    &benchmark_controller(p, kind, Dof::Two, beta)
                        .unwrap()
                        .prefilter,
                );
            }
        }
        let g = p.eadrc_gains();
        for beta in p.betas() {
            let pid = pid_from_adrc(&g)
                .unwrap()
                .with_beta(beta)
                .with_reference_filter(FilterSpec::FirstOrder { t: 0.001 });
            for row in crib_sheet(&g, &pid).unwrap().rows {
                note_dc(&RationalTF::s(&row.prefilter.num, &row.prefilter.den));
            }
        }
    }
    outcome(
        worst_phase.0 < 1e-3 && dc_worst <= 1e-12,
        format!(
            "worst phase-end |e| {:.2e} ({}; tol 1e-3, noise off); {dc_count} prefilters, max |dc - 1| {dc_worst:.1e}",
            worst_phase.0, worst_phase.1
        ),
    )
}

fn trends() -> Outcome {
    let t = Instant::now();
    let window = Some((0.0, 1.5));
    let m = |tr: f64| {
        let sc = scenario_two(ScenarioTwoVariant::Eadrc2Dof { tr }, 0).unwrap();
        compute_metrics(&run(&sc.without_noise()), window).unwrap()
    };
    let (fast, slow) = (m(0.03), m(0.08));
    let el_sim = t.elapsed();
    let (r_fast, r_slow) = (fast.rise_time.unwrap_or(0.0), slow.rise_time.unwrap_or(0.0));
    let sim_ok = slow.overshoot_pct < fast.overshoot_pct
        && slow.u_peak < fast.u_peak
        && r_slow > r_fast
        && el_sim < Duration::from_secs(10);

    let t = Instant::now();
    let p = BenchmarkPlant::FirstOrder;
    let mid = log_grid(0.1, 2.0, 100);
    let mut beta_ok = true;
    let mut min_gap = f64::INFINITY;
    for kind in [ControllerKind::Pi, ControllerKind::Eadrc] {
        let hi = channel_er(&assembly(p, kind, Dof::Two, 0.7));
        let lo = channel_er(&assembly(p, kind, Dof::Two, 0.3));
        for &w in &mid {
            let gap = lo.response_at(w).unwrap().norm() - hi.response_at(w).unwrap().norm();
            min_gap = min_gap.min(gap);
            beta_ok &= gap > 0.0;
        }
    }
    let el_beta = t.elapsed();
    beta_ok &= el_beta < Duration::from_secs(10);
    outcome(
        sim_ok && beta_ok,
        format!(
            "Tr 0.08 vs 0.03: overshoot {:.3}% vs {:.3}%, u_peak {:.5} vs {:.5}, rise {:.3} s vs {:.3} s ({}); \
             |G_ER| beta 0.3 minus beta 0.7 over 0.1..2 rad/s, min {min_gap:.3e} ({})",
            slow.overshoot_pct,
            fast.overshoot_pct,
            slow.u_peak,
            fast.u_peak,
            r_slow,
            r_fast,
            secs(el_sim),
            secs(el_beta)
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 Ms reproduction", ms_reproduction),
        ("2 equivalence identity", equivalence_identity),
        ("3 general-form oracle", general_form_oracle),
        ("4 discretization oracle", discretization_oracle),
        ("5 Scenario I equivalence", scenario_one_equivalence),
        ("6 DOF separation", dof_separation),
        ("7 steady state", steady_state),
        ("8 trends", trends),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
