use approx::assert_relative_eq;
use eqadrc::analysis::{
    bode_export, channel_er, channel_un, channel_yd, ms_index, LoopAssembly, DEFAULT_MS_RANGE,
};
use eqadrc::sim::{benchmark_controller, BenchmarkPlant};
use eqadrc::synth::{ControllerKind, Dof};
use eqadrc::tf::{freq_eval, log_grid, FrequencyEval};

fn assembly(p: BenchmarkPlant, kind: ControllerKind, dof: Dof, beta: f64) -> LoopAssembly {
    LoopAssembly::new(p.tf(), benchmark_controller(p, kind, dof, beta).unwrap()).unwrap()
}

/// Brute-force peak of |S| on a dense grid.
fn dense_ms(a: &LoopAssembly) -> f64 {
    log_grid(1e-2, 1e3, 400_000)
        .into_iter()
        .map(|w| 1.0 / (1.0 + a.loop_gain(w).unwrap()).norm())
        .fold(0.0, f64::max)
}

#[test]
fn ms_agrees_with_dense_sweep() {
    for p in [BenchmarkPlant::FirstOrder, BenchmarkPlant::SecondOrder] {
        for kind in [p.pid_kind(), ControllerKind::Eadrc] {
            let a = assembly(p, kind, Dof::One, 1.0);
            let r = ms_index(&a, DEFAULT_MS_RANGE).unwrap();
            assert_relative_eq!(r.ms, dense_ms(&a), max_relative = 1e-6);
        }
    }
}

#[test]
fn second_order_ms_matches_reported_value() {
    let p = BenchmarkPlant::SecondOrder;
    for kind in [ControllerKind::Pid, ControllerKind::Eadrc] {
        let r = ms_index(&assembly(p, kind, Dof::One, 1.0), DEFAULT_MS_RANGE).unwrap();
        assert!((r.ms - 1.45).abs() <= 0.02, "{kind}: {}", r.ms);
    }
}

#[test]
fn ms_is_independent_of_prefilter() {
    for p in [BenchmarkPlant::FirstOrder, BenchmarkPlant::SecondOrder] {
        for kind in [p.pid_kind(), ControllerKind::Eadrc] {
            let one = ms_index(&assembly(p, kind, Dof::One, 1.0), DEFAULT_MS_RANGE).unwrap();
            for beta in p.betas() {
                let two = ms_index(&assembly(p, kind, Dof::Two, beta), DEFAULT_MS_RANGE).unwrap();
                assert_eq!(one.ms, two.ms);
            }
        }
    }
}

#[test]
fn disturbance_and_noise_channels_ignore_dof() {
    let w = log_grid(1e-3, 1e3, 500);
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
                    assert!(dev <= 1e-12, "{dev}");
                }
            }
        }
    }
}

#[test]
fn lower_beta_raises_midband_tracking_error() {
    let p = BenchmarkPlant::FirstOrder;
    let w = log_grid(0.1, 2.0, 100);
    for kind in [ControllerKind::Pi, ControllerKind::Eadrc] {
        let hi = channel_er(&assembly(p, kind, Dof::Two, 0.7));
        let lo = channel_er(&assembly(p, kind, Dof::Two, 0.3));
        for &x in &w {
            let (a, b) = (
                lo.response_at(x).unwrap().norm(),
                hi.response_at(x).unwrap().norm(),
            );
            assert!(a > b, "{kind} at {x}: {a} <= {b}");
        }
    }
}

#[test]
fn rational_channel_matches_pointwise() {
    let a = assembly(
        BenchmarkPlant::SecondOrder,
        ControllerKind::Eadrc,
        Dof::Two,
        0.75,
    );
    let w = log_grid(1e-2, 1e2, 50);
    for ch in [channel_yd(&a), channel_un(&a), channel_er(&a)] {
        let rat = ch.as_rational().unwrap();
        let dev = freq_eval(&rat, &w)
            .unwrap()
            .max_rel_deviation(&freq_eval(&ch, &w).unwrap());
        assert!(dev < 1e-9, "{dev}");
    }
    let delayed = assembly(
        BenchmarkPlant::FirstOrder,
        ControllerKind::Pi,
        Dof::One,
        1.0,
    );
    assert!(channel_yd(&delayed).as_rational().is_none());
}

#[test]
fn bode_csv_has_one_column_pair_per_channel() {
    let a = assembly(
        BenchmarkPlant::SecondOrder,
        ControllerKind::Pid,
        Dof::One,
        1.0,
    );
    let (yd, un) = (channel_yd(&a), channel_un(&a));
    let d = bode_export(&[("yd", &yd), ("un", &un)], (0.01, 100.0), 64).unwrap();
    let csv = d.to_csv();
    assert_eq!(
        csv.lines().next().unwrap(),
        "omega_rad_s,yd_mag_db,yd_phase_deg,un_mag_db,un_phase_deg"
    );
    assert_eq!(csv.lines().count(), 65);
    // byte-stable
    assert_eq!(
        csv,
        bode_export(&[("yd", &yd), ("un", &un)], (0.01, 100.0), 64)
            .unwrap()
            .to_csv()
    );
}
