use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use eqadrc::analysis::{
    bode_export, channel_er, channel_un, channel_yd, ms_index, LoopAssembly, DEFAULT_MS_RANGE,
};
use eqadrc::sim::{compute_metrics, run_closed_loop};
use eqadrc::synth::{
    build_ceq, build_eadrc_fb, build_pid_fb, crib_sheet, pid_from_adrc, FilterSpec, TfReport,
};
use eqadrc::tf::{log_grid, tf_series, FrequencyEval};

use crate::resolve::{self, Base};
use crate::svg::{line_plot, Panel, Series};
use crate::{CliError, Context, CribArgs, EquivArgs, Format, GainArgs, LoopArgs, SimArgs};

const EQUIV_TOL: f64 = 1e-9;
const EQUIV_RANGE: (f64, f64) = (1e-3, 1e4);
const EQUIV_POINTS: usize = 200;
const SWEEP_POINTS: usize = 400;

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Failure(format!("stdout: {e}")))
}

fn out_dir(ctx: &Context) -> Result<PathBuf, CliError> {
    let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

pub fn tune(ctx: &Context, args: &GainArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = resolve::gains(ctx.preset.as_ref(), &ctx.cfg, args)?;
    let pid = pid_from_adrc(&g).map_err(usage)?;
    let ceq = build_ceq(&g, &pid.fy).map_err(usage)?;
    let family = if g.n == 1 { "PI" } else { "PID" };
    let mut s = String::new();
    match ctx.format {
        Format::Text => {
            let _ = writeln!(s, "eADRC gains (n = {})", g.n);
            let _ = writeln!(s, "  k  = {}", list(&g.k));
            let _ = writeln!(s, "  l  = {}", list(&g.l));
            let _ = writeln!(s, "  b0 = {}", g.b0);
            let _ = writeln!(s, "equivalent {family}");
            let _ = writeln!(s, "  Kp = {}", pid.kp);
            let _ = writeln!(s, "  Ki = {}", pid.ki);
            let _ = writeln!(s, "  Kd = {}", pid.kd);
            let _ = writeln!(s, "equivalence filter C_EQ{} (ascending powers of s)", g.n);
            let _ = writeln!(s, "  num = {}", list(ceq.num().coeffs()));
            let _ = writeln!(s, "  den = {}", list(ceq.den().coeffs()));
        }
        Format::Csv => {
            s.push_str("quantity,index,value\n");
            let mut row = |q: &str, i: usize, v: f64| {
                let _ = writeln!(s, "{q},{i},{v:.17e}");
            };
            for (i, v) in g.k.iter().enumerate() {
                row("k", i + 1, *v);
            }
            for (i, v) in g.l.iter().enumerate() {
                row("l", i + 1, *v);
            }
            row("b0", 0, g.b0);
            row("kp", 0, pid.kp);
            row("ki", 0, pid.ki);
            row("kd", 0, pid.kd);
            for (i, v) in ceq.num().coeffs().iter().enumerate() {
                row("ceq_num", i, *v);
            }
            for (i, v) in ceq.den().coeffs().iter().enumerate() {
                row("ceq_den", i, *v);
            }
        }
    }
    emit(stdout, &s)
}

pub fn equiv_check(
    ctx: &Context,
    args: &EquivArgs,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let g = resolve::gains(ctx.preset.as_ref(), &ctx.cfg, &args.gains)?;
    let mut pid = pid_from_adrc(&g).map_err(usage)?;
    if let Some(t) = args.tf {
        pid = pid.with_output_filter(FilterSpec::FirstOrder { t });
    }
    if let Some(p) = args.perturb_kp {
        pid.kp *= 1.0 + p;
    }
    let composed = tf_series(
        &build_pid_fb(&pid).map_err(usage)?,
        &build_ceq(&g, &pid.fy).map_err(usage)?,
    )
    .map_err(usage)?;
    let reference = build_eadrc_fb(&g).map_err(usage)?;

    let mut rows = Vec::with_capacity(EQUIV_POINTS);
    for w in log_grid(EQUIV_RANGE.0, EQUIV_RANGE.1, EQUIV_POINTS) {
        let a = composed
            .response_at(w)
            .map_err(|e| CliError::Failure(e.to_string()))?;
        let b = reference
            .response_at(w)
            .map_err(|e| CliError::Failure(e.to_string()))?;
        rows.push((w, (a - b).norm() / b.norm()));
    }
    let (w_worst, worst) =
        rows.iter().copied().fold(
            (0.0, f64::NEG_INFINITY),
            |m, r| if r.1 > m.1 { r } else { m },
        );
    let pass = worst < EQUIV_TOL;

    let mut s = String::new();
    match ctx.format {
        Format::Text => {
            let _ = writeln!(
                s,
                "eADRC feedback vs {} x C_EQ{} over {EQUIV_POINTS} points in [{:e}, {:e}] rad/s",
                if g.n == 1 { "PI" } else { "PID" },
                g.n,
                EQUIV_RANGE.0,
                EQUIV_RANGE.1
            );
            let _ = writeln!(
                s,
                "max relative deviation = {worst:e} at omega = {w_worst:e} rad/s"
            );
            let _ = writeln!(
                s,
                "{} (tolerance {EQUIV_TOL:e})",
                if pass { "PASS" } else { "FAIL" }
            );
        }
        Format::Csv => {
            s.push_str("omega_rad_s,rel_deviation\n");
            for (w, d) in &rows {
                let _ = writeln!(s, "{w:.11e},{d:.11e}");
            }
        }
    }
    emit(stdout, &s)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Failure(format!(
            "equivalence identity violated: relative deviation {worst:e} at omega = {w_worst:e} rad/s"
        )))
    }
}

pub fn ms(ctx: &Context, args: &LoopArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (plant, c) = resolve::control_loop(ctx.preset.as_ref(), &ctx.cfg, args)?;
    let label = c.label.clone();
    let asm = LoopAssembly::new(plant, c).map_err(usage)?;
    let r = ms_index(&asm, DEFAULT_MS_RANGE).map_err(|e| CliError::Failure(e.to_string()))?;

    let needs_sweep = ctx.format == Format::Csv || ctx.out.is_some() || ctx.plot;
    let sweep = if needs_sweep {
        let grid = log_grid(DEFAULT_MS_RANGE.0, DEFAULT_MS_RANGE.1, SWEEP_POINTS);
        let mut mags = Vec::with_capacity(grid.len());
        for &w in &grid {
            let l = asm
                .loop_gain(w)
                .map_err(|e| CliError::Failure(e.to_string()))?;
            mags.push(1.0 / (1.0 + l).norm());
        }
        let mut csv = String::from("omega_rad_s,sensitivity_mag\n");
        for (w, m) in grid.iter().zip(&mags) {
            let _ = writeln!(csv, "{w:.11e},{m:.11e}");
        }
        Some((grid, mags, csv))
    } else {
        None
    };

    match (ctx.format, &sweep) {
        (Format::Csv, Some((_, _, csv))) => emit(stdout, csv)?,
        _ => emit(
            stdout,
            &format!(
                "controller = {label}\nms = {:.6}\nomega_peak_rad_s = {:.6}\n",
                r.ms, r.omega_peak
            ),
        )?,
    }
    if let Some((grid, mags, csv)) = &sweep {
        if ctx.out.is_some() || ctx.plot {
            let dir = out_dir(ctx)?;
            if ctx.out.is_some() {
                write_file(&dir.join("sensitivity.csv"), csv)?;
            }
            if ctx.plot {
                let svg = line_plot(
                    &format!("|S(jw)|, {label}, Ms = {:.4}", r.ms),
                    "omega [rad/s]",
                    true,
                    &[Panel {
                        y_label: "|S|",
                        series: vec![Series {
                            label: "|S|",
                            x: grid,
                            y: mags,
                        }],
                    }],
                );
                write_file(&dir.join("sensitivity.svg"), &svg)?;
            }
        }
    }
    Ok(())
}

pub fn bode(ctx: &Context, args: &LoopArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (plant, c) = resolve::control_loop(ctx.preset.as_ref(), &ctx.cfg, args)?;
    let label = c.label.clone();
    let asm = LoopAssembly::new(plant, c).map_err(usage)?;
    let (yd, un, er) = (channel_yd(&asm), channel_un(&asm), channel_er(&asm));
    let tfs: [(&str, &dyn FrequencyEval); 3] = [("G_YD", &yd), ("G_UN", &un), ("G_ER", &er)];
    let data = bode_export(&tfs, DEFAULT_MS_RANGE, SWEEP_POINTS)
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let csv = data.to_csv();
    match &ctx.out {
        Some(_) => {
            let dir = out_dir(ctx)?;
            let path = dir.join("bode.csv");
            write_file(&path, &csv)?;
            emit(
                stdout,
                &format!("controller = {label}\nwrote {}\n", path.display()),
            )?;
        }
        None => emit(stdout, &csv)?,
    }
    if ctx.plot {
        let dir = out_dir(ctx)?;
        let series = data
            .columns
            .iter()
            .map(|col| Series {
                label: &col.label,
                x: &data.omegas,
                y: &col.mag_db,
            })
            .collect();
        let svg = line_plot(
            &format!("Closed-loop channels, {label}"),
            "omega [rad/s]",
            true,
            &[Panel {
                y_label: "magnitude [dB]",
                series,
            }],
        );
        write_file(&dir.join("bode.svg"), &svg)?;
    }
    Ok(())
}

pub fn simulate(ctx: &Context, args: &SimArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (sc, window) = resolve::scenario(ctx.preset.as_ref(), &ctx.cfg, args, ctx.seed)?;
    let trace = run_closed_loop(&sc).map_err(CliError::from_sim)?;
    let metrics = compute_metrics(&trace, Some(window)).map_err(CliError::from_sim)?;

    let mut report = format!(
        "scenario = {}\nseed = {}\nsteps = {}\n",
        trace.label,
        ctx.seed,
        trace.len()
    );
    for n in &trace.notes {
        let _ = writeln!(report, "note = {n}");
    }
    let _ = writeln!(report, "{metrics}");

    let dir = out_dir(ctx)?;
    let trace_path = dir.join("trace.csv");
    write_file(&trace_path, &trace.to_csv())?;
    write_file(&dir.join("metrics.txt"), &report)?;
    if ctx.plot {
        let svg = line_plot(
            &trace.label,
            "t [s]",
            false,
            &[
                Panel {
                    y_label: "output",
                    series: vec![
                        Series {
                            label: "r",
                            x: &trace.t,
                            y: &trace.r,
                        },
                        Series {
                            label: "y",
                            x: &trace.t,
                            y: &trace.y,
                        },
                    ],
                },
                Panel {
                    y_label: "control",
                    series: vec![Series {
                        label: "u",
                        x: &trace.t,
                        y: &trace.u,
                    }],
                },
                Panel {
                    y_label: "disturbance",
                    series: vec![Series {
                        label: "d",
                        x: &trace.t,
                        y: &trace.d,
                    }],
                },
            ],
        );
        write_file(&dir.join("trace.svg"), &svg)?;
    }
    let _ = writeln!(report, "trace = {}", trace_path.display());
    emit(stdout, &report)
}

pub fn crib(ctx: &Context, args: &CribArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let preset = ctx.preset.as_ref();
    let g = resolve::gains(preset, &ctx.cfg, &args.gains)?;
    let beta = args.beta.unwrap_or(match preset.map(|p| p.base) {
        Some(Base::Paper(p)) => p.betas()[0],
        Some(_) => 0.6,
        None => 1.0,
    });
    let pid = resolve::crib_pid(&g, beta, args.tr, args.tf)?;
    let sheet = crib_sheet(&g, &pid).map_err(usage)?;

    let mut s = String::new();
    match ctx.format {
        Format::Text => {
            let _ = writeln!(
                s,
                "n = {}, beta = {beta}, coefficients in ascending powers of s",
                g.n
            );
            for row in &sheet.rows {
                let _ = writeln!(s, "{}", row.label);
                for (name, tf) in [("prefilter", &row.prefilter), ("feedback", &row.feedback)] {
                    let _ = writeln!(s, "  {name} num = {}", list(&tf.num));
                    let _ = writeln!(s, "  {name} den = {}", list(&tf.den));
                }
            }
        }
        Format::Csv => {
            s.push_str("structure,block,polynomial,power,coefficient\n");
            for row in &sheet.rows {
                for (name, tf) in [("prefilter", &row.prefilter), ("feedback", &row.feedback)] {
                    csv_poly(&mut s, &row.label, name, tf);
                }
            }
        }
    }
    emit(stdout, &s)
}

fn csv_poly(s: &mut String, label: &str, block: &str, tf: &TfReport) {
    for (poly, coeffs) in [("num", &tf.num), ("den", &tf.den)] {
        for (i, c) in coeffs.iter().enumerate() {
            let _ = writeln!(s, "{label},{block},{poly},{i},{c:.17e}");
        }
    }
}
