//! `eqadrc` command-line front end.

mod commands;
mod config;
mod resolve;
mod svg;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eqadrc::sim::SimError;
use thiserror::Error;

use crate::config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or parameters (exit 2).
    #[error("{0}")]
    Usage(String),
    /// The analysis or simulation ran and failed (exit 1).
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    pub fn from_sim(e: SimError) -> Self {
        match e {
            SimError::NonFiniteState { .. } | SimError::EmptyTrace => {
                CliError::Failure(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }

    pub fn io(what: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Failure(format!("{}: {e}", what.display()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "eqadrc",
    version,
    about = "Error-based ADRC and PI/PID equivalence toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Named preset (paper-n1, paper-n1-pi, paper-n1-eadrc, paper-n2, paper-n2-pid, paper-n2-eadrc, scenario-1, scenario-2).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for data files and plots.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Noise seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write an SVG plot.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bandwidth-tune an eADRC and print its PI/PID equivalent and C_EQ.
    Tune(GainArgs),
    /// Check eADRC feedback against PI/PID x C_EQ on a frequency sweep.
    EquivCheck(EquivArgs),
    /// Peak sensitivity of a loop.
    Ms(LoopArgs),
    /// Bode data of the G_YD, G_UN and G_ER channels.
    Bode(LoopArgs),
    /// Closed-loop time-domain simulation.
    Simulate(SimArgs),
    /// Prefilter and feedback of the PI/PID and eADRC structures.
    Crib(CribArgs),
}

#[derive(Clone, Debug, Default, Args)]
pub struct GainArgs {
    /// Plant order.
    #[arg(long)]
    pub n: Option<usize>,
    /// Closed-loop bandwidth [rad/s].
    #[arg(long)]
    pub omega_cl: Option<f64>,
    /// Observer-to-controller bandwidth ratio.
    #[arg(long)]
    pub k_eso: Option<f64>,
    /// Input-gain estimate.
    #[arg(long)]
    pub b0: Option<f64>,
}

#[derive(Clone, Debug, Default, Args)]
pub struct EquivArgs {
    #[command(flatten)]
    pub gains: GainArgs,
    /// Relative change applied to Kp before the check (0.01 = +1 %).
    #[arg(long, allow_negative_numbers = true)]
    pub perturb_kp: Option<f64>,
    /// Output filter time constant F_Y [s] shared by the PID and C_EQ.
    #[arg(long)]
    pub tf: Option<f64>,
}

#[derive(Clone, Debug, Default, Args)]
pub struct LoopArgs {
    #[command(flatten)]
    pub gains: GainArgs,
    /// pi, pid or eadrc.
    #[arg(long)]
    pub kind: Option<String>,
    /// 1dof or 2dof.
    #[arg(long)]
    pub dof: Option<String>,
    /// Reference weight of the 2DOF structure.
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Clone, Debug, Default, Args)]
pub struct SimArgs {
    /// Scenario variant (scenario-1: pid, eadrc, pid-plus-ceq2; scenario-2: eadrc-1dof, eadrc-2dof).
    #[arg(long)]
    pub variant: Option<String>,
    /// PID output filter time constant [s].
    #[arg(long)]
    pub tf: Option<f64>,
    /// Reference filter time constant [s].
    #[arg(long)]
    pub tr: Option<f64>,
    /// Controller for paper-n* presets: pi, pid or eadrc.
    #[arg(long)]
    pub kind: Option<String>,
    /// 1dof or 2dof, for paper-n* presets.
    #[arg(long)]
    pub dof: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Simulated time [s].
    #[arg(long)]
    pub t_end: Option<f64>,
    /// RK4 steps per controller period.
    #[arg(long)]
    pub substeps: Option<usize>,
    /// Switch the measurement noise off.
    #[arg(long)]
    pub no_noise: bool,
    /// Switch the input disturbance off.
    #[arg(long)]
    pub no_disturbance: bool,
    /// Run the controller in 64-bit fixed point with this many fractional bits.
    #[arg(long)]
    pub frac_bits: Option<u32>,
}

#[derive(Clone, Debug, Default, Args)]
pub struct CribArgs {
    #[command(flatten)]
    pub gains: GainArgs,
    /// Reference weight of the 2DOF rows.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Reference filter time constant [s] of the 2DOF rows.
    #[arg(long)]
    pub tr: Option<f64>,
    /// Output filter time constant [s].
    #[arg(long)]
    pub tf: Option<f64>,
}

/// Options shared by every command after config and preset resolution.
pub struct Context {
    pub cfg: RunConfig,
    pub preset: Option<resolve::Preset>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub format: Format,
    pub plot: bool,
}

fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let ctx = Context {
        preset: resolve::preset(&cli.preset, &cfg)?,
        seed: cli.seed.or(cfg.seed).unwrap_or(0),
        cfg,
        out: cli.out,
        format: cli.format,
        plot: cli.plot,
    };
    match cli.command {
        Command::Tune(a) => commands::tune(&ctx, &a, stdout),
        Command::EquivCheck(a) => commands::equiv_check(&ctx, &a, stdout),
        Command::Ms(a) => commands::ms(&ctx, &a, stdout),
        Command::Bode(a) => commands::bode(&ctx, &a, stdout),
        Command::Simulate(a) => commands::simulate(&ctx, &a, stdout),
        Command::Crib(a) => commands::crib(&ctx, &a, stdout),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let result = run(cli, &mut lock);
    let _ = lock.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
