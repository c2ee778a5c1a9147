//! `hyperbat`: reproduce the energetics of the pulsed quadratic
//! two-mode battery from the command line: charging traces, optimal
//! time/energy sweeps, figure presets, and certification of the
//! analytics against the Fock-space oracle.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{GridConfig, Mode, OracleSwitch, OutputFormat, PulseKind, RunConfig, ShapeKind};

/// Process outcome, mapped to exit codes: usage errors exit 1,
/// verification failures exit 2, numerical failures exit 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    VerifyFailed,
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::VerifyFailed => write!(f, "verification failed"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::VerifyFailed => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Args, Clone)]
struct CommonArgs {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Charger-holder coupling rate.
    #[arg(long)]
    g: Option<f64>,
    /// Charger decay rate.
    #[arg(long)]
    gamma: Option<f64>,
    /// Level spacing of both modes.
    #[arg(long)]
    omega_b: Option<f64>,
    /// Dimensionless strength of the quadratic pulse.
    #[arg(long)]
    omega_drive: Option<f64>,
    /// Evaluation grid start:stop:count[:log].
    #[arg(long)]
    grid: Option<GridConfig>,
    /// Append brute-force oracle columns.
    #[arg(long, value_enum)]
    oracle: Option<OracleSwitch>,
    /// Per-mode Fock cutoff override for oracle runs.
    #[arg(long)]
    n_max: Option<usize>,
    /// Relative tolerance of the oracle integrator.
    #[arg(long)]
    tol: Option<f64>,
    /// Output path (stdout when omitted; figures default to <panel>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Concurrency bound (default: HYPERBAT_JOBS or all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Pulse kind for oracle traces.
    #[arg(long, value_enum)]
    pulse: Option<PulseKind>,
    /// Finite-pulse width.
    #[arg(long)]
    tau: Option<f64>,
    /// Finite-pulse shape.
    #[arg(long, value_enum)]
    shape: Option<ShapeKind>,
}

impl CommonArgs {
    fn into_config(self, mode: Mode) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::new(mode),
        };
        cfg.mode = mode;
        if let Some(v) = self.g {
            cfg.params.g = v;
        }
        if let Some(v) = self.gamma {
            cfg.params.gamma = v;
        }
        if let Some(v) = self.omega_b {
            cfg.params.omega_b = v;
        }
        if let Some(v) = self.omega_drive {
            cfg.params.omega_drive = v;
        }
        if let Some(v) = self.grid {
            cfg.grid = Some(v);
        }
        if let Some(v) = self.oracle {
            cfg.oracle = v;
        }
        if let Some(v) = self.n_max {
            cfg.n_max = Some(v);
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.out {
            cfg.out = Some(v);
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        if let Some(v) = self.jobs {
            cfg.jobs = Some(v);
        }
        if let Some(v) = self.pulse {
            cfg.pulse.kind = v;
        }
        if let Some(v) = self.tau {
            cfg.pulse.tau = Some(v);
        }
        if let Some(v) = self.shape {
            cfg.pulse.shape = Some(v);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SweepQuantity {
    /// Optimal charging time t_E.
    #[value(name = "t_e")]
    TimeToMax,
    /// Optimal stored energy E(t_E).
    #[value(name = "e_max")]
    MaxEnergy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum FigurePanel {
    Fig2a,
    Fig2b,
    Fig2c,
}

#[derive(Debug, Parser)]
#[command(
    name = "hyperbat",
    about = "Energetics of a pulsed quadratic two-mode quantum battery",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a charging trace: normalized energy, ergotropy, D and P.
    Trace {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sweep the optimal charging time or energy over g/gamma.
    Sweep {
        #[arg(long, value_enum)]
        quantity: SweepQuantity,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the oracle-vs-analytics certification grid.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Emit figure-panel data plus a gnuplot script.
    Figure {
        #[arg(long, value_enum)]
        panel: FigurePanel,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn init_jobs(jobs: Option<usize>) {
    let n = jobs.or_else(|| {
        std::env::var("HYPERBAT_JOBS").ok().and_then(|v| v.parse::<usize>().ok())
    });
    if let Some(n) = n {
        // A pool may already exist (repeated invocations in tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Trace { common } => {
            let cfg = common.into_config(Mode::Trace)?;
            init_jobs(cfg.jobs);
            commands::run_trace(&cfg)
        }
        Command::Sweep { quantity, common } => {
            let mode = match quantity {
                SweepQuantity::TimeToMax => Mode::SweepTE,
                SweepQuantity::MaxEnergy => Mode::SweepEmax,
            };
            let cfg = common.into_config(mode)?;
            init_jobs(cfg.jobs);
            commands::run_sweep(&cfg)
        }
        Command::Verify { common } => {
            let cfg = common.into_config(Mode::Verify)?;
            init_jobs(cfg.jobs);
            match verify::run(&cfg)? {
                true => Ok(()),
                false => Err(CliError::VerifyFailed),
            }
        }
        Command::Figure { panel, common } => {
            let mode = match panel {
                FigurePanel::Fig2a => Mode::Fig2a,
                FigurePanel::Fig2b => Mode::Fig2b,
                FigurePanel::Fig2c => Mode::Fig2c,
            };
            let cfg = common.into_config(mode)?;
            init_jobs(cfg.jobs);
            commands::run_figure(&cfg)
        }
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn run_from_env() -> i32 {
    run_from(std::env::args_os())
}
