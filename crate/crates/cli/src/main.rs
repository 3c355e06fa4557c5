mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{SweepRange, SweepVar};
use config::{Format, Overrides, RunConfig, TrajKind, DATA_DIR_ENV};
use error::CliResult;

/// Ion-transport trajectories and Stark-shift error budgets.
///
/// Settings are taken from built-in defaults, then the `--config` TOML file,
/// then command-line flags; later sources win. Atomic data comes from
/// `[data]` in the config file, else from the directory named by
/// `STARK_DATA_DIR`, else from the tables compiled into the binary.
#[derive(Debug, Parser)]
#[command(name = "shuttle-stark", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Qubit preset: ca40-sd or be9-hyperfine.
    #[arg(long, global = true, value_name = "PRESET")]
    qubit: Option<String>,
    /// Transport distance.
    #[arg(long = "L", global = true, value_name = "METERS")]
    length: Option<f64>,
    /// Transport duration.
    #[arg(long = "T", global = true, value_name = "SECONDS")]
    duration: Option<f64>,
    /// Trap angular frequency [default: 2π·2.9 MHz].
    #[arg(long, global = true, value_name = "RAD_PER_S")]
    omega: Option<f64>,
    /// Phase budget [default: π/100].
    #[arg(long, global = true, value_name = "RADIANS")]
    budget: Option<f64>,
    #[arg(long, global = true, value_enum)]
    traj: Option<TrajKind>,
    /// Ramp time of the ramped cubic.
    #[arg(long, global = true, value_name = "SECONDS")]
    tau: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// ∫q̈² dt of the configured trajectory.
    Zeta,
    /// Optimal ion path q₀(t) and well program s₀(t), one well per trap frequency.
    Optimize {
        /// Trap frequencies (rad/s), comma separated [default: --omega].
        #[arg(long, value_delimiter = ',', value_name = "RAD_PER_S")]
        omegas: Vec<f64>,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Differential Stark phase and the minimum over all paths.
    Phase,
    /// Shortest transport time within the phase budget.
    Threshold,
    /// First- and second-order leakage amplitudes.
    Decoherence,
    /// Fock-basis check of the coherent-state motion.
    Simulate {
        /// Number-basis dimension [default: 64].
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Report scalars against one swept input.
    Sweep {
        #[arg(long = "var", value_enum)]
        variable: SweepVar,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 24)]
        points: usize,
        /// Space points logarithmically.
        #[arg(long)]
        log: bool,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    let c = cli.common;
    let overrides = Overrides {
        format: c.format,
        out: c.out,
        qubit: c.qubit,
        length: c.length,
        duration: c.duration,
        omega: c.omega,
        budget: c.budget,
        traj: c.traj,
        tau: c.tau,
    };
    let data_dir = std::env::var_os(DATA_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let config = RunConfig::load(c.config.as_deref(), &overrides, data_dir)?;
    let report = match cli.command {
        Command::Zeta => commands::cmd_zeta(&config)?,
        Command::Optimize { omegas, points } => commands::cmd_optimize(&config, &omegas, points)?,
        Command::Phase => commands::cmd_phase(&config)?,
        Command::Threshold => commands::cmd_threshold(&config)?,
        Command::Decoherence => commands::cmd_decoherence(&config)?,
        Command::Simulate { dim } => commands::cmd_simulate(&config, dim)?,
        Command::Sweep { variable, from, to, points, log } => {
            commands::cmd_sweep(&config, &SweepRange { variable, from, to, points, log })?
        }
    };
    report::emit(&report.render(config.format)?, config.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprintln!("shuttle-stark: error[usage]: {}", e.to_string().trim_end());
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shuttle-stark: error[{}]: {e}", e.kind());
            ExitCode::from(e.exit_code())
        }
    }
}
