use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "kfun", version, about = "Coherent-basis Gaussian state toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kernel of a Gaussian state, optionally evaluated at a phase-space point.
    Kfunc {
        #[command(flatten)]
        state: StateArgs,
        /// Phase-space point `q_1,..,q_N,p_1,..,p_N`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<f64>>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Photon subtraction: success probability and optional cat-Bell fidelity.
    Subtract {
        #[command(flatten)]
        state: StateArgs,
        /// Photons to subtract per mode.
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u32>,
        /// Transmissivity per mode, or one value for all.
        #[arg(long, value_delimiter = ',', required = true)]
        tau: Vec<f64>,
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Photon-number pattern probability, with optional uniform loss.
    Gbs {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        pattern: PatternArgs,
        /// Transmissivity of a uniform pure-loss channel before detection.
        #[arg(long)]
        loss: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Condition the unmeasured modes on a partial pattern.
    Herald {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        pattern: PatternArgs,
        /// Largest photon number reported per heralded mode.
        #[arg(long, default_value_t = 4)]
        fock_max: u32,
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Case studies.
    Scenario {
        #[command(subcommand)]
        which: ScenarioCommand,
    },
    /// Scenario (i)/(ii) comparison over an (r, tau) grid, written as CSV.
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepScenario::Both)]
        scenario: SweepScenario,
        #[arg(long)]
        qgamma: f64,
        /// `start:stop:step`, used for r and tau.
        #[arg(long, default_value = "0.01:1:0.01")]
        grid: String,
        /// Separate tau grid, `start:stop:step`.
        #[arg(long)]
        tau_grid: Option<String>,
        #[arg(long, value_enum, default_value_t = SweepMethod::Engine)]
        method: SweepMethod,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Subcommand, Debug)]
enum ScenarioCommand {
    /// Five photons subtracted from each mode of a two-mode squeezed vacuum.
    Five {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        pgamma: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Scenarios (i) and (ii) at one point.
    Compare {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    qgamma: f64,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    tau: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    method: MethodArg,
}

#[derive(Args, Debug, Clone)]
struct StateArgs {
    #[arg(long, value_enum)]
    state: StateKind,
    /// Squeezing parameter for `sv`, `tmsv` and `cluster`.
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    /// Graph JSON for `cluster`.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// State JSON for `file`.
    #[arg(long)]
    path: Option<PathBuf>,
    /// Number of modes for `vacuum`.
    #[arg(long, default_value_t = 1)]
    n_modes: usize,
}

#[derive(Args, Debug, Clone)]
struct PatternArgs {
    /// Photon counts, e.g. `2,2`.
    #[arg(long, value_delimiter = ',')]
    pattern: Option<Vec<u32>>,
    /// 1-based modes the counts refer to; all modes when omitted.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<usize>>,
    /// Pattern JSON `{"pattern": [..], "modes": [..]}`.
    #[arg(long, conflicts_with_all = ["pattern", "modes"])]
    pattern_file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct TargetArgs {
    /// Cat-Bell target amplitude `q`; enables the fidelity output.
    #[arg(long, allow_hyphen_values = true)]
    qgamma: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pgamma: f64,
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum StateKind {
    Vacuum,
    Sv,
    Tmsv,
    Cluster,
    File,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MethodArg {
    Closed,
    Engine,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SweepMethod {
    Closed,
    Engine,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SweepScenario {
    I,
    Ii,
    Both,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("KFUN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("KFUN_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|_| commands::run(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
