use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod records;

/// Verification harness for universal 2→M cloning of identical mixed qubits.
#[derive(Parser, Debug)]
#[command(name = "qclone", version)]
struct Cli {
    /// Largest M simulated densely; beyond it only the closed-form path runs.
    #[arg(long, global = true, default_value_t = qclone::cloner::DEFAULT_MAX_QUBITS)]
    max_dense_qubits: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the invariant checks for one M over random mixed inputs.
    Verify {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Emit one record per (M, trial) over a range of M.
    Sweep {
        #[arg(long)]
        m_min: usize,
        #[arg(long)]
        m_max: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write 0 in the wall_time_ms column so output is byte-stable.
        #[arg(long)]
        no_timing: bool,
    },
    /// Clone one input state and print the single-qubit output.
    Clone {
        #[command(flatten)]
        bloch: BlochArg,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Compare the 2→2 machine with symmetric projection on one input.
    Baseline {
        #[command(flatten)]
        bloch: BlochArg,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct BlochArg {
    /// Input Bloch vector.
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true, required = true)]
    bloch: Vec<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Non-clap failures, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    /// Bad flag values: exit 2.
    Usage(String),
    /// A check failed or the computation errored: exit 1.
    Check(String),
}

impl From<qclone::Error> for Failure {
    fn from(e: qclone::Error) -> Self {
        Failure::Check(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Check(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cap = cli.max_dense_qubits;
    let result = match cli.command {
        Command::Verify {
            m,
            trials,
            seed,
            tol,
        } => commands::verify(m, trials, seed, tol, cap),
        Command::Sweep {
            m_min,
            m_max,
            trials,
            seed,
            format,
            no_timing,
        } => commands::sweep(m_min, m_max, trials, seed, format, !no_timing, cap),
        Command::Clone { bloch, m, format } => commands::clone(&bloch.bloch, m, format, cap),
        Command::Baseline { bloch, format } => commands::baseline(&bloch.bloch, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
