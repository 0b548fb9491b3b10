use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gaussfid::io::{cmd_fidelity, cmd_oracle_check, cmd_spectrum, cmd_sweep, cmd_validate, CommandOutput, Format};
use gaussfid::{Result, Tolerances};

#[derive(Parser)]
#[command(name = "gaussfid", version, about = "Fidelity between Gaussian states")]
struct Cli {
    /// Tolerance family: `strict` scales every threshold by 0.1.
    #[arg(long, global = true, value_enum, default_value_t = Profile::Default)]
    tolerance_profile: Profile,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Default,
    Strict,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Table => Format::Table,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fidelity, overlap, Bures distance and invariants of two states.
    Fidelity {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Evaluate a parameter grid and emit CSV.
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the closed form with the Fock-space brute force for two circuits.
    OracleCheck {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 40)]
        cutoff: usize,
        /// Skip the parameter limits and the trace-loss budget.
        #[arg(long)]
        force: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Validity verdict, symplectic spectrum and purity of a state.
    Validate {
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Symplectic eigenvalues of a state.
    Spectrum {
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
}

fn run(cli: Cli) -> Result<CommandOutput> {
    let tol = match cli.tolerance_profile {
        Profile::Default => Tolerances::default(),
        Profile::Strict => Tolerances::strict(),
    };
    match cli.command {
        Command::Fidelity { a, b, format } => cmd_fidelity(&a, &b, format.into(), &tol),
        Command::Sweep { spec, out } => cmd_sweep(&spec, out.as_deref(), &tol),
        Command::OracleCheck { a, b, cutoff, force, format } => {
            cmd_oracle_check(&a, &b, cutoff, force, format.into(), &tol)
        }
        Command::Validate { state, format } => cmd_validate(&state, format.into(), &tol),
        Command::Spectrum { state, format } => cmd_spectrum(&state, format.into(), &tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
