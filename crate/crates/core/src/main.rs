use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use smale_sft::cli::{self, OutputFormat, SessionConfig};

#[derive(Parser)]
#[command(
    name = "smale-sft",
    version,
    about = "Asymptotic groupoids and orbit equivalence for shifts of finite type"
)]
struct Args {
    /// Metric base as p/q, strictly between 0 and 1.
    #[arg(long, global = true, default_value = "1/2")]
    lambda0: String,
    /// Disagreement radius R of the verification family.
    #[arg(long, global = true)]
    radius: Option<u32>,
    /// Tail period bound Q of the verification family.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    tails: Option<u32>,
    /// Periodic point period bound P.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    periods: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Size, irreducibility and periodic point counts of a matrix file.
    MatrixInfo { matrix: PathBuf },
    /// Stable, unstable and asymptotic levels of two points.
    Equiv { matrix: PathBuf, x: String, z: String },
    /// Limit periodic points, limit sets and recurrence of a point.
    Limits { matrix: PathBuf, x: String },
    /// Checks an orbit-equivalence bundle file.
    Verify { bundle: PathBuf },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let constants = match cli::parse_lambda(&args.lambda0) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: --lambda0: {e}");
            return ExitCode::from(cli::EXIT_INPUT as u8);
        }
    };
    let config = SessionConfig {
        constants,
        radius: args.radius,
        tails: args.tails,
        periods: args.periods,
        format: match args.format {
            Format::Text => OutputFormat::Text,
            Format::Structured => OutputFormat::Structured,
        },
    };
    let output = match &args.command {
        Command::MatrixInfo { matrix } => cli::cmd_matrix_info(matrix, &config),
        Command::Equiv { matrix, x, z } => cli::cmd_equiv(matrix, x, z, &config),
        Command::Limits { matrix, x } => cli::cmd_limits(matrix, x, &config),
        Command::Verify { bundle } => cli::cmd_verify(bundle, &config),
    };
    let _ = std::io::stdout().write_all(output.stdout.as_bytes());
    let _ = std::io::stderr().write_all(output.stderr.as_bytes());
    ExitCode::from(output.code as u8)
}
