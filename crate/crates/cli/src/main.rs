use std::path::PathBuf;
use std::process::exit;

use clap::{Args, Parser, Subcommand};

use hhs2_cli::{run_cohomology, run_deform, run_verify, emit, RunConfig};

/// Exact cohomology of triangle cochain complexes over Q or F_p: rank
/// reports, law-verification suites, and order-by-order deformation lifts.
#[derive(Parser)]
#[command(name = "hhs2", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Algebra: k, dual, trunc:m, trunc2:m,n, or a path to a JSON spec
    #[arg(long, default_value = "dual")]
    algebra: String,

    /// Coefficient field: Q or a prime p
    #[arg(long, default_value = "Q")]
    field: String,

    /// Largest cochain degree to process
    #[arg(long, default_value_t = 3)]
    max_degree: usize,

    /// Randomized trials per check in verification suites
    #[arg(long, default_value_t = 25)]
    trials: usize,

    /// Seed for all randomized choices
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output format: json or tsv
    #[arg(long, default_value = "json")]
    format: String,

    /// Maximum scalars per cochain table (overrides HHS2_CAP)
    #[arg(long)]
    cap: Option<usize>,

    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute cohomology ranks degree by degree
    Cohomology {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run verification suites against the shipped laws
    Verify {
        #[command(flatten)]
        common: CommonArgs,

        /// operad, gv, galgebra, crosscheck, or all
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Lift a first-order deformation as far as the obstructions allow
    Deform {
        #[command(flatten)]
        common: CommonArgs,

        /// Source of u_1: euler, zero, or a path to a JSON matrix
        #[arg(long, default_value = "euler")]
        u1: String,

        /// Target truncation order
        #[arg(long, default_value_t = 5)]
        order: usize,
    },
}

fn main() {
    // Usage errors are input errors (exit 1); keep 2 for capped partial
    // results. Help and version requests are not errors.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            exit(0);
        }
        Err(e) => {
            eprint!("{e}");
            exit(1);
        }
    };
    let (common, outcome) = match &cli.command {
        Command::Cohomology { common } => (common, build(common).and_then(|c| run_cohomology(&c))),
        Command::Verify { common, suite } => {
            (common, build(common).and_then(|c| run_verify(&c, suite)))
        }
        Command::Deform { common, u1, order } => {
            (common, build(common).and_then(|c| run_deform(&c, u1, *order)))
        }
    };
    match outcome {
        Ok(out) => {
            if let Err(e) = emit(&out, common.out.as_deref()) {
                eprintln!("error: {e}");
                exit(e.exit_code());
            }
            exit(out.exit_code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit(e.exit_code());
        }
    }
}

fn build(common: &CommonArgs) -> Result<RunConfig, hhs2_cli::CliError> {
    RunConfig::build(
        &common.field,
        &common.algebra,
        common.max_degree,
        common.trials,
        common.seed,
        &common.format,
        common.cap,
    )
}
